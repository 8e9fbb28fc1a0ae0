#include "tdslab/model.hpp"

#include <cmath>

#include "tdslab/error.hpp"

namespace tdslab {

namespace {

constexpr double kEmbedInitStd = 0.1;

EmbeddingTable make_table(ParamStore& store, const std::string& name, int vocab_plus_pad,
                          int dim, Rng rng) {
  EmbeddingTable t;
  t.weights = store.create(name, vocab_plus_pad, dim);
  t.vocab = vocab_plus_pad;
  t.dim = dim;
  init_matrix_normal(t.weights->value, kEmbedInitStd, rng);
  // Row 0 is the absent/padding row and must stay exactly zero.
  for (int d = 0; d < dim; ++d) t.weights->value.at(0, d) = 0.0;
  return t;
}

}  // namespace

TwinTowerModel::TwinTowerModel(const FeatureSchema& schema, const TowerConfig& config,
                               uint64_t init_seed)
    : schema_(schema), config_(config) {
  schema_.validate();
  Rng root(init_seed);
  uint64_t salt = 0;
  for (Side side : {Side::user, Side::item}) {
    Tower& tower = side == Side::user ? user_ : item_;
    const std::string prefix = side_name(side);
    int width = 0;
    for (size_t f : schema_.stat_on(side)) {
      tower.stat_emb.push_back(make_table(params_, prefix + ".stat." + schema_.stat[f].name,
                                          schema_.stat[f].n_buckets + 1, config_.embed_dim,
                                          root.fork(1, salt)));
      width += config_.embed_dim;
      ++salt;
    }
    for (size_t f : schema_.seq_on(side)) {
      tower.seq_emb.push_back(make_table(params_, prefix + ".seq." + schema_.seq[f].name,
                                         schema_.seq[f].vocab + 1, config_.embed_dim,
                                         root.fork(1, salt)));
      width += config_.embed_dim;
      ++salt;
    }
    for (size_t f : schema_.cate_on(side)) {
      tower.cate_emb.push_back(make_table(params_, prefix + ".cate." + schema_.cate[f].name,
                                          schema_.cate[f].vocab + 1, config_.embed_dim,
                                          root.fork(1, salt)));
      width += config_.embed_dim;
      ++salt;
    }
    tower.input_width = width;
    tower.encoder = make_mlp(params_, prefix + ".enc", width, config_.enc_hidden, config_.d_z,
                             root.fork(2, salt));
    tower.decoder = make_mlp(params_, prefix + ".dec", config_.d_z, config_.dec_hidden, width,
                             root.fork(3, salt));
  }
  task_bias_ = params_.create("predictor.bias", 1, schema_.n_tasks);
}

EncodeCtx TwinTowerModel::encode(const SideBatch& feats, Side side,
                                 const std::vector<std::vector<uint8_t>>* cate_drop) const {
  const Tower& tower = this->tower(side);
  const int n = feats.stat.empty()
                    ? (feats.cate.empty()
                           ? (feats.seq.empty() ? 0
                                                : static_cast<int>(feats.seq[0].size()) /
                                                      schema_.seq[schema_.seq_on(side)[0]].max_len)
                           : static_cast<int>(feats.cate[0].size()))
                    : static_cast<int>(feats.stat[0].size());

  EncodeCtx ctx;
  ctx.feats = &feats;
  ctx.cate_drop = cate_drop;
  ctx.e = Matrix(n, tower.input_width);

  int offset = 0;
  const std::vector<uint8_t> no_drop;
  for (size_t k = 0; k < tower.stat_emb.size(); ++k) {
    Matrix block = embedding_apply(tower.stat_emb[k], feats.stat[k], no_drop);
    for (int i = 0; i < n; ++i) {
      for (int d = 0; d < block.cols; ++d) ctx.e.at(i, offset + d) = block.at(i, d);
    }
    offset += config_.embed_dim;
  }

  const auto seq_idx = schema_.seq_on(side);
  ctx.seq_inv_counts.resize(tower.seq_emb.size());
  for (size_t k = 0; k < tower.seq_emb.size(); ++k) {
    const int max_len = schema_.seq[seq_idx[k]].max_len;
    const auto& ids = feats.seq[k];
    auto& inv_counts = ctx.seq_inv_counts[k];
    inv_counts.assign(n, 0.0);
    const Matrix& weights = tower.seq_emb[k].weights->value;
    for (int i = 0; i < n; ++i) {
      int count = 0;
      for (int j = 0; j < max_len; ++j) {
        const int id = ids[static_cast<size_t>(i) * max_len + j];
        if (id == 0) continue;
        if (id < 0 || id >= tower.seq_emb[k].vocab) {
          throw IndexError("sequence id out of range: " + std::to_string(id));
        }
        ++count;
        const double* src = weights.row_ptr(id);
        for (int d = 0; d < config_.embed_dim; ++d) ctx.e.at(i, offset + d) += src[d];
      }
      if (count > 0) {
        inv_counts[i] = 1.0 / count;
        for (int d = 0; d < config_.embed_dim; ++d) ctx.e.at(i, offset + d) *= inv_counts[i];
      }
    }
    offset += config_.embed_dim;
  }

  for (size_t k = 0; k < tower.cate_emb.size(); ++k) {
    const std::vector<uint8_t>& drop = cate_drop ? (*cate_drop)[k] : no_drop;
    Matrix block = embedding_apply(tower.cate_emb[k], feats.cate[k], drop);
    for (int i = 0; i < n; ++i) {
      for (int d = 0; d < block.cols; ++d) ctx.e.at(i, offset + d) = block.at(i, d);
    }
    offset += config_.embed_dim;
  }

  ctx.mu = mlp_apply(ctx.e, tower.encoder, &ctx.enc_ctx);
  return ctx;
}

void TwinTowerModel::encode_backward(const EncodeCtx& ctx, Side side, const Matrix& d_mu) {
  encode_backward_with_input_grad(ctx, side, d_mu, nullptr);
}

void TwinTowerModel::encode_backward_with_input_grad(const EncodeCtx& ctx, Side side,
                                                     const Matrix& d_mu,
                                                     const Matrix* d_e_direct) {
  Tower& tower = this->tower(side);
  Matrix d_e = mlp_backward(tower.encoder, ctx.enc_ctx, d_mu);
  if (d_e_direct) add_inplace(d_e, *d_e_direct);

  const SideBatch& feats = *ctx.feats;
  const int n = d_e.rows;
  int offset = 0;
  const std::vector<uint8_t> no_drop;

  for (size_t k = 0; k < tower.stat_emb.size(); ++k) {
    Matrix block(n, config_.embed_dim);
    for (int i = 0; i < n; ++i) {
      for (int d = 0; d < config_.embed_dim; ++d) block.at(i, d) = d_e.at(i, offset + d);
    }
    embedding_backward(tower.stat_emb[k], feats.stat[k], no_drop, block);
    offset += config_.embed_dim;
  }

  const auto seq_idx = schema_.seq_on(side);
  for (size_t k = 0; k < tower.seq_emb.size(); ++k) {
    const int max_len = schema_.seq[seq_idx[k]].max_len;
    const auto& ids = feats.seq[k];
    Matrix& grad = tower.seq_emb[k].weights->grad;
    for (int i = 0; i < n; ++i) {
      const double inv = ctx.seq_inv_counts[k][i];
      if (inv == 0.0) continue;
      for (int j = 0; j < max_len; ++j) {
        const int id = ids[static_cast<size_t>(i) * max_len + j];
        if (id == 0) continue;
        double* dst = grad.row_ptr(id);
        for (int d = 0; d < config_.embed_dim; ++d) dst[d] += inv * d_e.at(i, offset + d);
      }
    }
    offset += config_.embed_dim;
  }

  for (size_t k = 0; k < tower.cate_emb.size(); ++k) {
    const std::vector<uint8_t>& drop = ctx.cate_drop ? (*ctx.cate_drop)[k] : no_drop;
    Matrix block(n, config_.embed_dim);
    for (int i = 0; i < n; ++i) {
      for (int d = 0; d < config_.embed_dim; ++d) block.at(i, d) = d_e.at(i, offset + d);
    }
    embedding_backward(tower.cate_emb[k], feats.cate[k], drop, block);
    offset += config_.embed_dim;
  }
}

Matrix TwinTowerModel::decode(const Matrix& z, Side side, DecodeCtx* ctx) const {
  if (z.cols != config_.d_z) throw DimensionError("decode: latent width");
  return mlp_apply(z, tower(side).decoder, ctx ? &ctx->dec_ctx : nullptr);
}

Matrix TwinTowerModel::decode_backward(Side side, const DecodeCtx& ctx, const Matrix& d_xhat) {
  return mlp_backward(tower(side).decoder, ctx.dec_ctx, d_xhat);
}

std::pair<Matrix, Matrix> TwinTowerModel::sample_latent(const Matrix& mu, Rng& rng) {
  Matrix eps(mu.rows, mu.cols);
  for (double& v : eps.data) v = rng.normal();
  Matrix z = mu;
  add_inplace(z, eps);
  return {std::move(z), std::move(eps)};
}

void TwinTowerModel::predict(const Matrix& mu_u, const Matrix& mu_i, Matrix& probs,
                             Matrix& logits) const {
  if (mu_u.rows != mu_i.rows) throw DimensionError("predict: batch size mismatch");
  const int n = mu_u.rows;
  logits = Matrix(n, schema_.n_tasks);
  probs = Matrix(n, schema_.n_tasks);
  for (int i = 0; i < n; ++i) {
    const double s = dot_rows(mu_u, i, mu_i, i);
    for (int t = 0; t < schema_.n_tasks; ++t) {
      const double logit = s + task_bias_->value.at(0, t);
      logits.at(i, t) = logit;
      probs.at(i, t) = 1.0 / (1.0 + std::exp(-logit));
    }
  }
  ensure_finite(probs, "predictions");
}

void TwinTowerModel::predict_backward(const Matrix& mu_u, const Matrix& mu_i,
                                      const Matrix& d_logits, Matrix& d_mu_u, Matrix& d_mu_i) {
  const int n = mu_u.rows;
  if (d_mu_u.rows != n) d_mu_u = Matrix(n, mu_u.cols);
  if (d_mu_i.rows != n) d_mu_i = Matrix(n, mu_i.cols);
  for (int i = 0; i < n; ++i) {
    double dsum = 0.0;
    for (int t = 0; t < schema_.n_tasks; ++t) {
      const double d = d_logits.at(i, t);
      dsum += d;
      task_bias_->grad.at(0, t) += d;
    }
    for (int d = 0; d < mu_u.cols; ++d) {
      d_mu_u.at(i, d) += dsum * mu_i.at(i, d);
      d_mu_i.at(i, d) += dsum * mu_u.at(i, d);
    }
  }
}

}  // namespace tdslab
