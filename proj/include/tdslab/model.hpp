#pragma once

#include <vector>

#include "tdslab/data.hpp"
#include "tdslab/nn.hpp"
#include "tdslab/rng.hpp"
#include "tdslab/schema.hpp"

namespace tdslab {

struct TowerConfig {
  int embed_dim = 8;
  std::vector<int> enc_hidden = {32};
  int d_z = 16;
  std::vector<int> dec_hidden = {32};
};

// One side's lookup tables and encoder/decoder MLPs. The decoder output
// width equals the embedded input width (reconstruction target).
struct Tower {
  std::vector<EmbeddingTable> stat_emb;
  std::vector<EmbeddingTable> seq_emb;
  std::vector<EmbeddingTable> cate_emb;
  Mlp encoder;
  Mlp decoder;
  int input_width = 0;
};

struct EncodeCtx {
  Matrix e;   // batch x input_width, the embedded+pooled input (recon target)
  Matrix mu;  // batch x d_z
  MlpCtx enc_ctx;
  const SideBatch* feats = nullptr;
  const std::vector<std::vector<uint8_t>>* cate_drop = nullptr;
  std::vector<std::vector<double>> seq_inv_counts;  // per seq feature, per sample
};

struct DecodeCtx {
  MlpCtx dec_ctx;
};

// Twin-tower model: per-side encoders to latent means, per-side decoders,
// dot-product predictor with one bias per task. Prediction always consumes
// means, never sampled latents.
class TwinTowerModel {
 public:
  TwinTowerModel(const FeatureSchema& schema, const TowerConfig& config, uint64_t init_seed);

  EncodeCtx encode(const SideBatch& feats, Side side,
                   const std::vector<std::vector<uint8_t>>* cate_drop = nullptr) const;
  // Propagates d_mu through the encoder into embedding/encoder grads.
  void encode_backward(const EncodeCtx& ctx, Side side, const Matrix& d_mu);
  // Same, but with an extra gradient arriving directly at e (unused by the
  // standard losses; the reconstruction target is detached).
  void encode_backward_with_input_grad(const EncodeCtx& ctx, Side side, const Matrix& d_mu,
                                       const Matrix* d_e_direct);

  Matrix decode(const Matrix& z, Side side, DecodeCtx* ctx = nullptr) const;
  Matrix decode_backward(Side side, const DecodeCtx& ctx, const Matrix& d_xhat);

  // z = mu + eps, eps ~ N(0, I); eps is returned for reproducibility.
  static std::pair<Matrix, Matrix> sample_latent(const Matrix& mu, Rng& rng);

  // probs and logits per task: sigmoid(mu_u . mu_i + bias_t)
  void predict(const Matrix& mu_u, const Matrix& mu_i, Matrix& probs, Matrix& logits) const;
  void predict_backward(const Matrix& mu_u, const Matrix& mu_i, const Matrix& d_logits,
                        Matrix& d_mu_u, Matrix& d_mu_i);

  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }
  Tower& tower(Side s) { return s == Side::user ? user_ : item_; }
  const Tower& tower(Side s) const { return s == Side::user ? user_ : item_; }
  const FeatureSchema& schema() const { return schema_; }
  const TowerConfig& config() const { return config_; }
  int n_tasks() const { return schema_.n_tasks; }

 private:
  FeatureSchema schema_;
  TowerConfig config_;
  ParamStore params_;
  Tower user_;
  Tower item_;
  Parameter* task_bias_ = nullptr;  // 1 x n_tasks
};

}  // namespace tdslab
