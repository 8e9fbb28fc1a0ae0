#include "tdslab/nn.hpp"

#include <cmath>

#include "tdslab/error.hpp"

namespace tdslab {

Parameter* ParamStore::create(const std::string& name, int rows, int cols) {
  if (by_name_.count(name)) throw ConfigError("duplicate parameter name: " + name);
  params_.push_back(std::make_unique<Parameter>(name, rows, cols));
  Parameter* p = params_.back().get();
  by_name_[name] = p;
  return p;
}

Parameter* ParamStore::find(const std::string& name) {
  auto it = by_name_.find(name);
  return it == by_name_.end() ? nullptr : it->second;
}

void ParamStore::zero_grads() {
  for (auto& p : params_) p->zero_grad();
}

size_t ParamStore::coord_count() const {
  size_t n = 0;
  for (auto& p : params_) n += p->value.size();
  return n;
}

AdamState& Adam::state_for(const Parameter& p) {
  auto it = states_.find(p.name);
  if (it == states_.end()) {
    AdamState s;
    s.m = Matrix(p.value.rows, p.value.cols);
    s.v = Matrix(p.value.rows, p.value.cols);
    it = states_.emplace(p.name, std::move(s)).first;
  }
  return it->second;
}

void Adam::step_param(Parameter& p, AdamState& s) const {
  s.step += 1;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(s.step));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(s.step));
  for (size_t i = 0; i < p.value.data.size(); ++i) {
    const double g = p.grad.data[i];
    double& m = s.m.data[i];
    double& v = s.v.data[i];
    m = beta1_ * m + (1.0 - beta1_) * g;
    v = beta2_ * v + (1.0 - beta2_) * g * g;
    const double mhat = m / bc1;
    const double vhat = v / bc2;
    p.value.data[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
  }
}

void Adam::step(ParamStore& params) {
  for (auto& p : params.all()) step_param(*p, state_for(*p));
}

namespace {

double activate(Activation act, double x) {
  switch (act) {
    case Activation::identity: return x;
    case Activation::relu: return x > 0.0 ? x : 0.0;
    case Activation::sigmoid: return 1.0 / (1.0 + std::exp(-x));
  }
  return x;
}

// Derivative expressed through the post-activation value.
double activate_grad(Activation act, double y) {
  switch (act) {
    case Activation::identity: return 1.0;
    case Activation::relu: return y > 0.0 ? 1.0 : 0.0;
    case Activation::sigmoid: return y * (1.0 - y);
  }
  return 1.0;
}

}  // namespace

Matrix dense_apply(const Matrix& input, const DenseLayer& layer, DenseCtx* ctx) {
  const Matrix& W = layer.W->value;
  const Matrix& b = layer.b->value;
  if (input.cols != W.rows) {
    throw DimensionError("dense_apply: input width " + std::to_string(input.cols) +
                         " vs weight rows " + std::to_string(W.rows));
  }
  Matrix out;
  matmul(input, W, out);
  for (int i = 0; i < out.rows; ++i) {
    double* row = out.row_ptr(i);
    for (int j = 0; j < out.cols; ++j) row[j] = activate(layer.act, row[j] + b.at(0, j));
  }
  ensure_finite(out, "dense output (" + layer.W->name + ")");
  if (ctx) {
    ctx->input = input;
    ctx->output = out;
  }
  return out;
}

Matrix dense_backward(const DenseLayer& layer, const DenseCtx& ctx, const Matrix& dout) {
  if (!dout.same_shape(ctx.output)) throw DimensionError("dense_backward: dout shape");
  Matrix dpre(dout.rows, dout.cols);
  for (size_t i = 0; i < dout.data.size(); ++i) {
    dpre.data[i] = dout.data[i] * activate_grad(layer.act, ctx.output.data[i]);
  }
  Matrix dW;
  matmul_tn(ctx.input, dpre, dW);
  add_inplace(layer.W->grad, dW);
  for (int j = 0; j < dpre.cols; ++j) {
    double acc = 0.0;
    for (int i = 0; i < dpre.rows; ++i) acc += dpre.at(i, j);
    layer.b->grad.at(0, j) += acc;
  }
  Matrix dinput;
  matmul_nt(dpre, layer.W->value, dinput);
  return dinput;
}

Matrix embedding_apply(const EmbeddingTable& table, const std::vector<int>& indices,
                       const std::vector<uint8_t>& drop_mask) {
  if (!drop_mask.empty() && drop_mask.size() != indices.size()) {
    throw DimensionError("embedding_apply: drop mask length");
  }
  Matrix out(static_cast<int>(indices.size()), table.dim);
  for (size_t i = 0; i < indices.size(); ++i) {
    const int idx = indices[i];
    if (idx < 0 || idx >= table.vocab) {
      throw IndexError("embedding index " + std::to_string(idx) + " out of range [0, " +
                       std::to_string(table.vocab) + ") for " + table.weights->name);
    }
    if (idx == 0 || (!drop_mask.empty() && drop_mask[i])) continue;  // stays zero
    const double* src = table.weights->value.row_ptr(idx);
    double* dst = out.row_ptr(static_cast<int>(i));
    for (int d = 0; d < table.dim; ++d) dst[d] = src[d];
  }
  return out;
}

void embedding_backward(const EmbeddingTable& table, const std::vector<int>& indices,
                        const std::vector<uint8_t>& drop_mask, const Matrix& dout) {
  if (dout.rows != static_cast<int>(indices.size()) || dout.cols != table.dim) {
    throw DimensionError("embedding_backward: dout shape");
  }
  for (size_t i = 0; i < indices.size(); ++i) {
    const int idx = indices[i];
    if (idx == 0 || (!drop_mask.empty() && drop_mask[i])) continue;
    const double* src = dout.row_ptr(static_cast<int>(i));
    double* dst = table.weights->grad.row_ptr(idx);
    for (int d = 0; d < table.dim; ++d) dst[d] += src[d];
  }
}

void init_matrix_normal(Matrix& m, double stddev, Rng& rng) {
  for (double& v : m.data) v = stddev * rng.normal();
}

Mlp make_mlp(ParamStore& store, const std::string& prefix, int input_dim,
             const std::vector<int>& hidden, int output_dim, Rng init_rng) {
  Mlp mlp;
  std::vector<int> dims;
  dims.push_back(input_dim);
  for (int h : hidden) dims.push_back(h);
  dims.push_back(output_dim);
  for (size_t l = 0; l + 1 < dims.size(); ++l) {
    DenseLayer layer;
    layer.W = store.create(prefix + "." + std::to_string(l) + ".W", dims[l], dims[l + 1]);
    layer.b = store.create(prefix + "." + std::to_string(l) + ".b", 1, dims[l + 1]);
    const double stddev = std::sqrt(2.0 / (dims[l] + dims[l + 1]));
    Rng layer_rng = init_rng.fork(static_cast<uint64_t>(l));
    init_matrix_normal(layer.W->value, stddev, layer_rng);
    layer.act = (l + 2 < dims.size()) ? Activation::relu : Activation::identity;
    mlp.layers.push_back(layer);
  }
  return mlp;
}

Matrix mlp_apply(const Matrix& input, const Mlp& mlp, MlpCtx* ctx) {
  if (ctx) ctx->layer_ctx.assign(mlp.layers.size(), DenseCtx{});
  Matrix x = input;
  for (size_t l = 0; l < mlp.layers.size(); ++l) {
    x = dense_apply(x, mlp.layers[l], ctx ? &ctx->layer_ctx[l] : nullptr);
  }
  return x;
}

Matrix mlp_backward(const Mlp& mlp, const MlpCtx& ctx, const Matrix& dout) {
  Matrix d = dout;
  for (size_t l = mlp.layers.size(); l-- > 0;) {
    d = dense_backward(mlp.layers[l], ctx.layer_ctx[l], d);
  }
  return d;
}

}  // namespace tdslab
