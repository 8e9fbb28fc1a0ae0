#pragma once

#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "tdslab/matrix.hpp"
#include "tdslab/rng.hpp"

namespace tdslab {

struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;

  Parameter(std::string n, int rows, int cols)
      : name(std::move(n)), value(rows, cols), grad(rows, cols) {}

  void zero_grad() { grad.fill(0.0); }
};

// Owns all trainable parameters in registration order. Registration order is
// the canonical order for optimizer state, checkpoints and gradient checks.
class ParamStore {
 public:
  Parameter* create(const std::string& name, int rows, int cols);
  Parameter* find(const std::string& name);
  const std::vector<std::unique_ptr<Parameter>>& all() const { return params_; }
  void zero_grads();
  size_t coord_count() const;

 private:
  std::vector<std::unique_ptr<Parameter>> params_;
  std::unordered_map<std::string, Parameter*> by_name_;
};

struct AdamState {
  Matrix m;
  Matrix v;
  long step = 0;
};

// Standard Adam with bias correction, one state per parameter, applied
// in registration order.
class Adam {
 public:
  Adam(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void step(ParamStore& params);
  void step_param(Parameter& p, AdamState& s) const;

  AdamState& state_for(const Parameter& p);
  double lr() const { return lr_; }

  std::unordered_map<std::string, AdamState>& states() { return states_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  std::unordered_map<std::string, AdamState> states_;
};

enum class Activation { identity, relu, sigmoid };

struct DenseLayer {
  Parameter* W = nullptr;  // in x out
  Parameter* b = nullptr;  // 1 x out
  Activation act = Activation::identity;
};

// Forward/backward caches for one dense application.
struct DenseCtx {
  Matrix input;
  Matrix output;  // post-activation
};

Matrix dense_apply(const Matrix& input, const DenseLayer& layer, DenseCtx* ctx = nullptr);
// Accumulates into layer grads, returns gradient w.r.t. input.
Matrix dense_backward(const DenseLayer& layer, const DenseCtx& ctx, const Matrix& dout);

struct EmbeddingTable {
  Parameter* weights = nullptr;  // vocab x dim; row 0 is the reserved padding row
  int vocab = 0;
  int dim = 0;
};

// Row i of the result is weights[indices[i]], or zero when the index is 0 or
// drop_mask[i] is set. drop_mask may be empty (no dropout).
Matrix embedding_apply(const EmbeddingTable& table, const std::vector<int>& indices,
                       const std::vector<uint8_t>& drop_mask);
// Scatters dout rows into weights.grad, skipping padded and dropped rows.
void embedding_backward(const EmbeddingTable& table, const std::vector<int>& indices,
                        const std::vector<uint8_t>& drop_mask, const Matrix& dout);

// MLP: a stack of dense layers. Hidden layers use relu, output identity.
struct Mlp {
  std::vector<DenseLayer> layers;

  int input_dim() const { return layers.front().W->value.rows; }
  int output_dim() const { return layers.back().W->value.cols; }
};

Mlp make_mlp(ParamStore& store, const std::string& prefix, int input_dim,
             const std::vector<int>& hidden, int output_dim, Rng init_rng);

struct MlpCtx {
  std::vector<DenseCtx> layer_ctx;
};

Matrix mlp_apply(const Matrix& input, const Mlp& mlp, MlpCtx* ctx = nullptr);
Matrix mlp_backward(const Mlp& mlp, const MlpCtx& ctx, const Matrix& dout);

void init_matrix_normal(Matrix& m, double stddev, Rng& rng);

}  // namespace tdslab
