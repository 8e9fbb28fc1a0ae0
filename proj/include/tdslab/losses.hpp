#pragma once

#include <vector>

#include "tdslab/matrix.hpp"

namespace tdslab {

struct LossWeights {
  double alpha = 1.0;      // self-supervised weight
  double tau = 0.1;        // InfoNCE temperature
  bool listwise = false;   // add ListNet term to the supervised loss

  void validate() const;
};

// Mean binary cross-entropy over batch and tasks. Probabilities are clamped
// to [1e-7, 1-1e-7] inside the log. d_logits (optional) receives the gradient
// w.r.t. the pre-sigmoid logits.
double bce_loss(const Matrix& probs, const Matrix& labels, Matrix* d_logits = nullptr);

// ListNet top-1 cross entropy: CE(softmax(labels), softmax(scores)) averaged
// over sessions with >= 2 items and >= 1 positive, and over tasks.
// Returns 0 when no session qualifies.
double listnet_loss(const Matrix& logits, const Matrix& labels,
                    const std::vector<int>& group_ids, Matrix* d_logits = nullptr);

// MSE over all entries; the target is a constant (no gradient flows into it).
// The loss and d_pred are scaled by `weight`.
double mse_loss(const Matrix& pred, const Matrix& target, Matrix* d_pred = nullptr,
                double weight = 1.0);

// Prior term for one side: pulls each view's latent toward the per-sample
// mean latent across views. The mean is gradient-detached. Loss is the mean
// over views, batch and coordinates of (z_j - z_bar)^2.
double prior_loss(const std::vector<Matrix>& z_views, std::vector<Matrix>* d_views = nullptr);

// InfoNCE for one side: anchor = base-sample latent, positive = the same
// sample's view latent, negatives = other samples' latents of that view.
// Cosine similarity / tau, softmax cross entropy, averaged over views and
// batch. Requires batch >= 2.
double infonce_loss(const Matrix& anchor, const std::vector<Matrix>& views, double tau,
                    Matrix* d_anchor = nullptr, std::vector<Matrix>* d_views = nullptr);

// L = pred (+ listnet when enabled) + alpha * (recon + prior)
double total_loss(double pred, double listnet, double recon, double prior,
                  const LossWeights& weights);

// Differential entropy of N(mu, I) in d dimensions: constant in parameters,
// so adding it to any objective must not change a single gradient.
double gaussian_unit_entropy(int dim);

}  // namespace tdslab
