#pragma once

#include <vector>

#include "tdslab/data.hpp"
#include "tdslab/rng.hpp"

namespace tdslab {

struct AugmentConfig {
  int r = 2;            // bucket perturbation magnitude, epsilon ~ U{-r..r}
  double p_seq = 0.2;   // per-position sequence masking probability
  double p_cate = 0.2;  // categorical embedding dropout rate
  double p = 0.2;       // fraction of feature columns eligible per view
  int views = 4;        // J

  void validate() const;
};

// One augmented view: perturbed feature arrays plus the embedding-dropout
// flags consumed by the encoder. Labels/groups stay on the base batch.
struct AugmentedView {
  SideBatch user;
  SideBatch item;
  std::vector<std::vector<uint8_t>> user_cate_drop;  // per cate feature: flag per sample
  std::vector<std::vector<uint8_t>> item_cate_drop;
};

struct AugmentedViews {
  std::vector<AugmentedView> views;
};

// B' = clamp(B + eps, 1, b_max), eps ~ U{-r..r}. Index 0 (absent) is never
// perturbed by callers.
int perturb_bucket(int bucket, int r, int b_max, Rng& rng);

// Independently zeroes non-padding positions with probability p_seq.
void mask_sequence(std::vector<int>& ids, double p_seq, Rng& rng);

std::vector<uint8_t> categorical_drop_mask(size_t n_flags, double p_cate, Rng& rng);

// Marks exactly ceil(p * n_columns) columns eligible, uniformly at random.
std::vector<uint8_t> select_perturbed_features(int n_columns, double p, Rng& rng);

// J independent views; everything derives from forks of `rng`, so identical
// (seed, span, batch, view) keys rebuild identical views.
AugmentedViews make_views(const SampleBatch& base, const FeatureSchema& schema,
                          const AugmentConfig& config, const Rng& rng);

}  // namespace tdslab
