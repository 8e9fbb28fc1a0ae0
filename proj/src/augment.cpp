#include "tdslab/augment.hpp"

#include <cmath>

#include "tdslab/error.hpp"

namespace tdslab {

namespace {

struct ColumnRef {
  Side side;
  enum class Kind { stat, seq, cate } kind;
  size_t index;  // position within the side's stat/seq/cate arrays
};

// Stable global column enumeration: user stat, user seq, user cate, then the
// same for the item side. The eligibility cap indexes into this list.
std::vector<ColumnRef> enumerate_columns(const FeatureSchema& schema) {
  std::vector<ColumnRef> cols;
  for (Side side : {Side::user, Side::item}) {
    for (size_t k = 0; k < schema.stat_on(side).size(); ++k) {
      cols.push_back({side, ColumnRef::Kind::stat, k});
    }
    for (size_t k = 0; k < schema.seq_on(side).size(); ++k) {
      cols.push_back({side, ColumnRef::Kind::seq, k});
    }
    for (size_t k = 0; k < schema.cate_on(side).size(); ++k) {
      cols.push_back({side, ColumnRef::Kind::cate, k});
    }
  }
  return cols;
}

}  // namespace

void AugmentConfig::validate() const {
  if (r < 0) throw ConfigError("augment: r must be >= 0");
  for (double v : {p_seq, p_cate, p}) {
    if (v < 0.0 || v > 1.0) throw ConfigError("augment: probabilities must lie in [0,1]");
  }
  if (views < 1) throw ConfigError("augment: views must be >= 1");
}

int perturb_bucket(int bucket, int r, int b_max, Rng& rng) {
  const int eps = static_cast<int>(rng.uniform_int(-r, r));
  int out = bucket + eps;
  if (out < 1) out = 1;
  if (out > b_max) out = b_max;
  return out;
}

void mask_sequence(std::vector<int>& ids, double p_seq, Rng& rng) {
  for (int& id : ids) {
    if (id == 0) continue;
    if (rng.bernoulli(p_seq)) id = 0;
  }
}

std::vector<uint8_t> categorical_drop_mask(size_t n_flags, double p_cate, Rng& rng) {
  std::vector<uint8_t> mask(n_flags, 0);
  for (auto& f : mask) f = rng.bernoulli(p_cate) ? 1 : 0;
  return mask;
}

std::vector<uint8_t> select_perturbed_features(int n_columns, double p, Rng& rng) {
  std::vector<uint8_t> eligible(n_columns, 0);
  const int k = static_cast<int>(std::ceil(p * n_columns - 1e-9));
  if (k <= 0) return eligible;
  std::vector<int> order(n_columns);
  for (int i = 0; i < n_columns; ++i) order[i] = i;
  for (int i = 0; i < k; ++i) {
    const int j = static_cast<int>(rng.uniform_int(i, n_columns - 1));
    std::swap(order[i], order[j]);
    eligible[order[i]] = 1;
  }
  return eligible;
}

AugmentedViews make_views(const SampleBatch& base, const FeatureSchema& schema,
                          const AugmentConfig& config, const Rng& rng) {
  config.validate();
  const auto columns = enumerate_columns(schema);
  const int n = base.size();

  AugmentedViews out;
  out.views.reserve(config.views);
  for (int j = 0; j < config.views; ++j) {
    Rng view_rng = rng.fork(static_cast<uint64_t>(j) + 1);
    AugmentedView view;
    view.user = base.user;
    view.item = base.item;
    view.user_cate_drop.assign(base.user.cate.size(), std::vector<uint8_t>(n, 0));
    view.item_cate_drop.assign(base.item.cate.size(), std::vector<uint8_t>(n, 0));

    Rng select_rng = view_rng.fork(0);
    const auto eligible =
        select_perturbed_features(static_cast<int>(columns.size()), config.p, select_rng);

    for (size_t c = 0; c < columns.size(); ++c) {
      if (!eligible[c]) continue;
      const ColumnRef& col = columns[c];
      SideBatch& side = (col.side == Side::user) ? view.user : view.item;
      auto& drop = (col.side == Side::user) ? view.user_cate_drop : view.item_cate_drop;
      Rng col_rng = view_rng.fork(c + 1);
      switch (col.kind) {
        case ColumnRef::Kind::stat: {
          const auto stat_idx = schema.stat_on(col.side)[col.index];
          const int b_max = schema.stat[stat_idx].n_buckets;
          for (int i = 0; i < n; ++i) {
            int& b = side.stat[col.index][i];
            if (b != 0) b = perturb_bucket(b, config.r, b_max, col_rng);
          }
          break;
        }
        case ColumnRef::Kind::seq:
          mask_sequence(side.seq[col.index], config.p_seq, col_rng);
          break;
        case ColumnRef::Kind::cate:
          drop[col.index] = categorical_drop_mask(static_cast<size_t>(n), config.p_cate, col_rng);
          break;
      }
    }
    out.views.push_back(std::move(view));
  }
  return out;
}

}  // namespace tdslab
