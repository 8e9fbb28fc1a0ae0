#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tdslab {

enum class Side { user, item };

std::string side_name(Side s);
Side side_from_name(const std::string& s);

struct StatFeature {
  std::string name;
  Side side = Side::user;
  int n_buckets = 10;
  double min = -4.0;
  double max = 4.0;
};

struct SeqFeature {
  std::string name;
  Side side = Side::user;
  int vocab = 0;    // ids run 1..vocab; 0 is absent/padding
  int max_len = 1;
};

struct CateFeature {
  std::string name;
  Side side = Side::user;
  int vocab = 0;  // ids run 1..vocab; 0 is absent
};

// Declarative description of every feature column. Bucket ranges are fixed
// here at generation time and never re-fit, so measured drift is real drift.
struct FeatureSchema {
  std::vector<StatFeature> stat;
  std::vector<SeqFeature> seq;
  std::vector<CateFeature> cate;
  int n_tasks = 1;

  void validate() const;
  uint64_t hash() const;

  int total_columns() const {
    return static_cast<int>(stat.size() + seq.size() + cate.size());
  }
  std::vector<size_t> stat_on(Side s) const;
  std::vector<size_t> seq_on(Side s) const;
  std::vector<size_t> cate_on(Side s) const;

  // Stable text form used in manifests (one "schema.*" line per feature).
  std::vector<std::string> to_lines() const;
  static FeatureSchema from_lines(const std::vector<std::string>& lines);
};

// Equal-width bins over [min, max]; clamps to end bins; NaN maps to the
// reserved absent index 0. Valid buckets are 1..n_buckets.
int bucketize(double value, const StatFeature& feature);

}  // namespace tdslab
