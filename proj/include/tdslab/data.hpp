#pragma once

#include <map>
#include <string>
#include <vector>

#include "tdslab/matrix.hpp"
#include "tdslab/rng.hpp"
#include "tdslab/schema.hpp"

namespace tdslab {

// One interaction in raw (pre-bucketization) form. Statistical values are
// stored raw and bucketized at batch time against the fixed schema ranges.
struct Record {
  int user_id = 0;  // 1-based
  int item_id = 0;  // 1-based
  std::vector<int> labels;                // per task, 0/1
  std::vector<double> stat_values;        // schema.stat order
  std::vector<std::vector<int>> seq_ids;  // schema.seq order, each <= max_len, ids 1-based
  std::vector<int> cate_ids;              // schema.cate order
};

struct SpanDataset {
  int span_id = 0;
  std::vector<Record> records;
};

struct Manifest {
  FeatureSchema schema;
  uint64_t seed = 0;
  int n_spans = 0;
  std::vector<std::string> span_files;  // relative to dir
  std::map<std::string, std::string> config_echo;
  std::string dir;

  std::string span_path(int t) const;
};

void write_manifest(const Manifest& m, const std::string& path);
Manifest read_manifest(const std::string& path);

void write_span(const SpanDataset& span, const FeatureSchema& schema, const std::string& path);
SpanDataset read_span(const std::string& path, const FeatureSchema& schema);

// Indexed feature arrays for one tower.
struct SideBatch {
  std::vector<std::vector<int>> stat;  // per feature: bucket index per sample
  std::vector<std::vector<int>> seq;   // per feature: batch*max_len ids, 0-padded
  std::vector<std::vector<int>> cate;  // per feature: id per sample
};

struct SampleBatch {
  int span_id = 0;
  std::vector<int> group_ids;     // session id (user id within the span)
  std::vector<int> source_rows;   // record index in the span, for visit accounting
  Matrix labels;                  // batch x n_tasks
  SideBatch user;
  SideBatch item;

  int size() const { return static_cast<int>(group_ids.size()); }
};

// Seeded single-pass batching. In listwise mode the shuffle permutes whole
// sessions and no session straddles a batch boundary.
std::vector<SampleBatch> make_batches(const SpanDataset& span, const FeatureSchema& schema,
                                      int batch_size, uint64_t shuffle_seed, bool listwise);

SampleBatch records_to_batch(const SpanDataset& span, const FeatureSchema& schema,
                             const std::vector<int>& rows);

}  // namespace tdslab
