#pragma once

#include <map>
#include <string>

#include "tdslab/nn.hpp"

namespace tdslab {

// Checkpoint: header (magic, version, rng state), string metadata section,
// then length-prefixed named blobs (name, rows, cols, raw little-endian f64).
// Round trips are bit-exact; Adam moments are stored as "<param>.adam_m" /
// "<param>.adam_v" blobs and the step counter in metadata.
struct Checkpoint {
  uint64_t rng_state = 0;
  std::map<std::string, std::string> meta;
  std::vector<std::pair<std::string, Matrix>> blobs;

  void add_blob(const std::string& name, const Matrix& m) { blobs.emplace_back(name, m); }
  const Matrix* blob(const std::string& name) const;
  std::string meta_or(const std::string& key, const std::string& fallback) const;
};

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

Checkpoint snapshot_state(const ParamStore& params, const Adam& adam, uint64_t rng_state);
// Restores values and optimizer moments into existing params (shapes must match).
void restore_state(const Checkpoint& ckpt, ParamStore& params, Adam& adam);

}  // namespace tdslab
