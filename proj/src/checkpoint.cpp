#include "tdslab/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "tdslab/error.hpp"

namespace tdslab {

namespace {

constexpr uint32_t kMagic = 0x54445343;  // "TDSC"
constexpr uint32_t kVersion = 1;

void write_u32(std::ostream& os, uint32_t v) { os.write(reinterpret_cast<const char*>(&v), 4); }
void write_u64(std::ostream& os, uint64_t v) { os.write(reinterpret_cast<const char*>(&v), 8); }

void write_str(std::ostream& os, const std::string& s) {
  write_u32(os, static_cast<uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

uint32_t read_u32(std::istream& is) {
  uint32_t v = 0;
  is.read(reinterpret_cast<char*>(&v), 4);
  if (!is) throw IoError("checkpoint truncated");
  return v;
}

uint64_t read_u64(std::istream& is) {
  uint64_t v = 0;
  is.read(reinterpret_cast<char*>(&v), 8);
  if (!is) throw IoError("checkpoint truncated");
  return v;
}

std::string read_str(std::istream& is) {
  uint32_t len = read_u32(is);
  std::string s(len, '\0');
  is.read(s.data(), len);
  if (!is) throw IoError("checkpoint truncated in string");
  return s;
}

}  // namespace

const Matrix* Checkpoint::blob(const std::string& name) const {
  for (const auto& [n, m] : blobs) {
    if (n == name) return &m;
  }
  return nullptr;
}

std::string Checkpoint::meta_or(const std::string& key, const std::string& fallback) const {
  auto it = meta.find(key);
  return it == meta.end() ? fallback : it->second;
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open " + path + " for writing");
  write_u32(os, kMagic);
  write_u32(os, kVersion);
  write_u64(os, ckpt.rng_state);
  write_u32(os, static_cast<uint32_t>(ckpt.meta.size()));
  for (const auto& [k, v] : ckpt.meta) {
    write_str(os, k);
    write_str(os, v);
  }
  write_u32(os, static_cast<uint32_t>(ckpt.blobs.size()));
  for (const auto& [name, m] : ckpt.blobs) {
    write_str(os, name);
    write_u32(os, static_cast<uint32_t>(m.rows));
    write_u32(os, static_cast<uint32_t>(m.cols));
    os.write(reinterpret_cast<const char*>(m.data.data()),
             static_cast<std::streamsize>(m.data.size() * sizeof(double)));
  }
  if (!os) throw IoError("write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path);
  if (read_u32(is) != kMagic) throw FormatError("not a checkpoint file: " + path);
  const uint32_t version = read_u32(is);
  if (version != kVersion) {
    throw FormatError("checkpoint version " + std::to_string(version) + " unsupported (want " +
                      std::to_string(kVersion) + ")");
  }
  Checkpoint ckpt;
  ckpt.rng_state = read_u64(is);
  const uint32_t n_meta = read_u32(is);
  for (uint32_t i = 0; i < n_meta; ++i) {
    std::string k = read_str(is);
    ckpt.meta[k] = read_str(is);
  }
  const uint32_t n_blobs = read_u32(is);
  for (uint32_t i = 0; i < n_blobs; ++i) {
    std::string name = read_str(is);
    const int rows = static_cast<int>(read_u32(is));
    const int cols = static_cast<int>(read_u32(is));
    Matrix m(rows, cols);
    is.read(reinterpret_cast<char*>(m.data.data()),
            static_cast<std::streamsize>(m.data.size() * sizeof(double)));
    if (!is) throw IoError("checkpoint truncated in blob " + name);
    ckpt.blobs.emplace_back(std::move(name), std::move(m));
  }
  return ckpt;
}

Checkpoint snapshot_state(const ParamStore& params, const Adam& adam, uint64_t rng_state) {
  Checkpoint ckpt;
  ckpt.rng_state = rng_state;
  long adam_step = 0;
  auto& states = const_cast<Adam&>(adam).states();
  for (const auto& p : params.all()) {
    ckpt.add_blob(p->name, p->value);
    auto it = states.find(p->name);
    if (it != states.end()) {
      ckpt.add_blob(p->name + ".adam_m", it->second.m);
      ckpt.add_blob(p->name + ".adam_v", it->second.v);
      adam_step = it->second.step;
    }
  }
  ckpt.meta["adam_step"] = std::to_string(adam_step);
  return ckpt;
}

void restore_state(const Checkpoint& ckpt, ParamStore& params, Adam& adam) {
  const long step = std::stol(ckpt.meta_or("adam_step", "0"));
  for (const auto& p : params.all()) {
    const Matrix* value = ckpt.blob(p->name);
    if (!value) throw FormatError("checkpoint missing parameter " + p->name);
    if (!value->same_shape(p->value)) {
      throw FormatError("checkpoint shape mismatch for " + p->name);
    }
    p->value = *value;
    AdamState& s = adam.state_for(*p);
    if (const Matrix* m = ckpt.blob(p->name + ".adam_m")) s.m = *m;
    if (const Matrix* v = ckpt.blob(p->name + ".adam_v")) s.v = *v;
    s.step = step;
  }
}

}  // namespace tdslab
