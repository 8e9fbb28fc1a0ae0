#include "tdslab/schema.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "tdslab/error.hpp"

namespace tdslab {

namespace {

uint64_t fnv1a(uint64_t h, const void* data, size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

uint64_t fnv1a_str(uint64_t h, const std::string& s) { return fnv1a(h, s.data(), s.size()); }

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string side_name(Side s) { return s == Side::user ? "user" : "item"; }

Side side_from_name(const std::string& s) {
  if (s == "user") return Side::user;
  if (s == "item") return Side::item;
  throw FormatError("unknown feature side: " + s);
}

void FeatureSchema::validate() const {
  std::vector<std::string> names;
  for (const auto& f : stat) {
    if (f.n_buckets < 2) throw ConfigError("stat feature " + f.name + ": n_buckets must be >= 2");
    if (!(f.min < f.max)) throw ConfigError("stat feature " + f.name + ": min must be < max");
    names.push_back(f.name);
  }
  for (const auto& f : seq) {
    if (f.max_len < 1) throw ConfigError("seq feature " + f.name + ": max_len must be >= 1");
    if (f.vocab < 1) throw ConfigError("seq feature " + f.name + ": empty vocabulary");
    names.push_back(f.name);
  }
  for (const auto& f : cate) {
    if (f.vocab < 1) throw ConfigError("cate feature " + f.name + ": empty vocabulary");
    names.push_back(f.name);
  }
  for (size_t i = 0; i < names.size(); ++i) {
    for (size_t j = i + 1; j < names.size(); ++j) {
      if (names[i] == names[j]) throw ConfigError("duplicate feature name: " + names[i]);
    }
  }
  if (n_tasks < 1) throw ConfigError("n_tasks must be >= 1");
}

uint64_t FeatureSchema::hash() const {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& line : to_lines()) h = fnv1a_str(h, line);
  return h;
}

std::vector<size_t> FeatureSchema::stat_on(Side s) const {
  std::vector<size_t> idx;
  for (size_t i = 0; i < stat.size(); ++i) {
    if (stat[i].side == s) idx.push_back(i);
  }
  return idx;
}

std::vector<size_t> FeatureSchema::seq_on(Side s) const {
  std::vector<size_t> idx;
  for (size_t i = 0; i < seq.size(); ++i) {
    if (seq[i].side == s) idx.push_back(i);
  }
  return idx;
}

std::vector<size_t> FeatureSchema::cate_on(Side s) const {
  std::vector<size_t> idx;
  for (size_t i = 0; i < cate.size(); ++i) {
    if (cate[i].side == s) idx.push_back(i);
  }
  return idx;
}

std::vector<std::string> FeatureSchema::to_lines() const {
  std::vector<std::string> lines;
  lines.push_back("schema.n_tasks " + std::to_string(n_tasks));
  for (const auto& f : stat) {
    lines.push_back("schema.stat " + f.name + " " + side_name(f.side) + " " +
                    std::to_string(f.n_buckets) + " " + fmt_double(f.min) + " " +
                    fmt_double(f.max));
  }
  for (const auto& f : seq) {
    lines.push_back("schema.seq " + f.name + " " + side_name(f.side) + " " +
                    std::to_string(f.vocab) + " " + std::to_string(f.max_len));
  }
  for (const auto& f : cate) {
    lines.push_back("schema.cate " + f.name + " " + side_name(f.side) + " " +
                    std::to_string(f.vocab));
  }
  return lines;
}

FeatureSchema FeatureSchema::from_lines(const std::vector<std::string>& lines) {
  FeatureSchema schema;
  for (const auto& line : lines) {
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    if (tag == "schema.n_tasks") {
      ss >> schema.n_tasks;
    } else if (tag == "schema.stat") {
      StatFeature f;
      std::string side;
      ss >> f.name >> side >> f.n_buckets >> f.min >> f.max;
      f.side = side_from_name(side);
      schema.stat.push_back(f);
    } else if (tag == "schema.seq") {
      SeqFeature f;
      std::string side;
      ss >> f.name >> side >> f.vocab >> f.max_len;
      f.side = side_from_name(side);
      schema.seq.push_back(f);
    } else if (tag == "schema.cate") {
      CateFeature f;
      std::string side;
      ss >> f.name >> side >> f.vocab;
      f.side = side_from_name(side);
      schema.cate.push_back(f);
    } else {
      throw FormatError("unknown schema line: " + line);
    }
    if (ss.fail()) throw FormatError("malformed schema line: " + line);
  }
  schema.validate();
  return schema;
}

int bucketize(double value, const StatFeature& feature) {
  if (std::isnan(value)) return 0;
  const double width = (feature.max - feature.min) / feature.n_buckets;
  const int raw = 1 + static_cast<int>(std::floor((value - feature.min) / width));
  if (raw < 1) return 1;
  if (raw > feature.n_buckets) return feature.n_buckets;
  return raw;
}

}  // namespace tdslab
