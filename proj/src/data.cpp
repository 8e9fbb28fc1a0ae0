#include "tdslab/data.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "tdslab/error.hpp"

namespace tdslab {

namespace {

std::string hex64(uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

uint64_t parse_hex64(const std::string& s) { return std::stoull(s, nullptr, 16); }

void append_padded(std::string& row, const std::string& tok, size_t width) {
  row += tok;
  if (tok.size() < width) row.append(width - tok.size(), ' ');
  row += ' ';
}

std::string fmt_f64(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string Manifest::span_path(int t) const {
  return dir.empty() ? span_files[t] : dir + "/" + span_files[t];
}

void write_manifest(const Manifest& m, const std::string& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw IoError("cannot open manifest " + path);
  os << "tds-manifest 1\n";
  os << "schema_hash " << hex64(m.schema.hash()) << "\n";
  os << "seed " << m.seed << "\n";
  os << "n_spans " << m.n_spans << "\n";
  for (const auto& line : m.schema.to_lines()) os << line << "\n";
  for (int t = 0; t < m.n_spans; ++t) os << "span " << t << " " << m.span_files[t] << "\n";
  for (const auto& [k, v] : m.config_echo) os << "config." << k << " " << v << "\n";
  if (!os) throw IoError("manifest write failed: " + path);
}

Manifest read_manifest(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open manifest " + path);
  std::string header;
  std::getline(is, header);
  if (header != "tds-manifest 1") throw FormatError("not a manifest: " + path);

  Manifest m;
  m.dir = std::filesystem::path(path).parent_path().string();
  std::vector<std::string> schema_lines;
  uint64_t recorded_hash = 0;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    if (key == "schema_hash") {
      std::string h;
      ss >> h;
      recorded_hash = parse_hex64(h);
    } else if (key == "seed") {
      ss >> m.seed;
    } else if (key == "n_spans") {
      ss >> m.n_spans;
    } else if (key.rfind("schema.", 0) == 0) {
      schema_lines.push_back(line);
    } else if (key == "span") {
      int t;
      std::string file;
      ss >> t >> file;
      if (static_cast<int>(m.span_files.size()) != t) {
        throw FormatError("manifest spans out of order at span " + std::to_string(t));
      }
      m.span_files.push_back(file);
    } else if (key.rfind("config.", 0) == 0) {
      std::string value = line.substr(line.find(' ') + 1);
      m.config_echo[key.substr(7)] = value;
    } else {
      throw FormatError("unknown manifest line: " + line);
    }
    if (ss.fail()) throw FormatError("malformed manifest line: " + line);
  }
  m.schema = FeatureSchema::from_lines(schema_lines);
  if (m.schema.hash() != recorded_hash) throw FormatError("manifest schema hash mismatch");
  if (static_cast<int>(m.span_files.size()) != m.n_spans) {
    throw FormatError("manifest lists " + std::to_string(m.span_files.size()) + " spans, header says " +
                      std::to_string(m.n_spans));
  }
  return m;
}

void write_span(const SpanDataset& span, const FeatureSchema& schema, const std::string& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw IoError("cannot open span file " + path);
  os << "tds-span 1\n";
  os << "span_id " << span.span_id << "\n";
  os << "schema_hash " << hex64(schema.hash()) << "\n";
  os << "records " << span.records.size() << "\n";
  std::string columns = "columns user item";
  for (int k = 0; k < schema.n_tasks; ++k) columns += " y" + std::to_string(k);
  for (const auto& f : schema.stat) columns += " " + f.name;
  for (const auto& f : schema.seq) columns += " " + f.name + "[" + std::to_string(f.max_len) + "]";
  for (const auto& f : schema.cate) columns += " " + f.name;
  os << columns << "\n";

  std::string row;
  for (const auto& r : span.records) {
    row.clear();
    append_padded(row, std::to_string(r.user_id), 7);
    append_padded(row, std::to_string(r.item_id), 7);
    for (int y : r.labels) append_padded(row, std::to_string(y), 1);
    for (double v : r.stat_values) append_padded(row, fmt_f64(v), 24);
    for (size_t f = 0; f < schema.seq.size(); ++f) {
      const auto& ids = r.seq_ids[f];
      append_padded(row, std::to_string(ids.size()), 3);
      for (int i = 0; i < schema.seq[f].max_len; ++i) {
        append_padded(row, std::to_string(i < static_cast<int>(ids.size()) ? ids[i] : 0), 7);
      }
    }
    for (int c : r.cate_ids) append_padded(row, std::to_string(c), 7);
    while (!row.empty() && row.back() == ' ') row.pop_back();
    os << row << "\n";
  }
  if (!os) throw IoError("span write failed: " + path);
}

SpanDataset read_span(const std::string& path, const FeatureSchema& schema) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open span file " + path);
  std::string header;
  std::getline(is, header);
  if (header != "tds-span 1") throw FormatError("not a span file: " + path);

  SpanDataset span;
  size_t n_records = 0;
  std::string key;
  is >> key >> span.span_id;
  if (!is || key != "span_id") throw FormatError("span header: expected span_id in " + path);
  std::string hash_hex;
  is >> key >> hash_hex;
  if (!is || key != "schema_hash") throw FormatError("span header: expected schema_hash in " + path);
  if (parse_hex64(hash_hex) != schema.hash()) {
    throw FormatError("span file schema hash mismatch: " + path);
  }
  is >> key >> n_records;
  if (!is || key != "records") throw FormatError("span header: expected records in " + path);
  std::string columns_line;
  std::getline(is, columns_line);  // rest of records line
  std::getline(is, columns_line);  // columns line, informational

  span.records.reserve(n_records);
  for (size_t i = 0; i < n_records; ++i) {
    Record r;
    r.labels.resize(schema.n_tasks);
    r.stat_values.resize(schema.stat.size());
    r.seq_ids.resize(schema.seq.size());
    r.cate_ids.resize(schema.cate.size());
    is >> r.user_id >> r.item_id;
    for (int k = 0; k < schema.n_tasks; ++k) is >> r.labels[k];
    for (size_t f = 0; f < schema.stat.size(); ++f) is >> r.stat_values[f];
    for (size_t f = 0; f < schema.seq.size(); ++f) {
      int len = 0;
      is >> len;
      if (len < 0 || len > schema.seq[f].max_len) {
        throw FormatError("span record " + std::to_string(i) + ": bad sequence length");
      }
      r.seq_ids[f].resize(len);
      int id = 0;
      for (int j = 0; j < schema.seq[f].max_len; ++j) {
        is >> id;
        if (j < len) r.seq_ids[f][j] = id;
      }
    }
    for (size_t f = 0; f < schema.cate.size(); ++f) is >> r.cate_ids[f];
    if (!is) throw IoError("span file truncated at record " + std::to_string(i) + ": " + path);
    span.records.push_back(std::move(r));
  }
  return span;
}

SampleBatch records_to_batch(const SpanDataset& span, const FeatureSchema& schema,
                             const std::vector<int>& rows) {
  SampleBatch batch;
  batch.span_id = span.span_id;
  const int n = static_cast<int>(rows.size());
  batch.labels = Matrix(n, schema.n_tasks);
  batch.source_rows = rows;
  batch.group_ids.resize(n);

  auto setup_side = [&](SideBatch& side, Side which) {
    for (size_t f : schema.stat_on(which)) {
      (void)f;
      side.stat.emplace_back(n, 0);
    }
    for (size_t f : schema.seq_on(which)) {
      side.seq.emplace_back(static_cast<size_t>(n) * schema.seq[f].max_len, 0);
    }
    for (size_t f : schema.cate_on(which)) {
      (void)f;
      side.cate.emplace_back(n, 0);
    }
  };
  setup_side(batch.user, Side::user);
  setup_side(batch.item, Side::item);

  const auto fill_side = [&](SideBatch& side, Side which) {
    const auto stat_idx = schema.stat_on(which);
    const auto seq_idx = schema.seq_on(which);
    const auto cate_idx = schema.cate_on(which);
    for (int i = 0; i < n; ++i) {
      const Record& r = span.records[rows[i]];
      for (size_t k = 0; k < stat_idx.size(); ++k) {
        side.stat[k][i] = bucketize(r.stat_values[stat_idx[k]], schema.stat[stat_idx[k]]);
      }
      for (size_t k = 0; k < seq_idx.size(); ++k) {
        const auto& ids = r.seq_ids[seq_idx[k]];
        const int max_len = schema.seq[seq_idx[k]].max_len;
        for (size_t j = 0; j < ids.size(); ++j) {
          side.seq[k][static_cast<size_t>(i) * max_len + j] = ids[j];
        }
      }
      for (size_t k = 0; k < cate_idx.size(); ++k) {
        side.cate[k][i] = r.cate_ids[cate_idx[k]];
      }
    }
  };
  fill_side(batch.user, Side::user);
  fill_side(batch.item, Side::item);

  for (int i = 0; i < n; ++i) {
    const Record& r = span.records[rows[i]];
    batch.group_ids[i] = r.user_id;
    for (int k = 0; k < schema.n_tasks; ++k) batch.labels.at(i, k) = r.labels[k];
  }
  return batch;
}

std::vector<SampleBatch> make_batches(const SpanDataset& span, const FeatureSchema& schema,
                                      int batch_size, uint64_t shuffle_seed, bool listwise) {
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  const int n = static_cast<int>(span.records.size());
  Rng rng(shuffle_seed);

  std::vector<std::vector<int>> groups_of_rows;
  if (listwise) {
    // Sessions = runs of records sharing a user id; keep each intact.
    std::map<int, std::vector<int>> by_session;
    for (int i = 0; i < n; ++i) by_session[span.records[i].user_id].push_back(i);
    groups_of_rows.reserve(by_session.size());
    for (auto& [uid, rows] : by_session) groups_of_rows.push_back(std::move(rows));
  } else {
    groups_of_rows.reserve(n);
    for (int i = 0; i < n; ++i) groups_of_rows.push_back({i});
  }

  // Fisher-Yates over groups.
  for (size_t i = groups_of_rows.size(); i > 1; --i) {
    const size_t j = static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(i) - 1));
    std::swap(groups_of_rows[i - 1], groups_of_rows[j]);
  }

  std::vector<SampleBatch> batches;
  std::vector<int> current;
  for (const auto& group : groups_of_rows) {
    if (!current.empty() &&
        static_cast<int>(current.size() + group.size()) > batch_size) {
      batches.push_back(records_to_batch(span, schema, current));
      current.clear();
    }
    current.insert(current.end(), group.begin(), group.end());
    if (static_cast<int>(current.size()) >= batch_size) {
      batches.push_back(records_to_batch(span, schema, current));
      current.clear();
    }
  }
  if (!current.empty()) batches.push_back(records_to_batch(span, schema, current));
  return batches;
}

}  // namespace tdslab
