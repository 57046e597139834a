#include "tailspec/io.hpp"

#include "tailspec/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string_view>
#include <system_error>
#include <unistd.h>

namespace tailspec {

namespace {

std::string trim(std::string_view s) {
  const auto* b = s.begin();
  const auto* e = s.end();
  while (b != e && std::isspace(static_cast<unsigned char>(*b))) {
    ++b;
  }
  while (e != b && std::isspace(static_cast<unsigned char>(*(e - 1)))) {
    --e;
  }
  return {b, e};
}

// Splits one CSV record. Double-quoted fields may contain commas and "".
std::vector<std::string> split_record(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(trim(cur));
  return fields;
}

bool is_missing(const std::string& field) {
  if (field.empty()) {
    return true;
  }
  std::string lower(field);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return lower == "na" || lower == "nan" || lower == "null";
}

std::optional<double> parse_double(const std::string& field) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (first != last && *first == '+') {
    ++first;
  }
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    return std::nullopt;
  }
  return v;
}

} // namespace

IngestResult ingest_csv(std::istream& in,
                        const std::string& col_x,
                        const std::string& col_y,
                        NaPolicy policy) {
  std::string line;
  if (!std::getline(in, line)) {
    throw InputError("CSV input is empty (header row required)");
  }
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
    line.erase(0, 3);
  }
  if (!line.empty() && line.back() == '\r') {
    line.pop_back();
  }
  const auto header = split_record(line);
  auto find = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw InputError("column '" + name + "' not found in header");
    }
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t ix = find(col_x);
  const std::size_t iy = find(col_y);

  IngestResult res;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (trim(line).empty()) {
      continue;
    }
    ++res.rows_read;
    const auto fields = split_record(line);
    const std::string fx = ix < fields.size() ? fields[ix] : std::string();
    const std::string fy = iy < fields.size() ? fields[iy] : std::string();
    if (is_missing(fx) || is_missing(fy)) {
      if (policy == NaPolicy::Strict) {
        throw InputError("missing value on line " + std::to_string(lineno));
      }
      ++res.rows_dropped;
      continue;
    }
    const auto vx = parse_double(fx);
    const auto vy = parse_double(fy);
    if (!vx || !vy) {
      throw InputError("non-numeric value on line " + std::to_string(lineno));
    }
    if (!std::isfinite(*vx) || !std::isfinite(*vy)) {
      throw InputError("non-finite value on line " + std::to_string(lineno));
    }
    res.sample.x.push_back(*vx);
    res.sample.y.push_back(*vy);
  }
  if (res.sample.size() == 0) {
    throw InputError("no usable rows");
  }
  return res;
}

IngestResult ingest_csv(const std::filesystem::path& path,
                        const std::string& col_x,
                        const std::string& col_y,
                        NaPolicy policy) {
  std::ifstream in(path);
  if (!in) {
    throw InputError("cannot open " + path.string());
  }
  return ingest_csv(in, col_x, col_y, policy);
}

std::string format_number(double v) {
  if (std::isnan(v)) {
    return "nan";
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_sample_csv(std::ostream& os,
                      const BivariateSample& sample,
                      const std::string& col_x,
                      const std::string& col_y) {
  os << col_x << ',' << col_y << '\n';
  for (std::size_t i = 0; i < sample.size(); ++i) {
    os << format_number(sample.x[i]) << ',' << format_number(sample.y[i]) << '\n';
  }
}

void CurveTable::add_column(std::string label, std::vector<double> values) {
  if (has_column(label)) {
    throw InputError("duplicate column " + label);
  }
  columns_.emplace_back(std::move(label), std::move(values));
}

bool CurveTable::has_column(const std::string& label) const {
  return std::any_of(columns_.begin(), columns_.end(),
                     [&](const auto& c) { return c.first == label; });
}

const std::vector<double>& CurveTable::column(const std::string& label) const {
  for (const auto& c : columns_) {
    if (c.first == label) {
      return c.second;
    }
  }
  throw InputError("no column " + label + " in table " + name_);
}

std::size_t CurveTable::rows() const {
  return columns_.empty() ? 0 : columns_.front().second.size();
}

void CurveTable::validate() const {
  if (columns_.empty()) {
    throw InputError("curve table " + name_ + " has no columns");
  }
  const std::size_t n = rows();
  for (const auto& [label, values] : columns_) {
    if (values.size() != n) {
      throw InputError("column " + label + " has " + std::to_string(values.size()) +
                       " rows, expected " + std::to_string(n));
    }
  }
  const auto& grid = columns_.front().second;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) {
      throw InputError("grid column of " + name_ + " is not strictly increasing");
    }
  }
}

void CurveTable::write_csv(std::ostream& os) const {
  validate();
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    os << (c ? "," : "") << columns_[c].first;
  }
  os << '\n';
  for (std::size_t r = 0; r < rows(); ++r) {
    for (std::size_t c = 0; c < columns_.size(); ++c) {
      os << (c ? "," : "") << format_number(columns_[c].second[r]);
    }
    os << '\n';
  }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw InputError("cannot write " + tmp.string());
    }
    out << content;
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw InputError("write failed for " + path.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw InputError("cannot rename into " + path.string());
  }
}

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed config: ") + e.what());
  }
  if (!j.is_object()) {
    throw InputError("malformed config: top level must be an object");
  }

  static const std::vector<std::string> known{
      "replications", "sample_size", "alpha",    "seed",     "margin_mode",
      "estimators",   "ise_cells",   "threshold_levels"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw InputError("malformed config: unknown key '" + key + "'");
    }
  }

  ExperimentConfig cfg;
  try {
    if (j.contains("replications")) {
      cfg.replications = j.at("replications").get<int>();
    }
    if (j.contains("sample_size")) {
      const auto n = j.at("sample_size").get<long long>();
      if (n < 2) {
        throw InputError("sample_size must be at least 2");
      }
      cfg.sample_size = static_cast<std::size_t>(n);
    }
    if (j.contains("alpha")) {
      cfg.alpha = j.at("alpha").get<double>();
    }
    if (j.contains("seed")) {
      cfg.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("ise_cells")) {
      cfg.ise_cells = j.at("ise_cells").get<int>();
    }
    if (j.contains("margin_mode")) {
      const auto mode = j.at("margin_mode").get<std::string>();
      if (mode == "rank") {
        cfg.margin_mode = MarginMode::Rank;
      } else if (mode == "known") {
        cfg.margin_mode = MarginMode::Known;
      } else {
        throw InputError("margin_mode must be 'rank' or 'known'");
      }
    }
    if (j.contains("estimators")) {
      cfg.estimators.clear();
      for (const auto& name : j.at("estimators")) {
        const auto kind = parse_estimator(name.get<std::string>());
        if (!kind) {
          throw InputError("unknown estimator '" + name.get<std::string>() + "'");
        }
        cfg.estimators.push_back(*kind);
      }
    }
    const auto& levels = j.contains("threshold_levels") ? j.at("threshold_levels")
                                                        : json();
    if (levels.is_array()) {
      cfg.threshold_levels = levels.get<std::vector<double>>();
    } else if (levels.is_object()) {
      cfg.threshold_levels = level_range(levels.at("from").get<double>(),
                                         levels.at("to").get<double>(),
                                         levels.at("step").get<double>());
    } else {
      throw InputError("threshold_levels must be an array or {from,to,step}");
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

std::string experiment_config_to_json(const ExperimentConfig& cfg) {
  nlohmann::ordered_json j;
  j["replications"] = cfg.replications;
  j["sample_size"] = cfg.sample_size;
  j["alpha"] = cfg.alpha;
  j["seed"] = cfg.seed;
  j["margin_mode"] = std::string(to_string(cfg.margin_mode));
  std::vector<std::string> names;
  for (auto e : cfg.estimators) {
    names.emplace_back(to_string(e));
  }
  j["estimators"] = names;
  j["ise_cells"] = cfg.ise_cells;
  j["threshold_levels"] = cfg.threshold_levels;
  return j.dump(2) + "\n";
}

} // namespace tailspec
