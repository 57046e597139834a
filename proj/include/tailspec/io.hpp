#pragma once

#include "tailspec/experiment.hpp"
#include "tailspec/margins.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace tailspec {

enum class NaPolicy { Drop, Strict };

struct IngestResult {
  BivariateSample sample;
  std::size_t rows_read = 0;
  std::size_t rows_dropped = 0;
};

/// Reads two named numeric columns from a comma-separated file with a header
/// row. Empty fields and NA, NaN, NULL (any case) count as missing.
IngestResult ingest_csv(const std::filesystem::path& path,
                        const std::string& col_x,
                        const std::string& col_y,
                        NaPolicy policy = NaPolicy::Drop);
IngestResult ingest_csv(std::istream& in,
                        const std::string& col_x,
                        const std::string& col_y,
                        NaPolicy policy = NaPolicy::Drop);

void write_sample_csv(std::ostream& os,
                      const BivariateSample& sample,
                      const std::string& col_x = "x",
                      const std::string& col_y = "y");

// Named columns of equal length; the first column is the grid.
class CurveTable {
public:
  explicit CurveTable(std::string name) : name_(std::move(name)) {}

  const std::string& name() const { return name_; }
  void add_column(std::string label, std::vector<double> values);
  bool has_column(const std::string& label) const;
  const std::vector<double>& column(const std::string& label) const;
  const std::vector<std::pair<std::string, std::vector<double>>>& columns() const {
    return columns_;
  }
  std::size_t rows() const;

  // Throws InputError if lengths differ or the grid is not strictly
  // increasing.
  void validate() const;
  void write_csv(std::ostream& os) const;

private:
  std::string name_;
  std::vector<std::pair<std::string, std::vector<double>>> columns_;
};

/// Shortest round-trippable representation ("%.17g"), "nan" for NaN.
std::string format_number(double v);

/// Writes `content` to `path` through a temporary file in the same directory
/// followed by a rename, so readers never see a partial file.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// Parses an experiment configuration from JSON text. Keys:
///   replications, sample_size, alpha, seed, margin_mode ("rank"|"known"),
///   estimators (names), ise_cells,
///   threshold_levels: array, or {"from": a, "to": b, "step": s}.
ExperimentConfig parse_experiment_config(const std::string& json_text);
std::string experiment_config_to_json(const ExperimentConfig& cfg);

} // namespace tailspec
