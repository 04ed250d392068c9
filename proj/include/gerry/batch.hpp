#pragma once

// End-to-end batch run: parse -> group -> fit/impute -> metrics -> reports.
//
// Output directory layout:
//   election_table.csv   one row per election, display precision
//   election_table.json  same rows, full precision
//   extremes.csv         most positive / most negative delta_tilde
//   cycles.json          per-cycle summaries and the persistence rate
//   model.json           fitted imputation models keyed by partition
//   errors.json          row errors, group errors, fit errors, exclusions
//   sensitivity.json     only when a shift is requested
//   svg/<STATE>_<chamber>_<year>.svg  only when diagrams are requested
//
// Every file is written to a temporary name and renamed into place.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gerry/impute.hpp"

namespace gerry {

struct BatchOptions {
  std::filesystem::path input;
  std::optional<std::filesystem::path> cycles;
  std::filesystem::path out_dir;
  std::vector<double> taus{0.0, 0.4, 1.0, 2.0};
  ImputeStrategy strategy;
  std::uint64_t seed = 0;
  bool svg = false;
  std::optional<double> shift;
  double threshold = 0.47;
  std::size_t extremes_limit = 20;
};

struct BatchSummary {
  std::size_t records = 0;
  std::size_t row_errors = 0;
  std::size_t groups = 0;
  std::size_t rows = 0;
  std::size_t group_errors = 0;
  std::size_t exclusions = 0;
  std::size_t svgs = 0;

  // Records or groups existed but nothing could be computed.
  bool total_failure() const { return rows == 0 && (group_errors > 0 || (records == 0 && row_errors > 0)); }
};

// Throws Error (including SchemaMismatch) when the input cannot be read.
BatchSummary run_batch(const BatchOptions& options);

// Parses "model", "none", "uniform" or "uniform:W".
ImputeStrategy parse_strategy(const std::string& s);

void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace gerry
