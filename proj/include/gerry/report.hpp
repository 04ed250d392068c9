#pragma once

// Batch analysis: per-election metric rows, extreme-value rankings,
// per-cycle persistence summaries, and declination diagrams.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gerry/impute.hpp"
#include "gerry/ingest.hpp"
#include "gerry/metrics.hpp"

namespace gerry {

struct ElectionRow {
  ElectionKey key;
  std::size_t seats = 0;
  std::optional<double> delta_tilde;
  std::optional<double> declination;
  std::optional<double> delta_n;
  double efficiency_gap = 0.0;
  std::vector<std::pair<double, double>> tau_gaps;  // (tau, Gap_tau) in request order
  double mean_median = 0.0;
  double seat_share_p = 0.0;
  double vote_share_p = 0.0;
  std::size_t n_imputed = 0;
};

ElectionRow election_row(const ResolvedElection& e, std::span<const double> taus);

struct GroupError {
  ElectionKey key;
  std::string message;
};

struct ElectionTable {
  std::vector<ElectionRow> rows;
  std::vector<ResolvedElection> resolved;  // parallel to rows
  std::vector<GroupError> errors;
  std::vector<GroupError> exclusions;
};

using ModelMap = std::map<PartitionKey, ImputationModel>;

// One row per non-excluded group. A failing group is recorded in errors and
// the batch continues.
ElectionTable election_table(std::span<const ElectionGroup> groups, const ImputeStrategy& strategy,
                             const ModelMap& models, std::span<const double> taus,
                             std::uint64_t seed);

enum class Metric { delta_tilde, declination, delta_n, efficiency_gap, mean_median, seats, tau_gap };

// For Metric::tau_gap, tau selects the column; nullopt when undefined or
// the tau was not computed.
std::optional<double> metric_value(const ElectionRow& row, Metric metric, double tau = 0.0);

// Stable; undefined values sort last in either direction.
void sort_rows(std::vector<ElectionRow>& rows, Metric metric, bool descending, double tau = 0.0);

struct Extremes {
  std::vector<ElectionRow> most_positive;
  std::vector<ElectionRow> most_negative;
};

// Positive list holds rows with delta_tilde > 0, descending; negative list
// rows with delta_tilde < 0, ascending. Ties break by (year, state).
Extremes extremes(std::span<const ElectionRow> rows, std::size_t limit);

struct CycleSummary {
  std::string state;
  Chamber chamber = Chamber::congress;
  std::string cycle_id;
  std::vector<std::pair<int, double>> values;  // (year, delta_tilde), year order
  double min = 0.0;
  double max = 0.0;
  bool sign_persistent = false;
  std::size_t n_defined = 0;
};

// Cycles with no defined delta_tilde are omitted.
std::vector<CycleSummary> cycle_summary(std::span<const ElectionRow> rows);

// Fraction of elections with |delta_tilde| > threshold whose cycle is
// sign-persistent. nullopt when no election exceeds the threshold.
std::optional<double> persistence_rate(std::span<const CycleSummary> summaries, double threshold);

// Squared Pearson correlation between two metrics over rows where both are
// defined; nullopt with fewer than two such rows or zero variance.
std::optional<double> metric_r_squared(std::span<const ElectionRow> rows, Metric a, Metric b,
                                       double tau_a = 0.0, double tau_b = 0.0);

// Display precision: two decimals for delta_tilde and declination, one for
// delta_n, three for the remaining metrics. Undefined renders as "".
std::string format_fixed(std::optional<double> v, int decimals);

void write_table_csv(std::ostream& out, std::span<const ElectionRow> rows);
std::string table_json(std::span<const ElectionRow> rows);
void write_extremes_csv(std::ostream& out, const Extremes& ex);

struct SvgLayout {
  double width = 800.0;
  double height = 500.0;
  double margin = 40.0;
};

// Standalone SVG of the sorted shares, the centers of mass F and H of the
// lost and won districts, the pivot G = (k/N, 1/2), and the 1/2 reference
// line. Byte-identical for identical input. Throws UndefinedDeclination.
std::string declination_diagram(const Election& e, const std::string& title = "",
                                const SvgLayout& layout = {});

}  // namespace gerry
