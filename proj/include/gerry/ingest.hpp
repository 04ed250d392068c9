#pragma once

// Per-district race results: CSV parsing, two-party shares, and grouping
// into elections keyed by (state, chamber, year, cycle).
//
// CSV schema (UTF-8, header row required, column order free):
//   state,chamber,year,district,dem_votes,rep_votes,
//   dem_incumbent,rep_incumbent,winner,multi_member
// chamber is "congress" or "state_lower"; booleans are "true"/"false";
// winner is "D" or "R"; an absent vote count is an empty field.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gerry {

enum class Chamber { congress, state_lower };
enum class Party { D, R };

std::string_view to_string(Chamber c);
std::string_view to_string(Party p);
std::optional<Chamber> parse_chamber(std::string_view s);
std::optional<Party> parse_party(std::string_view s);

struct DistrictRaceRecord {
  std::string state;
  Chamber chamber = Chamber::congress;
  int year = 0;
  std::string district_id;
  std::optional<std::int64_t> dem_votes;
  std::optional<std::int64_t> rep_votes;
  bool dem_incumbent = false;
  bool rep_incumbent = false;
  Party winner = Party::D;
  bool multi_member = false;

  friend bool operator==(const DistrictRaceRecord&, const DistrictRaceRecord&) = default;
};

struct RowError {
  std::size_t line = 0;  // 1-based, header is line 1
  std::string reason;
};

struct ParseResult {
  std::vector<DistrictRaceRecord> records;
  std::vector<RowError> errors;
};

enum class ResultsFormat { neutral_csv };

inline constexpr std::string_view kResultsColumns[] = {
    "state",         "chamber",       "year",   "district",    "dem_votes",
    "rep_votes",     "dem_incumbent", "rep_incumbent", "winner", "multi_member"};

// Malformed rows are collected in errors and skipped; a missing column
// throws SchemaMismatch.
ParseResult parse_results(std::istream& in, ResultsFormat format = ResultsFormat::neutral_csv);
ParseResult parse_results_file(const std::filesystem::path& path,
                               ResultsFormat format = ResultsFormat::neutral_csv);

void write_results(std::ostream& out, std::span<const DistrictRaceRecord> records);

// dem / (dem + rep). nullopt marks an uncontested race (either count
// absent). Throws BothZero when both counts are zero.
std::optional<double> two_party_share(const DistrictRaceRecord& r);

bool is_contested(const DistrictRaceRecord& r);

struct CycleSpan {
  std::string cycle_id;
  int first_year = 0;
  int last_year = 0;
};

// Maps (state, chamber) to its districting cycles. Years not covered fall
// back to decade cycles starting in years ending in 2, identified by the
// starting year ("1972" covers 1972-1981).
class CycleTable {
 public:
  CycleTable() = default;

  // JSON object: {"TX:congress": [{"cycle_id": "TX1", "first_year": 1992,
  // "last_year": 1996}, ...], ...}
  static CycleTable from_json_text(std::string_view text);
  static CycleTable load(const std::filesystem::path& path);

  void add(const std::string& state, Chamber chamber, CycleSpan span);
  std::string cycle_for(const std::string& state, Chamber chamber, int year) const;

  static std::string default_cycle(int year);

 private:
  std::map<std::pair<std::string, Chamber>, std::vector<CycleSpan>> spans_;
};

struct ElectionKey {
  std::string state;
  Chamber chamber = Chamber::congress;
  int year = 0;
  std::string cycle_id;

  friend auto operator<=>(const ElectionKey&, const ElectionKey&) = default;
  friend bool operator==(const ElectionKey&, const ElectionKey&) = default;
};

std::string to_string(const ElectionKey& key);

struct ElectionGroup {
  ElectionKey key;
  std::vector<DistrictRaceRecord> records;
  std::optional<std::string> exclusion_reason;
};

inline constexpr std::string_view kMultiMemberReason = "multi-member district";

// Groups are returned in key order. Any group containing a multi-member
// record is kept but carries an exclusion reason.
std::vector<ElectionGroup> group_elections(std::span<const DistrictRaceRecord> records,
                                           const CycleTable& cycles = {});

}  // namespace gerry
