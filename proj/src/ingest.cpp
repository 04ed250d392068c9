#include "gerry/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "gerry/error.hpp"
#include <nlohmann/json.hpp>

namespace gerry {

SchemaMismatch::SchemaMismatch(std::vector<std::string> missing)
    : Error([&] {
        std::string msg = "missing columns:";
        for (const auto& m : missing) msg += " " + m;
        return msg;
      }()),
      missing_(std::move(missing)) {}

std::string_view to_string(Chamber c) {
  return c == Chamber::congress ? "congress" : "state_lower";
}

std::string_view to_string(Party p) { return p == Party::D ? "D" : "R"; }

std::optional<Chamber> parse_chamber(std::string_view s) {
  if (s == "congress") return Chamber::congress;
  if (s == "state_lower") return Chamber::state_lower;
  return std::nullopt;
}

std::optional<Party> parse_party(std::string_view s) {
  if (s == "D") return Party::D;
  if (s == "R") return Party::R;
  return std::nullopt;
}

namespace {

enum Column : std::size_t {
  kState,
  kChamber,
  kYear,
  kDistrict,
  kDemVotes,
  kRepVotes,
  kDemIncumbent,
  kRepIncumbent,
  kWinner,
  kMultiMember,
  kColumnCount
};

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

template <typename Int>
bool parse_int(std::string_view s, Int& out) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && !s.empty();
}

std::optional<bool> parse_bool(std::string_view s) {
  if (s == "true") return true;
  if (s == "false") return false;
  return std::nullopt;
}

struct RowFailure {
  std::string reason;
};

std::optional<std::int64_t> parse_votes(std::string_view s) {
  if (s.empty()) return std::nullopt;
  std::int64_t v = 0;
  if (!parse_int(s, v)) throw RowFailure{"non-numeric votes"};
  if (v < 0) throw RowFailure{"negative votes"};
  return v;
}

DistrictRaceRecord parse_row(const std::vector<std::string>& f, const std::vector<std::size_t>& at) {
  DistrictRaceRecord r;
  r.state = f[at[kState]];
  if (r.state.empty()) throw RowFailure{"empty state"};

  const auto chamber = parse_chamber(f[at[kChamber]]);
  if (!chamber) throw RowFailure{"unknown chamber"};
  r.chamber = *chamber;

  if (!parse_int(f[at[kYear]], r.year)) throw RowFailure{"non-numeric year"};

  r.district_id = f[at[kDistrict]];
  if (r.district_id.empty()) throw RowFailure{"empty district"};

  r.dem_votes = parse_votes(f[at[kDemVotes]]);
  r.rep_votes = parse_votes(f[at[kRepVotes]]);

  const auto dem_inc = parse_bool(f[at[kDemIncumbent]]);
  const auto rep_inc = parse_bool(f[at[kRepIncumbent]]);
  const auto multi = parse_bool(f[at[kMultiMember]]);
  if (!dem_inc || !rep_inc || !multi) throw RowFailure{"boolean must be true or false"};
  r.dem_incumbent = *dem_inc;
  r.rep_incumbent = *rep_inc;
  r.multi_member = *multi;

  const auto winner = parse_party(f[at[kWinner]]);
  if (!winner) throw RowFailure{"winner must be D or R"};
  r.winner = *winner;

  if (r.dem_votes && r.rep_votes && *r.dem_votes != *r.rep_votes) {
    const Party by_votes = *r.dem_votes > *r.rep_votes ? Party::D : Party::R;
    if (by_votes != r.winner) throw RowFailure{"winner inconsistent with votes"};
  }
  return r;
}

}  // namespace

ParseResult parse_results(std::istream& in, ResultsFormat /*format*/) {
  ParseResult out;
  std::string line;
  std::size_t line_no = 0;

  std::vector<std::size_t> at(kColumnCount);
  std::size_t width = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    if (!have_header) {
      const auto header = split_csv_line(line);
      std::vector<std::string> missing;
      for (std::size_t c = 0; c < kColumnCount; ++c) {
        const auto it = std::find(header.begin(), header.end(), kResultsColumns[c]);
        if (it == header.end()) {
          missing.emplace_back(kResultsColumns[c]);
        } else {
          at[c] = static_cast<std::size_t>(it - header.begin());
        }
      }
      if (!missing.empty()) throw SchemaMismatch(std::move(missing));
      width = header.size();
      have_header = true;
      continue;
    }
    if (line.find_first_not_of(" \t") == std::string::npos) continue;

    const auto fields = split_csv_line(line);
    if (fields.size() != width) {
      out.errors.push_back({line_no, "expected " + std::to_string(width) + " fields, got " +
                                         std::to_string(fields.size())});
      continue;
    }
    try {
      out.records.push_back(parse_row(fields, at));
    } catch (const RowFailure& e) {
      out.errors.push_back({line_no, e.reason});
    }
  }
  if (!have_header) {
    std::vector<std::string> all(std::begin(kResultsColumns), std::end(kResultsColumns));
    throw SchemaMismatch(std::move(all));
  }
  return out;
}

ParseResult parse_results_file(const std::filesystem::path& path, ResultsFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return parse_results(in, format);
}

void write_results(std::ostream& out, std::span<const DistrictRaceRecord> records) {
  for (std::size_t c = 0; c < kColumnCount; ++c) {
    out << (c ? "," : "") << kResultsColumns[c];
  }
  out << '\n';
  const auto votes = [](const std::optional<std::int64_t>& v) {
    return v ? std::to_string(*v) : std::string();
  };
  const auto flag = [](bool b) { return b ? "true" : "false"; };
  for (const auto& r : records) {
    out << quote_if_needed(r.state) << ',' << to_string(r.chamber) << ',' << r.year << ','
        << quote_if_needed(r.district_id) << ',' << votes(r.dem_votes) << ','
        << votes(r.rep_votes) << ',' << flag(r.dem_incumbent) << ',' << flag(r.rep_incumbent)
        << ',' << to_string(r.winner) << ',' << flag(r.multi_member) << '\n';
  }
}

std::optional<double> two_party_share(const DistrictRaceRecord& r) {
  if (!r.dem_votes || !r.rep_votes) return std::nullopt;
  const std::int64_t total = *r.dem_votes + *r.rep_votes;
  if (total == 0) throw BothZero();
  return static_cast<double>(*r.dem_votes) / static_cast<double>(total);
}

bool is_contested(const DistrictRaceRecord& r) {
  return r.dem_votes && r.rep_votes && *r.dem_votes + *r.rep_votes > 0;
}

CycleTable CycleTable::from_json_text(std::string_view text) {
  CycleTable table;
  const auto doc = nlohmann::json::parse(text);
  if (!doc.is_object()) throw Error("cycle table must be a JSON object");
  for (const auto& [key, spans] : doc.items()) {
    const auto colon = key.find(':');
    if (colon == std::string::npos) throw Error("cycle table key must be STATE:chamber: " + key);
    const auto chamber = parse_chamber(std::string_view(key).substr(colon + 1));
    if (!chamber) throw Error("unknown chamber in cycle table key: " + key);
    for (const auto& s : spans) {
      CycleSpan span{s.at("cycle_id").get<std::string>(), s.at("first_year").get<int>(),
                     s.at("last_year").get<int>()};
      if (span.first_year > span.last_year) throw Error("cycle span ends before it starts: " + key);
      table.add(key.substr(0, colon), *chamber, std::move(span));
    }
  }
  return table;
}

CycleTable CycleTable::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

void CycleTable::add(const std::string& state, Chamber chamber, CycleSpan span) {
  spans_[{state, chamber}].push_back(std::move(span));
}

std::string CycleTable::cycle_for(const std::string& state, Chamber chamber, int year) const {
  if (const auto it = spans_.find({state, chamber}); it != spans_.end()) {
    for (const auto& span : it->second) {
      if (year >= span.first_year && year <= span.last_year) return span.cycle_id;
    }
  }
  return default_cycle(year);
}

std::string CycleTable::default_cycle(int year) {
  // floor-mod so that years before 2 AD are still well defined
  const int offset = ((year - 2) % 10 + 10) % 10;
  return std::to_string(year - offset);
}

std::string to_string(const ElectionKey& key) {
  std::string s = key.state;
  s += ' ';
  s += to_string(key.chamber);
  s += ' ';
  s += std::to_string(key.year);
  return s;
}

std::vector<ElectionGroup> group_elections(std::span<const DistrictRaceRecord> records,
                                           const CycleTable& cycles) {
  std::map<ElectionKey, ElectionGroup> groups;
  for (const auto& r : records) {
    ElectionKey key{r.state, r.chamber, r.year, cycles.cycle_for(r.state, r.chamber, r.year)};
    auto& g = groups[key];
    g.key = key;
    g.records.push_back(r);
    if (r.multi_member) g.exclusion_reason = std::string(kMultiMemberReason);
  }
  std::vector<ElectionGroup> out;
  out.reserve(groups.size());
  for (auto& [key, g] : groups) out.push_back(std::move(g));
  return out;
}

}  // namespace gerry
