#include "gerry/batch.hpp"

#include <fstream>
#include <sstream>

#include "gerry/error.hpp"
#include "gerry/ingest.hpp"
#include "gerry/random.hpp"
#include "gerry/report.hpp"
#include "gerry/serialize.hpp"

namespace gerry {

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << contents;
    if (!out.flush()) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

ImputeStrategy parse_strategy(const std::string& s) {
  ImputeStrategy st;
  if (s == "model") {
    st.kind = ImputeStrategy::Kind::model;
  } else if (s == "none") {
    st.kind = ImputeStrategy::Kind::none;
  } else if (s == "uniform" || s.starts_with("uniform:")) {
    st.kind = ImputeStrategy::Kind::uniform;
    if (s.size() > 8) {
      std::size_t used = 0;
      const std::string w = s.substr(8);
      try {
        st.uniform_share = std::stod(w, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != w.size() || !(st.uniform_share >= 0.0 && st.uniform_share <= 1.0)) {
        throw Error("uniform share must be a number in [0,1]: " + w);
      }
    }
  } else {
    throw Error("unknown imputation strategy: " + s);
  }
  return st;
}

namespace {

Json strategy_json(const ImputeStrategy& st) {
  switch (st.kind) {
    case ImputeStrategy::Kind::none:
      return {{"strategy", "none"}};
    case ImputeStrategy::Kind::uniform:
      return {{"strategy", "uniform"}, {"winner_share", st.uniform_share}};
    case ImputeStrategy::Kind::model:
      break;
  }
  return {{"strategy", "model"}};
}

std::string svg_name(const ElectionKey& k) {
  return k.state + "_" + std::string(to_string(k.chamber)) + "_" + std::to_string(k.year) + ".svg";
}

}  // namespace

BatchSummary run_batch(const BatchOptions& opt) {
  BatchSummary summary;
  const ParseResult parsed = parse_results_file(opt.input);
  const CycleTable cycles = opt.cycles ? CycleTable::load(*opt.cycles) : CycleTable{};
  const std::vector<ElectionGroup> groups = group_elections(parsed.records, cycles);
  summary.records = parsed.records.size();
  summary.row_errors = parsed.errors.size();
  summary.groups = groups.size();

  std::filesystem::create_directories(opt.out_dir);

  Json fit_errors = Json::array();
  ModelMap models;
  Json model_doc = strategy_json(opt.strategy);
  if (opt.strategy.kind == ImputeStrategy::Kind::model) {
    std::map<PartitionKey, std::vector<ElectionGroup>> partitions;
    for (const auto& g : groups) {
      if (!g.exclusion_reason) partitions[partition_of(g.key)].push_back(g);
    }
    Json fitted = Json::object();
    for (const auto& [part, members] : partitions) {
      FitConfig cfg;
      cfg.seed = mix_seed(opt.seed, stable_hash(to_string(part)));
      try {
        auto m = fit(members, cfg);
        fitted[to_string(part)] = m;
        models.emplace(part, std::move(m));
      } catch (const Error& e) {
        fit_errors.push_back({{"partition", to_string(part)}, {"message", e.what()}});
      }
    }
    model_doc["partitions"] = fitted;
  }

  const ElectionTable table = election_table(groups, opt.strategy, models, opt.taus, opt.seed);
  summary.rows = table.rows.size();
  summary.group_errors = table.errors.size();
  summary.exclusions = table.exclusions.size();

  std::ostringstream csv;
  write_table_csv(csv, table.rows);
  write_file_atomic(opt.out_dir / "election_table.csv", csv.str());
  write_file_atomic(opt.out_dir / "election_table.json", table_json(table.rows) + "\n");

  std::ostringstream ex;
  write_extremes_csv(ex, extremes(table.rows, opt.extremes_limit));
  write_file_atomic(opt.out_dir / "extremes.csv", ex.str());

  const auto summaries = cycle_summary(table.rows);
  const auto rate = persistence_rate(summaries, opt.threshold);
  const Json cycles_doc{{"threshold", opt.threshold},
                        {"persistence_rate", rate ? Json(*rate) : Json(nullptr)},
                        {"cycles", summaries}};
  write_file_atomic(opt.out_dir / "cycles.json", cycles_doc.dump(2) + "\n");
  write_file_atomic(opt.out_dir / "model.json", model_doc.dump(2) + "\n");

  Json row_errors = Json::array();
  for (const auto& e : parsed.errors) row_errors.push_back({{"line", e.line}, {"reason", e.reason}});
  Json group_errors = Json::array();
  for (const auto& e : table.errors) group_errors.push_back({{"election", e.key}, {"message", e.message}});
  Json exclusions = Json::array();
  for (const auto& e : table.exclusions) exclusions.push_back({{"election", e.key}, {"reason", e.message}});
  const Json errors_doc{{"row_errors", row_errors},
                        {"group_errors", group_errors},
                        {"fit_errors", fit_errors},
                        {"exclusions", exclusions}};
  write_file_atomic(opt.out_dir / "errors.json", errors_doc.dump(2) + "\n");

  if (opt.shift) {
    const Json sens = sensitivity_shift(table.resolved, *opt.shift);
    Json doc{{"shift", *opt.shift}, {"report", sens}};
    write_file_atomic(opt.out_dir / "sensitivity.json", doc.dump(2) + "\n");
  }

  if (opt.svg) {
    const auto dir = opt.out_dir / "svg";
    std::filesystem::create_directories(dir);
    for (const auto& r : table.resolved) {
      const Election e(r.shares);
      if (!declination(e)) continue;
      write_file_atomic(dir / svg_name(r.key), declination_diagram(e, to_string(r.key)));
      ++summary.svgs;
    }
  }
  return summary;
}

}  // namespace gerry
