// gerry: command-line front end.
//
//   gerry metrics --shares 0.4,0.45,0.75 [--taus 0,1]
//   gerry metrics --input shares.txt
//   gerry batch --input results.csv --out-dir out [--cycles cycles.json]
//               [--impute model|uniform:W|none] [--seed N] [--svg]
//               [--shift 0.03] [--threshold 0.47] [--taus 0,0.4,1,2]
//   gerry theorem-check --trials 1000 --seed 7 [--taus 0,0.4,1,2,5]
//
// Exit codes: 0 success, 1 property violation, 2 usage or input error
// (including a batch in which no election could be computed).

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "gerry/batch.hpp"
#include "gerry/error.hpp"
#include "gerry/metrics.hpp"
#include "gerry/serialize.hpp"
#include "gerry/theorem_check.hpp"

namespace {

constexpr int kExitViolation = 1;
constexpr int kExitUsage = 2;

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::string token;
  const auto flush = [&] {
    if (token.empty()) return;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != token.size()) throw gerry::Error("not a number: " + token);
    out.push_back(v);
    token.clear();
  };
  for (const char c : text) {
    if (c == ',' || c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      flush();
    } else {
      token += c;
    }
  }
  flush();
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw gerry::Error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vote-distribution asymmetry metrics for district elections"};
  app.require_subcommand(1);

  std::string shares_text;
  std::string shares_file;
  std::string metrics_taus = "0,1";
  auto* metrics = app.add_subcommand("metrics", "Print every metric for one election as JSON");
  auto* shares_opt = metrics->add_option("--shares", shares_text, "Comma-separated party-P shares");
  metrics->add_option("--input", shares_file, "File of shares (comma or whitespace separated)")
      ->excludes(shares_opt);
  metrics->add_option("--taus,--tau", metrics_taus, "Comma-separated tau values");

  gerry::BatchOptions batch_opt;
  std::string input_path;
  std::string cycles_path;
  std::string out_dir;
  std::string impute = "model";
  std::string batch_taus = "0,0.4,1,2";
  double shift = 0.0;
  auto* batch = app.add_subcommand("batch", "Analyze a results CSV and write reports");
  batch->add_option("--input", input_path, "Results CSV")->required();
  batch->add_option("--cycles", cycles_path, "Cycle table JSON");
  batch->add_option("--out-dir", out_dir, "Output directory")->required();
  batch->add_option("--impute", impute, "model | uniform[:W] | none");
  batch->add_option("--taus,--tau", batch_taus, "Comma-separated tau values");
  batch->add_option("--seed", batch_opt.seed, "Seed for fits and fallback draws");
  batch->add_flag("--svg", batch_opt.svg, "Write one declination diagram per election");
  auto* shift_opt = batch->add_option("--shift", shift, "Shift imputed Democratic shares");
  batch->add_option("--threshold", batch_opt.threshold, "Persistence threshold on |delta_tilde|");
  batch->add_option("--limit", batch_opt.extremes_limit, "Rows per extremes list");

  std::size_t trials = 1000;
  std::uint64_t check_seed = 7;
  std::string check_taus = "0,0.4,1,2,5";
  auto* check = app.add_subcommand("theorem-check", "Randomized packing/cracking monotonicity check");
  check->add_option("--trials", trials, "Number of random trials (>= 1)");
  check->add_option("--seed", check_seed, "Seed");
  check->add_option("--taus,--tau", check_taus, "Comma-separated tau values");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*metrics) {
      if (shares_text.empty() && shares_file.empty()) {
        std::cerr << "metrics: one of --shares or --input is required\n";
        return kExitUsage;
      }
      const auto shares = parse_number_list(shares_file.empty() ? shares_text : read_file(shares_file));
      const auto taus = parse_number_list(metrics_taus);
      const gerry::MetricSet m = gerry::metric_set(gerry::make_election(shares), taus);
      std::cout << gerry::Json(m).dump(2) << '\n';
      return 0;
    }

    if (*batch) {
      batch_opt.input = input_path;
      if (!cycles_path.empty()) batch_opt.cycles = cycles_path;
      batch_opt.out_dir = out_dir;
      batch_opt.taus = parse_number_list(batch_taus);
      batch_opt.strategy = gerry::parse_strategy(impute);
      if (*shift_opt) batch_opt.shift = shift;
      const gerry::BatchSummary s = gerry::run_batch(batch_opt);
      std::cerr << "records " << s.records << ", row errors " << s.row_errors << ", elections "
                << s.rows << ", group errors " << s.group_errors << ", excluded " << s.exclusions
                << '\n';
      return s.total_failure() ? kExitUsage : 0;
    }

    if (*check) {
      if (trials == 0) {
        std::cerr << "theorem-check: --trials must be at least 1\n";
        return kExitUsage;
      }
      gerry::TheoremCheckConfig cfg;
      cfg.trials = trials;
      cfg.seed = check_seed;
      cfg.taus = parse_number_list(check_taus);
      const auto report = gerry::theorem_check(cfg);
      std::cout << gerry::to_json_text(report) << '\n';
      return report.passed() ? 0 : kExitViolation;
    }
  } catch (const gerry::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
