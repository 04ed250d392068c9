#include "gerry/theorem_check.hpp"

#include <cmath>

#include "gerry/error.hpp"
#include "gerry/random.hpp"
#include "gerry/serialize.hpp"

namespace gerry {

namespace {

// Draws elections until one admits a plan meeting the gap hypothesis (which
// also satisfies the declination hypothesis). Needs k >= 1 and k' >= 2 so
// the declination stays defined after a seat flips.
struct Trial {
  Election before;
  Election after;
  std::optional<CrackPlan> crack;
  std::optional<PackPlan> pack;
};

Trial draw_trial(Rng& rng, const TheoremCheckConfig& cfg) {
  for (;;) {
    const auto n = static_cast<std::size_t>(
        cfg.min_districts + rng.index(cfg.max_districts - cfg.min_districts + 1));
    std::vector<double> shares;
    shares.reserve(n);
    while (shares.size() < n) {
      const double p = rng.uniform();
      if (std::abs(p - 0.5) >= cfg.half_exclusion) shares.push_back(p);
    }
    Election e(std::move(shares));
    const SplitIndices sp = split(e);
    if (sp.k < 1 || sp.k_prime < 2) continue;

    const std::uint64_t plan_seed = rng.next();
    if (rng.coin()) {
      if (auto plan = random_crack_plan(e, plan_seed, PlanHypothesis::gap)) {
        Election after = apply_crack(e, *plan);
        return {std::move(e), std::move(after), std::move(plan), std::nullopt};
      }
    } else {
      if (auto plan = random_pack_plan(e, plan_seed, PlanHypothesis::gap)) {
        Election after = apply_pack(e, *plan);
        return {std::move(e), std::move(after), std::nullopt, std::move(plan)};
      }
    }
  }
}

}  // namespace

TheoremCheckReport theorem_check(const TheoremCheckConfig& config) {
  if (config.trials == 0) throw Error("trials must be at least 1");
  if (config.min_districts < 3 || config.max_districts < config.min_districts) {
    throw Error("district range must satisfy 3 <= min <= max");
  }
  for (const double tau : config.taus) {
    if (!std::isfinite(tau) || tau < 0.0) throw InvalidTau(tau);
  }

  TheoremCheckReport rep;
  rep.trials = config.trials;
  rep.taus = config.taus;
  rep.gap_increases.assign(config.taus.size(), 0);

  for (std::size_t t = 0; t < config.trials; ++t) {
    Rng rng(mix_seed(config.seed, t));
    const Trial trial = draw_trial(rng, config);
    (trial.crack ? rep.cracks : rep.packs) += 1;

    const auto violation = [&](std::string metric, double before, double after) {
      TheoremCounterexample cx;
      cx.trial = t;
      cx.transform = trial.crack ? "crack" : "pack";
      cx.metric = std::move(metric);
      cx.shares.assign(trial.before.shares().begin(), trial.before.shares().end());
      cx.crack = trial.crack;
      cx.pack = trial.pack;
      cx.before = before;
      cx.after = after;
      rep.counterexamples.push_back(std::move(cx));
    };

    const double d0 = *declination(trial.before);
    const double d1 = *declination(trial.after);
    if (d1 > d0) {
      ++rep.declination_increases;
    } else {
      violation("declination", d0, d1);
    }
    for (std::size_t i = 0; i < config.taus.size(); ++i) {
      const double g0 = tau_gap(trial.before, config.taus[i]);
      const double g1 = tau_gap(trial.after, config.taus[i]);
      if (g1 > g0) {
        ++rep.gap_increases[i];
      } else {
        violation("gap_tau_" + format_number(config.taus[i]), g0, g1);
      }
    }
  }
  return rep;
}

std::string to_json_text(const TheoremCheckReport& rep) {
  Json gaps = Json::object();
  for (std::size_t i = 0; i < rep.taus.size(); ++i) gaps[format_number(rep.taus[i])] = rep.gap_increases[i];
  Json cxs = Json::array();
  for (const auto& c : rep.counterexamples) {
    Json j{{"trial", c.trial},   {"transform", c.transform}, {"metric", c.metric},
           {"shares", c.shares}, {"before", c.before},       {"after", c.after}};
    if (c.crack) j["plan"] = *c.crack;
    if (c.pack) j["plan"] = *c.pack;
    cxs.push_back(std::move(j));
  }
  const Json j{{"trials", rep.trials},
               {"cracks", rep.cracks},
               {"packs", rep.packs},
               {"declination_increases", rep.declination_increases},
               {"gap_increases", gaps},
               {"violations", rep.counterexamples.size()},
               {"counterexamples", cxs},
               {"passed", rep.passed()}};
  return j.dump(2);
}

}  // namespace gerry
