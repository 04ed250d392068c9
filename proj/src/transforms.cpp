#include "gerry/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gerry/error.hpp"
#include "gerry/random.hpp"

namespace gerry {

namespace {

enum class Kind { crack, pack };

// Recipient range [first, last) in sorted order and the share ceiling
// recipients must respect.
struct Recipients {
  std::size_t first;
  std::size_t last;
  double ceiling;
};

Recipients recipients_for(Kind kind, const SplitIndices& sp, std::size_t n) {
  if (kind == Kind::crack) return {0, sp.k, 0.5};
  return {sp.k + 1, n, 1.0};
}

template <typename Plan>
void validate_plan(Kind kind, const Election& e, const Plan& plan) {
  const SplitIndices sp = split(e);
  if (sp.k == 0 || sp.k_prime == 0) throw InvalidPlan("election is a one-party sweep");
  if (plan.source_index != sp.k + 1) throw InvalidPlan("source must be district k+1");

  const Recipients rec = recipients_for(kind, sp, e.size());
  if (plan.allocation.size() != rec.last - rec.first) {
    throw InvalidPlan("allocation size does not match recipient count");
  }
  if (!(plan.new_source_share >= 0.0)) throw InvalidPlan("source share below 0");
  if (!(plan.new_source_share <= 0.5)) throw InvalidPlan("source must end at or below 1/2");

  double moved = 0.0;
  for (std::size_t j = 0; j < plan.allocation.size(); ++j) {
    const double add = plan.allocation[j];
    if (!(add >= 0.0) || !std::isfinite(add)) throw InvalidPlan("negative allocation");
    if (e[rec.first + j] + add > rec.ceiling) {
      throw InvalidPlan(kind == Kind::crack ? "recipient exceeds 1/2" : "share exceeds 1");
    }
    moved += add;
  }
  const double released = e[sp.k] - plan.new_source_share;
  if (std::abs(moved - released) > kConservationTolerance) {
    throw InvalidPlan("allocation does not conserve votes");
  }
}

template <typename Plan>
Election apply_plan(Kind kind, const Election& e, const Plan& plan) {
  validate_plan(kind, e, plan);
  const SplitIndices sp = split(e);
  const Recipients rec = recipients_for(kind, sp, e.size());
  std::vector<double> shares(e.shares().begin(), e.shares().end());
  shares[sp.k] = plan.new_source_share;
  for (std::size_t j = 0; j < plan.allocation.size(); ++j) shares[rec.first + j] += plan.allocation[j];
  return Election(std::move(shares), e.party_p(), e.party_q());
}

template <typename Plan>
std::optional<Plan> sample_plan(Kind kind, const Election& e, std::uint64_t seed,
                                PlanHypothesis hypothesis) {
  const SplitIndices sp = split(e);
  if (sp.k == 0 || sp.k_prime == 0) throw DegenerateElection();

  const Recipients rec = recipients_for(kind, sp, e.size());
  const auto s = e.shares();
  std::vector<double> headroom;
  headroom.reserve(rec.last - rec.first);
  for (std::size_t i = rec.first; i < rec.last; ++i) headroom.push_back(rec.ceiling - s[i]);
  const double total_headroom = std::accumulate(headroom.begin(), headroom.end(), 0.0);

  const double source = s[sp.k];
  // Leave a sliver of every recipient's headroom unused so rounding in the
  // proportional split cannot push a recipient over its ceiling.
  double lower = std::max(0.0, source - total_headroom * (1.0 - 1e-9));
  switch (hypothesis) {
    case PlanHypothesis::none:
      break;
    case PlanHypothesis::declination:
      lower = std::max(lower, *sp.y_bar + kBoundaryMargin);
      break;
    case PlanHypothesis::gap:
      lower = std::max(lower, s[sp.k - 1] + kBoundaryMargin);
      break;
  }
  const double upper = 0.5 - kBoundaryMargin;
  if (lower > upper || total_headroom <= 0.0) return std::nullopt;

  Rng rng(seed);
  Plan plan;
  plan.source_index = sp.k + 1;
  plan.new_source_share = rng.uniform(lower, upper);
  const double moved = source - plan.new_source_share;
  plan.allocation.reserve(headroom.size());
  for (std::size_t j = 0; j < headroom.size(); ++j) {
    const double add = moved * (headroom[j] / total_headroom);
    plan.allocation.push_back(std::clamp(add, 0.0, headroom[j]));
  }
  return plan;
}

}  // namespace

void validate(const Election& e, const CrackPlan& plan) { validate_plan(Kind::crack, e, plan); }
void validate(const Election& e, const PackPlan& plan) { validate_plan(Kind::pack, e, plan); }

Election apply_crack(const Election& e, const CrackPlan& plan) {
  return apply_plan(Kind::crack, e, plan);
}

Election apply_pack(const Election& e, const PackPlan& plan) {
  return apply_plan(Kind::pack, e, plan);
}

Election mirror_q(const Election& e) {
  std::vector<double> shares;
  shares.reserve(e.size());
  for (const double p : e.shares()) shares.push_back(1.0 - p);
  return Election(std::move(shares), e.party_q(), e.party_p());
}

std::optional<CrackPlan> random_crack_plan(const Election& e, std::uint64_t seed,
                                           PlanHypothesis hypothesis) {
  return sample_plan<CrackPlan>(Kind::crack, e, seed, hypothesis);
}

std::optional<PackPlan> random_pack_plan(const Election& e, std::uint64_t seed,
                                         PlanHypothesis hypothesis) {
  return sample_plan<PackPlan>(Kind::pack, e, seed, hypothesis);
}

std::optional<CrackPlan> random_crack_plan(const Election& e, std::uint64_t seed,
                                           bool require_theorem_hypotheses) {
  return random_crack_plan(
      e, seed, require_theorem_hypotheses ? PlanHypothesis::declination : PlanHypothesis::none);
}

std::optional<PackPlan> random_pack_plan(const Election& e, std::uint64_t seed,
                                         bool require_theorem_hypotheses) {
  return random_pack_plan(e, seed,
                          require_theorem_hypotheses ? PlanHypothesis::gap : PlanHypothesis::none);
}

}  // namespace gerry
