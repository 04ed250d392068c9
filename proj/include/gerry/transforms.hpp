#pragma once

// Packing and cracking of party-P votes out of district k+1, the party-P
// win with the smallest share. Districts are equal-population, so moving
// votes is moving share mass. Results are re-sorted; district identity is
// not tracked.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "gerry/metrics.hpp"

namespace gerry {

// Votes leave district k+1 (1-based) for the k districts P already loses.
// allocation[i] is the share added to sorted district i+1.
struct CrackPlan {
  std::size_t source_index = 0;
  double new_source_share = 0.0;
  std::vector<double> allocation;

  friend bool operator==(const CrackPlan&, const CrackPlan&) = default;
};

// Votes leave district k+1 for districts k+2..N. allocation[j] is the share
// added to sorted district k+2+j.
struct PackPlan {
  std::size_t source_index = 0;
  double new_source_share = 0.0;
  std::vector<double> allocation;

  friend bool operator==(const PackPlan&, const PackPlan&) = default;
};

// Absolute tolerance on vote conservation when validating a plan.
inline constexpr double kConservationTolerance = 1e-12;

// Both throw InvalidPlan naming the first violated constraint.
void validate(const Election& e, const CrackPlan& plan);
void validate(const Election& e, const PackPlan& plan);

Election apply_crack(const Election& e, const CrackPlan& plan);
Election apply_pack(const Election& e, const PackPlan& plan);

// p_i -> 1 - p_i with party labels swapped. Q-side transforms are
// mirror_q(apply_*(mirror_q(e), plan)).
Election mirror_q(const Election& e);

// Which lower bound the sampled new source share must clear.
enum class PlanHypothesis {
  none,         // any feasible plan
  declination,  // p'_{k+1} > mean share of the lost districts
  gap,          // p'_{k+1} > p_k (implies the declination hypothesis)
};

// Margins used by the generators so that strict inequalities downstream
// are numerically meaningful.
inline constexpr double kBoundaryMargin = 1e-6;

// Seeded, deterministic. nullopt when no feasible plan exists.
// Throws DegenerateElection when k = 0 or k' = 0.
std::optional<CrackPlan> random_crack_plan(const Election& e, std::uint64_t seed,
                                           PlanHypothesis hypothesis);
std::optional<PackPlan> random_pack_plan(const Election& e, std::uint64_t seed,
                                         PlanHypothesis hypothesis);

// Boolean form: true selects the hypothesis of the matching monotonicity
// result (declination for cracks, gap for packs).
std::optional<CrackPlan> random_crack_plan(const Election& e, std::uint64_t seed,
                                           bool require_theorem_hypotheses);
std::optional<PackPlan> random_pack_plan(const Election& e, std::uint64_t seed,
                                         bool require_theorem_hypotheses);

}  // namespace gerry
