#pragma once

// Randomized check of the packing/cracking monotonicity results: a P-crack
// or P-pack of district k+1 whose new share clears the theorem bound must
// strictly increase the declination and every Gap_tau.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gerry/transforms.hpp"

namespace gerry {

struct TheoremCheckConfig {
  std::size_t trials = 1000;
  std::uint64_t seed = 7;
  std::vector<double> taus{0.0, 0.4, 1.0, 2.0, 5.0};
  std::size_t min_districts = 3;
  std::size_t max_districts = 50;
  // Generated shares keep at least this distance from 1/2.
  double half_exclusion = 1e-3;
};

struct TheoremCounterexample {
  std::size_t trial = 0;
  std::string transform;  // "crack" or "pack"
  std::string metric;     // "declination" or "gap_tau_<tau>"
  std::vector<double> shares;
  std::optional<CrackPlan> crack;
  std::optional<PackPlan> pack;
  double before = 0.0;
  double after = 0.0;
};

struct TheoremCheckReport {
  std::size_t trials = 0;
  std::size_t cracks = 0;
  std::size_t packs = 0;
  std::size_t declination_increases = 0;
  std::vector<double> taus;
  std::vector<std::size_t> gap_increases;  // parallel to taus
  std::vector<TheoremCounterexample> counterexamples;

  bool passed() const { return counterexamples.empty(); }
};

// Throws Error when trials == 0.
TheoremCheckReport theorem_check(const TheoremCheckConfig& config);

std::string to_json_text(const TheoremCheckReport& report);

}  // namespace gerry
