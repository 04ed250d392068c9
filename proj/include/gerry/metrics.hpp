#pragma once

// Vote-distribution asymmetry metrics for a single district-based election.
//
// Every metric is a pure function of the sorted vector of party-P two-party
// vote shares. Party P is conventionally the Democrats, so a positive
// declination favors party Q (the Republicans).
//
// Boundary convention: a share of exactly 1/2 counts as a loss for party P.

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gerry {

class Election {
 public:
  // Validates and sorts. Throws EmptyElection or InvalidShare.
  Election(std::vector<double> raw_shares, std::string party_p = "D", std::string party_q = "R");

  std::span<const double> shares() const noexcept { return shares_; }
  std::size_t size() const noexcept { return shares_.size(); }
  double operator[](std::size_t i) const { return shares_[i]; }

  const std::string& party_p() const noexcept { return party_p_; }
  const std::string& party_q() const noexcept { return party_q_; }

  friend bool operator==(const Election&, const Election&) = default;

 private:
  std::string party_p_;
  std::string party_q_;
  std::vector<double> shares_;
};

Election make_election(std::vector<double> raw_shares, std::string party_p = "D",
                       std::string party_q = "R");

struct SplitIndices {
  std::size_t k = 0;        // districts with p_i <= 1/2 (lost by P)
  std::size_t k_prime = 0;  // districts won by P
  std::optional<double> y_bar;  // mean share in lost districts
  std::optional<double> z_bar;  // mean share in won districts
};

SplitIndices split(const Election& e);

// (2/pi) * (theta_P - theta_Q); nullopt when either party wins every seat.
std::optional<double> declination(const Election& e);

// Seat-equivalent scaling: declination * N / 2.
std::optional<double> delta_n(const Election& e);
double delta_n(double declination, std::size_t n_districts);

// Size-decorrelated scaling: declination * ln(N) / 2.
std::optional<double> delta_tilde(const Election& e);
double delta_tilde(double declination, std::size_t n_districts);

double efficiency_gap(const Election& e);

// Gap_tau with a_i = 2 p_i - 1:
//   2 * [ sum_i eps_i (eps_i a_i)^(tau+1) / N + 1/2 - k'/N ],
// eps_i = -1 for lost districts, +1 for won districts. Throws InvalidTau.
double tau_gap(const Election& e, double tau);

// Limit of tau_gap as tau -> infinity, 1 - 2k'/N. Exact only when every
// 0 < |a_i| < 1; returned unconditionally.
double tau_gap_limit(const Election& e);

double mean_median(const Election& e);

double seat_share(const Election& e);
double vote_share(const Election& e);

struct MetricSet {
  std::size_t n_districts = 0;
  std::optional<double> declination;
  std::optional<double> delta_n;
  std::optional<double> delta_tilde;
  double efficiency_gap = 0.0;
  std::map<double, double> tau_gaps;
  double tau_gap_limit = 0.0;
  double mean_median = 0.0;
  double seat_share_p = 0.0;
  double vote_share_p = 0.0;
};

MetricSet metric_set(const Election& e, std::span<const double> taus);

}  // namespace gerry
