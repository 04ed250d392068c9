#include "gerry/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "gerry/error.hpp"

namespace gerry {

namespace {

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

void check_tau(double tau) {
  if (!std::isfinite(tau) || tau < 0.0) throw InvalidTau(tau);
}

}  // namespace

Election::Election(std::vector<double> raw_shares, std::string party_p, std::string party_q)
    : party_p_(std::move(party_p)), party_q_(std::move(party_q)), shares_(std::move(raw_shares)) {
  if (shares_.empty()) throw EmptyElection();
  for (std::size_t i = 0; i < shares_.size(); ++i) {
    const double s = shares_[i];
    // NaN fails both comparisons
    if (!(s >= 0.0 && s <= 1.0)) throw InvalidShare(i, s);
  }
  std::stable_sort(shares_.begin(), shares_.end());
}

Election make_election(std::vector<double> raw_shares, std::string party_p, std::string party_q) {
  return Election(std::move(raw_shares), std::move(party_p), std::move(party_q));
}

SplitIndices split(const Election& e) {
  const auto s = e.shares();
  const auto first_win = std::upper_bound(s.begin(), s.end(), 0.5);
  SplitIndices out;
  out.k = static_cast<std::size_t>(first_win - s.begin());
  out.k_prime = s.size() - out.k;
  if (out.k > 0) out.y_bar = mean_of(s.first(out.k));
  if (out.k_prime > 0) out.z_bar = mean_of(s.subspan(out.k));
  return out;
}

std::optional<double> declination(const Election& e) {
  const SplitIndices sp = split(e);
  if (!sp.y_bar || !sp.z_bar) return std::nullopt;
  const double n = static_cast<double>(e.size());
  const double theta_p = std::atan((2.0 * *sp.z_bar - 1.0) / (static_cast<double>(sp.k_prime) / n));
  const double theta_q = std::atan((1.0 - 2.0 * *sp.y_bar) / (static_cast<double>(sp.k) / n));
  return 2.0 * (theta_p - theta_q) / std::numbers::pi;
}

double delta_n(double declination, std::size_t n_districts) {
  return declination * static_cast<double>(n_districts) / 2.0;
}

double delta_tilde(double declination, std::size_t n_districts) {
  return declination * std::log(static_cast<double>(n_districts)) / 2.0;
}

std::optional<double> delta_n(const Election& e) {
  const auto d = declination(e);
  if (!d) return std::nullopt;
  return delta_n(*d, e.size());
}

std::optional<double> delta_tilde(const Election& e) {
  const auto d = declination(e);
  if (!d) return std::nullopt;
  return delta_tilde(*d, e.size());
}

double efficiency_gap(const Election& e) {
  double total = 0.0;
  for (const double p : e.shares()) {
    const double waste_p = p > 0.5 ? p - 0.5 : p;
    const double waste_q = 0.5 - waste_p;
    total += waste_p - waste_q;
  }
  return total / static_cast<double>(e.size());
}

double tau_gap(const Election& e, double tau) {
  check_tau(tau);
  const double exponent = tau + 1.0;
  double total = 0.0;
  for (const double p : e.shares()) {
    const double a = 2.0 * p - 1.0;
    const double eps = p > 0.5 ? 1.0 : -1.0;
    const double base = eps * a;
    if (base > 0.0) total += eps * std::exp(exponent * std::log(base));
  }
  const double n = static_cast<double>(e.size());
  const double k_prime = static_cast<double>(split(e).k_prime);
  return 2.0 * (total / n + 0.5 - k_prime / n);
}

double tau_gap_limit(const Election& e) {
  return 1.0 - 2.0 * seat_share(e);
}

double mean_median(const Election& e) {
  const auto s = e.shares();
  const std::size_t n = s.size();
  const double median = n % 2 == 1 ? s[n / 2] : 0.5 * (s[n / 2 - 1] + s[n / 2]);
  return mean_of(s) - median;
}

double seat_share(const Election& e) {
  return static_cast<double>(split(e).k_prime) / static_cast<double>(e.size());
}

double vote_share(const Election& e) { return mean_of(e.shares()); }

MetricSet metric_set(const Election& e, std::span<const double> taus) {
  MetricSet m;
  m.n_districts = e.size();
  m.declination = declination(e);
  if (m.declination) {
    m.delta_n = delta_n(*m.declination, e.size());
    m.delta_tilde = delta_tilde(*m.declination, e.size());
  }
  m.efficiency_gap = efficiency_gap(e);
  for (const double tau : taus) m.tau_gaps[tau] = tau_gap(e, tau);
  m.tau_gap_limit = tau_gap_limit(e);
  m.mean_median = mean_median(e);
  m.seat_share_p = seat_share(e);
  m.vote_share_p = vote_share(e);
  return m;
}

}  // namespace gerry
