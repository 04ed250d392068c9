#pragma once

// Reference computations for tests. Each follows a different route from the
// library: geometry instead of closed-form angles, raw vote counting for
// waste, the per-party tau-waste integrals instead of the signed sum, and
// extended precision throughout.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

namespace oracle {

using Real = long double;

inline std::vector<Real> sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return {v.begin(), v.end()};
}

// Angle HGU minus angle FGT from the centers of mass, via atan2.
inline std::optional<Real> declination(const std::vector<double>& shares) {
  const auto p = sorted(shares);
  const Real n = static_cast<Real>(p.size());
  Real fx = 0, fy = 0, hx = 0, hy = 0;
  std::size_t lost = 0, won = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Real x = (static_cast<Real>(i) + 1) / n - 1 / (2 * n);
    if (p[i] <= 0.5L) {
      fx += x;
      fy += p[i];
      ++lost;
    } else {
      hx += x;
      hy += p[i];
      ++won;
    }
  }
  if (lost == 0 || won == 0) return std::nullopt;
  fx /= static_cast<Real>(lost);
  fy /= static_cast<Real>(lost);
  hx /= static_cast<Real>(won);
  hy /= static_cast<Real>(won);
  const Real gx = static_cast<Real>(lost) / n;
  const Real gy = 0.5L;
  const Real theta_p = std::atan2(hy - gy, hx - gx);  // against U = (1, 1/2)
  const Real theta_q = std::atan2(gy - fy, gx - fx);  // against T = (0, 1/2)
  const Real pi = 3.14159265358979323846264338327950288L;
  return 2 * (theta_p - theta_q) / pi;
}

// Counts wasted votes over districts of 1,000,000 voters each.
inline Real efficiency_gap(const std::vector<double>& shares) {
  const Real voters = 1e6L;
  Real wasted_p = 0, wasted_q = 0;
  for (const double s : shares) {
    const Real vp = s * voters;
    const Real vq = voters - vp;
    if (s > 0.5) {
      wasted_p += vp - voters / 2;
      wasted_q += vq;
    } else {
      wasted_p += vp;
      wasted_q += vq - voters / 2;
    }
  }
  return (wasted_p - wasted_q) / (voters * static_cast<Real>(shares.size()));
}

// (w_P - w_Q) / (w_P + w_Q) from the per-district tau-waste integrals.
inline Real tau_gap(const std::vector<double>& shares, Real tau) {
  const auto p = sorted(shares);
  const Real e = tau + 1;
  Real wp = 0, wq = 0;
  for (const Real s : p) {
    const Real a = 2 * s - 1;
    if (s > 0.5L) {
      const Real w = std::pow(a, e) / e;
      wp += w;
      wq += 1 / e - w;
    } else {
      const Real w = std::pow(-a, e) / e;
      wq += w;
      wp += 1 / e - w;
    }
  }
  return (wp - wq) / (wp + wq);
}

// 2 [ M_{2l+1}(a) + 1/2 - k'/N ] with M the raw odd moment of a_i.
inline Real moment_gap(const std::vector<double>& shares, int l) {
  Real m = 0;
  std::size_t won = 0;
  for (const double s : shares) {
    Real term = 1;
    const Real a = 2 * static_cast<Real>(s) - 1;
    for (int i = 0; i < 2 * l + 1; ++i) term *= a;
    m += term;
    if (s > 0.5) ++won;
  }
  const Real n = static_cast<Real>(shares.size());
  return 2 * (m / n + 0.5L - static_cast<Real>(won) / n);
}

inline Real mean_median(std::vector<double> shares) {
  std::sort(shares.begin(), shares.end());
  const std::size_t n = shares.size();
  Real mean = 0;
  for (const double s : shares) mean += s;
  mean /= static_cast<Real>(n);
  const Real median = n % 2 ? static_cast<Real>(shares[n / 2])
                            : (static_cast<Real>(shares[n / 2 - 1]) + shares[n / 2]) / 2;
  return mean - median;
}

// Random shares in [0,1] at least `gap` away from 1/2.
inline std::vector<double> random_shares(std::mt19937_64& rng, std::size_t n, double gap = 1e-3) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> out;
  while (out.size() < n) {
    const double p = u(rng);
    if (std::abs(p - 0.5) >= gap) out.push_back(p);
  }
  return out;
}

}  // namespace oracle
