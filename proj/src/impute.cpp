#include "gerry/impute.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "gerry/error.hpp"
#include "gerry/metrics.hpp"
#include "gerry/random.hpp"

namespace gerry {

std::string to_string(const DistrictKey& key) {
  return key.state + "/" + key.district_id + "/" + key.cycle_id;
}

DistrictHolding holding_of(std::span<const Party> winners) {
  if (winners.empty()) return DistrictHolding::mixed;
  const bool all_same = std::all_of(winners.begin(), winners.end(),
                                    [&](Party p) { return p == winners.front(); });
  if (!all_same) return DistrictHolding::mixed;
  return winners.front() == Party::D ? DistrictHolding::held_by_d : DistrictHolding::held_by_r;
}

namespace {

struct Observation {
  std::string state;
  DistrictKey district;
  int year = 0;
  bool win_d = false;
  bool win_r = false;
  bool inc_d = false;
  bool inc_r = false;
  double share = 0.0;
};

Observation observe(const DistrictRaceRecord& r, const std::string& cycle_id, double share) {
  return {r.state,
          {r.state, r.district_id, cycle_id},
          r.year,
          r.winner == Party::D,
          r.winner == Party::R,
          r.dem_incumbent,
          r.rep_incumbent,
          share};
}

// Index maps and the unpenalized normal matrix for one set of observations.
class Design {
 public:
  explicit Design(std::span<const Observation> obs) : obs_(obs) {
    for (const auto& o : obs) {
      states_.try_emplace(o.state, 0);
      districts_.try_emplace(o.district, 0);
      years_.try_emplace(o.year, 0);
    }
    number(states_);
    number(districts_);
    number(years_);
    state_base_ = 1;
    district_base_ = state_base_ + states_.size();
    year_base_ = district_base_ + districts_.size();
    beta_base_ = year_base_ + years_.size();
    n_cols_ = beta_base_ + 4;

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(obs.size() * 64);
    rhs_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_cols_));
    std::vector<std::size_t> cols;
    for (const auto& o : obs) {
      active_columns(o, cols);
      for (const auto i : cols) {
        rhs_[static_cast<Eigen::Index>(i)] += o.share - ImputationModel::intercept;
        for (const auto j : cols) {
          triplets.emplace_back(static_cast<int>(i), static_cast<int>(j), 1.0);
        }
      }
    }
    gram_.resize(static_cast<Eigen::Index>(n_cols_), static_cast<Eigen::Index>(n_cols_));
    gram_.setFromTriplets(triplets.begin(), triplets.end());
  }

  // Raw solve; column 0 is the unpenalized constant.
  Eigen::VectorXd solve(const EffectLambdas& lambdas) const {
    Eigen::SparseMatrix<double> a = gram_;
    std::vector<Eigen::Triplet<double>> diag;
    diag.reserve(n_cols_);
    for (std::size_t c = 1; c < n_cols_; ++c) {
      diag.emplace_back(static_cast<int>(c), static_cast<int>(c), penalty_for(c, lambdas));
    }
    Eigen::SparseMatrix<double> pen(a.rows(), a.cols());
    pen.setFromTriplets(diag.begin(), diag.end());
    a += pen;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(a);
    if (solver.info() != Eigen::Success) throw InsufficientData("normal equations are singular");
    Eigen::VectorXd x = solver.solve(rhs_);
    if (solver.info() != Eigen::Success) throw InsufficientData("normal equation solve failed");
    return x;
  }

  ImputationModel to_model(const Eigen::VectorXd& x, const EffectLambdas& lambdas) const {
    ImputationModel m;
    m.ridge_lambda = lambdas;
    m.n_observations = obs_.size();
    double constant = x[0];
    const auto center = [&](auto& index, std::size_t base, auto&& store) {
      if (index.empty()) return;
      double mean = 0.0;
      for (const auto& [key, i] : index) mean += x[static_cast<Eigen::Index>(base + i)];
      mean /= static_cast<double>(index.size());
      constant += mean;
      for (const auto& [key, i] : index) store(key, x[static_cast<Eigen::Index>(base + i)] - mean);
    };
    center(states_, state_base_, [&](const std::string& k, double v) { m.state_effects[k] = v; });
    center(districts_, district_base_,
           [&](const DistrictKey& k, double v) { m.district_effects[k].effect = v; });
    center(years_, year_base_, [&](int k, double v) { m.year_effects[k] = v; });
    const auto beta = [&](std::size_t i) { return x[static_cast<Eigen::Index>(beta_base_ + i)]; };
    m.beta_win_d = beta(0) + constant;
    m.beta_win_r = beta(1) + constant;
    m.beta_inc_d = beta(2);
    m.beta_inc_r = beta(3);
    return m;
  }

 private:
  template <typename Map>
  static void number(Map& m) {
    std::size_t i = 0;
    for (auto& [key, idx] : m) idx = i++;
  }

  void active_columns(const Observation& o, std::vector<std::size_t>& cols) const {
    cols.clear();
    cols.push_back(0);
    cols.push_back(state_base_ + states_.at(o.state));
    cols.push_back(district_base_ + districts_.at(o.district));
    cols.push_back(year_base_ + years_.at(o.year));
    if (o.win_d) cols.push_back(beta_base_ + 0);
    if (o.win_r) cols.push_back(beta_base_ + 1);
    if (o.inc_d) cols.push_back(beta_base_ + 2);
    if (o.inc_r) cols.push_back(beta_base_ + 3);
  }

  double penalty_for(std::size_t c, const EffectLambdas& l) const {
    if (c < district_base_) return l.state;
    if (c < year_base_) return l.district;
    if (c < beta_base_) return l.year;
    return l.beta;
  }

  std::span<const Observation> obs_;
  std::map<std::string, std::size_t> states_;
  std::map<DistrictKey, std::size_t> districts_;
  std::map<int, std::size_t> years_;
  std::size_t state_base_ = 0;
  std::size_t district_base_ = 0;
  std::size_t year_base_ = 0;
  std::size_t beta_base_ = 0;
  std::size_t n_cols_ = 0;
  Eigen::SparseMatrix<double> gram_;
  Eigen::VectorXd rhs_;
};

template <typename Map, typename Key>
double lookup_or_zero(const Map& m, const Key& k) {
  const auto it = m.find(k);
  return it == m.end() ? 0.0 : it->second;
}

double predict_observation(const ImputationModel& m, const Observation& o) {
  const auto d = m.district_effects.find(o.district);
  double y = ImputationModel::intercept + lookup_or_zero(m.state_effects, o.state) +
             lookup_or_zero(m.year_effects, o.year) +
             (d == m.district_effects.end() ? 0.0 : d->second.effect);
  if (o.win_d) y += m.beta_win_d;
  if (o.win_r) y += m.beta_win_r;
  if (o.inc_d) y += m.beta_inc_d;
  if (o.inc_r) y += m.beta_inc_r;
  return y;
}

double rmse_of(const ImputationModel& m, std::span<const Observation> obs) {
  double total = 0.0;
  for (const auto& o : obs) {
    const double r = o.share - predict_observation(m, o);
    total += r * r;
  }
  return std::sqrt(total / static_cast<double>(obs.size()));
}

EffectLambdas grid_search(std::span<const Observation> obs, const FitConfig& config) {
  EffectLambdas best;
  if (obs.size() < 10 || config.lambda_grid.empty()) return best;

  std::vector<std::size_t> order(obs.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(config.seed);
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);
  const auto n_val = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(config.validation_fraction * static_cast<double>(obs.size()))),
      1, obs.size() - 1);
  std::vector<Observation> validation;
  std::vector<Observation> training;
  for (std::size_t i = 0; i < order.size(); ++i) {
    (i < n_val ? validation : training).push_back(obs[order[i]]);
  }

  const Design design(training);
  const auto score = [&](const EffectLambdas& l) {
    return rmse_of(design.to_model(design.solve(l), l), validation);
  };

  double best_score = score(best);
  double EffectLambdas::*families[] = {&EffectLambdas::state, &EffectLambdas::district,
                                        &EffectLambdas::year, &EffectLambdas::beta};
  for (int sweep = 0; sweep < 3; ++sweep) {
    bool changed = false;
    for (auto family : families) {
      for (const double value : config.lambda_grid) {
        EffectLambdas trial = best;
        trial.*family = value;
        if (trial == best) continue;
        const double s = score(trial);
        if (s < best_score) {
          best_score = s;
          best = trial;
          changed = true;
        }
      }
    }
    if (!changed) break;
  }
  return best;
}

struct FitInput {
  std::vector<Observation> contested;
  std::map<DistrictKey, std::vector<Party>> winners;
  std::map<DistrictKey, std::size_t> n_contested;
};

FitInput collect(std::span<const ElectionGroup> groups) {
  FitInput in;
  for (const auto& g : groups) {
    if (g.exclusion_reason) continue;
    for (const auto& r : g.records) {
      const DistrictKey dk{r.state, r.district_id, g.key.cycle_id};
      in.winners[dk].push_back(r.winner);
      auto& count = in.n_contested[dk];
      if (!is_contested(r)) continue;
      in.contested.push_back(observe(r, g.key.cycle_id, *two_party_share(r)));
      ++count;
    }
  }
  return in;
}

ImputationModel fit_observations(std::span<const Observation> obs, const FitInput& in,
                                 const FitConfig& config) {
  if (obs.empty()) throw InsufficientData("no contested races in partition");
  const EffectLambdas lambdas = config.lambdas ? *config.lambdas : grid_search(obs, config);
  const Design design(obs);
  ImputationModel m = design.to_model(design.solve(lambdas), lambdas);

  double rss = 0.0;
  for (const auto& o : obs) {
    const double r = o.share - predict_observation(m, o);
    rss += r * r;
  }
  m.residual_sd = std::sqrt(rss / static_cast<double>(obs.size()));

  for (const auto& [dk, winners] : in.winners) {
    const DistrictHolding h = holding_of(winners);
    if (auto it = m.district_effects.find(dk); it != m.district_effects.end()) {
      it->second.holding = h;
      it->second.n_contested = in.n_contested.at(dk);
    } else if (in.n_contested.at(dk) == 0) {
      m.uncontested_districts[dk] = h;
    }
  }
  // Districts whose contested races were all withheld (cross-validation)
  // are neither fitted nor never-contested; leave them out of both maps.
  return m;
}

}  // namespace

double ImputationModel::predict(const DistrictRaceRecord& r, const std::string& cycle_id,
                                std::optional<double> district_effect) const {
  const DistrictKey dk{r.state, r.district_id, cycle_id};
  if (!district_effect) {
    const auto it = district_effects.find(dk);
    if (it == district_effects.end()) throw MissingEffect(to_string(dk));
    district_effect = it->second.effect;
  }
  double y = intercept + lookup_or_zero(state_effects, r.state) +
             lookup_or_zero(year_effects, r.year) + *district_effect;
  if (r.winner == Party::D) y += beta_win_d;
  if (r.winner == Party::R) y += beta_win_r;
  if (r.dem_incumbent) y += beta_inc_d;
  if (r.rep_incumbent) y += beta_inc_r;
  return y;
}

ImputationModel fit(std::span<const ElectionGroup> groups, const FitConfig& config) {
  const FitInput in = collect(groups);
  return fit_observations(in.contested, in, config);
}

double clamp_imputed(double raw_share, Party winner) {
  double y = raw_share;
  if (winner == Party::D && y <= 0.5) {
    y = kDemWinnerFloor;
  } else if (winner == Party::R && y > 0.5) {
    y = kDemLoserCeiling;
  }
  return std::clamp(y, kShareClipLow, kShareClipHigh);
}

double impute_share(const ImputationModel& model, const DistrictRaceRecord& r,
                    const std::string& cycle_id, std::optional<double> district_effect) {
  return clamp_imputed(model.predict(r, cycle_id, district_effect), r.winner);
}

double fallback_district_effect(const ImputationModel& model, DistrictHolding holding,
                                std::uint64_t seed) {
  std::vector<double> pool;
  for (const auto& [key, d] : model.district_effects) {
    if (holding == DistrictHolding::mixed || d.holding == holding) pool.push_back(d.effect);
  }
  if (pool.empty()) throw EmptyEffectPool();
  Rng rng(seed);
  return pool[rng.index(pool.size())];
}

double uniform_baseline(const DistrictRaceRecord& r, double winner_share) {
  return r.winner == Party::D ? winner_share : 1.0 - winner_share;
}

CrossValidation cross_validate(std::span<const ElectionGroup> groups, const FitConfig& config,
                               std::uint64_t seed, std::size_t n_holdout,
                               double baseline_share) {
  const FitInput in = collect(groups);
  const auto& all = in.contested;
  if (all.size() < 2) throw InsufficientData("cross-validation needs at least 2 contested races");

  std::vector<std::size_t> order(all.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);

  const std::size_t want = std::min(n_holdout, all.size() - 1);
  std::map<DistrictKey, std::size_t> remaining = in.n_contested;
  std::vector<bool> held(all.size(), false);
  std::size_t n_held = 0;
  for (const auto i : order) {
    if (n_held == want) break;
    auto& left = remaining[all[i].district];
    if (left < 2) continue;
    --left;
    held[i] = true;
    ++n_held;
  }
  if (n_held == 0 && want > 0) {
    held[order.front()] = true;
    n_held = 1;
  }

  std::vector<Observation> training;
  std::vector<Observation> test;
  for (std::size_t i = 0; i < all.size(); ++i) (held[i] ? test : training).push_back(all[i]);

  const ImputationModel m = fit_observations(training, in, config);
  CrossValidation cv;
  cv.n_held_out = test.size();
  double model_sq = 0.0;
  double base_sq = 0.0;
  for (const auto& o : test) {
    const Party winner = o.win_d ? Party::D : Party::R;
    const double imputed = clamp_imputed(predict_observation(m, o), winner);
    const double base = winner == Party::D ? baseline_share : 1.0 - baseline_share;
    model_sq += (o.share - imputed) * (o.share - imputed);
    base_sq += (o.share - base) * (o.share - base);
  }
  const auto n = static_cast<double>(test.size());
  cv.model_rmse = std::sqrt(model_sq / n);
  cv.baseline_rmse = std::sqrt(base_sq / n);
  return cv;
}

std::size_t ResolvedElection::n_imputed() const {
  return static_cast<std::size_t>(std::count(imputed.begin(), imputed.end(), true));
}

ResolvedElection resolve_group(const ElectionGroup& group, const ImputeStrategy& strategy,
                               const ImputationModel* model, std::uint64_t seed) {
  ResolvedElection out;
  out.key = group.key;
  for (const auto& r : group.records) {
    out.district_ids.push_back(r.district_id);
    if (const auto share = two_party_share(r)) {
      double s = *share;
      if (r.winner == Party::D && s <= 0.5) s = kDemWinnerFloor;
      out.shares.push_back(s);
      out.imputed.push_back(false);
      continue;
    }
    double s = 0.0;
    switch (strategy.kind) {
      case ImputeStrategy::Kind::none:
        s = r.winner == Party::D ? 1.0 : 0.0;
        break;
      case ImputeStrategy::Kind::uniform:
        s = uniform_baseline(r, strategy.uniform_share);
        break;
      case ImputeStrategy::Kind::model: {
        if (model == nullptr) throw InsufficientData("no model fitted for " + to_string(group.key));
        const DistrictKey dk{r.state, r.district_id, group.key.cycle_id};
        std::optional<double> effect;
        if (!model->district_effects.contains(dk)) {
          const auto it = model->uncontested_districts.find(dk);
          const DistrictHolding h =
              it == model->uncontested_districts.end() ? DistrictHolding::mixed : it->second;
          effect = fallback_district_effect(*model, h, mix_seed(seed, stable_hash(to_string(dk))));
        }
        s = impute_share(*model, r, group.key.cycle_id, effect);
        break;
      }
    }
    out.shares.push_back(s);
    out.imputed.push_back(true);
  }
  return out;
}

PartitionKey partition_of(const ElectionKey& key) {
  return {key.chamber, CycleTable::default_cycle(key.year)};
}

std::string to_string(const PartitionKey& key) {
  return std::string(to_string(key.chamber)) + ":" + key.era;
}

SensitivityReport sensitivity_shift(std::span<const ResolvedElection> elections, double shift) {
  SensitivityReport rep;
  for (const auto& e : elections) {
    if (e.shares.empty()) continue;
    const auto before = declination(Election(e.shares));
    std::vector<double> shifted = e.shares;
    for (std::size_t i = 0; i < shifted.size(); ++i) {
      if (e.imputed[i]) shifted[i] = std::clamp(shifted[i] + shift, 0.0, 1.0);
    }
    const auto after = declination(Election(std::move(shifted)));
    if (!before || !after) continue;
    rep.points.push_back({e.key,
                          static_cast<double>(e.n_imputed()) / static_cast<double>(e.shares.size()),
                          *after - *before});
  }
  if (rep.points.size() < 2) return rep;

  const auto n = static_cast<double>(rep.points.size());
  double mx = 0.0;
  double my = 0.0;
  for (const auto& p : rep.points) {
    mx += p.imputed_fraction;
    my += p.declination_change;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (const auto& p : rep.points) {
    const double dx = p.imputed_fraction - mx;
    const double dy = p.declination_change - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx <= 0.0) return rep;
  rep.slope = sxy / sxx;
  rep.intercept = my - *rep.slope * mx;
  if (syy > 0.0) rep.r_squared = sxy * sxy / (sxx * syy);
  return rep;
}

}  // namespace gerry
