#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numeric>
#include <set>

#include "gerry/error.hpp"
#include "gerry/impute.hpp"
#include "gerry/metrics.hpp"
#include "oracle.hpp"
#include "synthetic.hpp"

using namespace gerry;

namespace {

DistrictRaceRecord race(std::string district, int year, std::optional<std::int64_t> dem,
                        std::optional<std::int64_t> rep, Party winner, std::string state = "PA") {
  DistrictRaceRecord r;
  r.state = std::move(state);
  r.year = year;
  r.district_id = std::move(district);
  r.dem_votes = dem;
  r.rep_votes = rep;
  r.winner = winner;
  return r;
}

std::vector<ElectionGroup> groups_of(const std::vector<DistrictRaceRecord>& recs) {
  return group_elections(recs);
}

template <typename Map>
double family_sum(const Map& m) {
  double s = 0.0;
  for (const auto& [k, v] : m) s += v;
  return s;
}

double district_sum(const ImputationModel& m) {
  double s = 0.0;
  for (const auto& [k, v] : m.district_effects) s += v.effect;
  return s;
}

ImputationModel hand_model() {
  ImputationModel m;
  m.district_effects[{"PA", "1", "2012"}] = {0.10, DistrictHolding::held_by_d, 3};
  m.district_effects[{"PA", "2", "2012"}] = {0.12, DistrictHolding::held_by_d, 3};
  m.district_effects[{"PA", "3", "2012"}] = {-0.20, DistrictHolding::held_by_r, 3};
  m.district_effects[{"PA", "4", "2012"}] = {0.01, DistrictHolding::mixed, 3};
  return m;
}

// Ordinary least squares on a full-rank reference coding: W_D, W_R, I_D,
// I_R, one dummy per district but the first (states are nested in
// districts), one dummy per year but the first.
struct OlsFit {
  Eigen::VectorXd beta;
  Eigen::MatrixXd cov;
};

OlsFit ols(const std::vector<DistrictRaceRecord>& recs) {
  std::map<std::string, int> district_col;
  std::map<int, int> year_col;
  for (const auto& r : recs) {
    district_col.try_emplace(r.state + "/" + r.district_id, 0);
    year_col.try_emplace(r.year, 0);
  }
  int col = 4;
  bool first = true;
  for (auto& [k, c] : district_col) c = first ? (first = false, -1) : col++;
  first = true;
  for (auto& [k, c] : year_col) c = first ? (first = false, -1) : col++;
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(recs.size()), col);
  Eigen::VectorXd y(static_cast<Eigen::Index>(recs.size()));
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const auto& r = recs[i];
    const auto row = static_cast<Eigen::Index>(i);
    x(row, r.winner == Party::D ? 0 : 1) = 1.0;
    x(row, 2) = r.dem_incumbent;
    x(row, 3) = r.rep_incumbent;
    if (const int c = district_col[r.state + "/" + r.district_id]; c >= 0) x(row, c) = 1.0;
    if (const int c = year_col[r.year]; c >= 0) x(row, c) = 1.0;
    y[row] = *two_party_share(r);
  }
  const Eigen::MatrixXd xtx = x.transpose() * x;
  const Eigen::MatrixXd inv = xtx.inverse();
  OlsFit out;
  out.beta = inv * x.transpose() * y;
  const Eigen::VectorXd resid = y - x * out.beta;
  const double sigma2 = resid.squaredNorm() / static_cast<double>(x.rows() - x.cols());
  out.cov = sigma2 * inv;
  return out;
}

}  // namespace

TEST(Clamp, WinnerConsistency) {
  EXPECT_EQ(clamp_imputed(0.49, Party::D), 0.505);
  EXPECT_EQ(clamp_imputed(0.50, Party::D), 0.505);
  EXPECT_EQ(clamp_imputed(0.62, Party::R), 0.495);
  EXPECT_EQ(clamp_imputed(0.5000001, Party::R), 0.495);
  EXPECT_EQ(clamp_imputed(0.63, Party::D), 0.63);
  EXPECT_EQ(clamp_imputed(0.50, Party::R), 0.50);
}

TEST(Clamp, ClipsExtremes) {
  EXPECT_EQ(clamp_imputed(1.3, Party::D), 0.995);
  EXPECT_EQ(clamp_imputed(-0.2, Party::R), 0.005);
}

TEST(Clamp, TotalOverRandomInputs) {
  Rng rng(4);
  for (int i = 0; i < 10000; ++i) {
    const double raw = rng.uniform(-1.0, 2.0);
    const Party w = rng.coin() ? Party::D : Party::R;
    const double y = clamp_imputed(raw, w);
    EXPECT_GE(y, 0.005);
    EXPECT_LE(y, 0.995);
    EXPECT_EQ(y > 0.5, w == Party::D);
  }
}

TEST(UniformBaseline, Examples) {
  EXPECT_EQ(uniform_baseline(race("1", 2012, 5, std::nullopt, Party::D)), 0.65);
  EXPECT_NEAR(uniform_baseline(race("1", 2012, std::nullopt, 5, Party::R)), 0.35, 1e-15);
  EXPECT_EQ(uniform_baseline(race("1", 2012, 5, std::nullopt, Party::D), 0.5), 0.5);
  EXPECT_EQ(uniform_baseline(race("1", 2012, std::nullopt, 5, Party::R), 0.5), 0.5);
}

TEST(Fit, SingleRaceFitExactly) {
  const auto groups = groups_of({race("1", 2012, 60, 40, Party::D)});
  const ImputationModel m = fit(groups);
  EXPECT_EQ(m.n_observations, 1u);
  EXPECT_NEAR(m.predict(groups[0].records[0], groups[0].key.cycle_id), 0.6, 1e-12);
  EXPECT_NEAR(m.state_effects.at("PA"), 0.0, 1e-15);
  EXPECT_NEAR(m.year_effects.at(2012), 0.0, 1e-15);
  EXPECT_NEAR(district_sum(m), 0.0, 1e-15);
  EXPECT_NEAR(m.residual_sd, 0.0, 1e-12);
}

TEST(Fit, AllHalfGivesZeroModel) {
  std::vector<DistrictRaceRecord> recs;
  for (int d = 0; d < 6; ++d) {
    for (const int y : {2012, 2014}) recs.push_back(race(std::to_string(d), y, 100, 100, d % 2 ? Party::D : Party::R));
  }
  const ImputationModel m = fit(groups_of(recs));
  for (const auto& [k, v] : m.state_effects) EXPECT_NEAR(v, 0.0, 1e-15);
  for (const auto& [k, v] : m.district_effects) EXPECT_NEAR(v.effect, 0.0, 1e-15);
  for (const auto& [k, v] : m.year_effects) EXPECT_NEAR(v, 0.0, 1e-15);
  EXPECT_NEAR(m.beta_win_d, 0.0, 1e-15);
  EXPECT_NEAR(m.beta_win_r, 0.0, 1e-15);
  EXPECT_NEAR(m.beta_inc_d, 0.0, 1e-15);
  EXPECT_NEAR(m.beta_inc_r, 0.0, 1e-15);
}

TEST(Fit, NoContestedRacesIsInsufficient) {
  const auto groups = groups_of({race("1", 2012, 60, std::nullopt, Party::D)});
  EXPECT_THROW(fit(groups), InsufficientData);
  EXPECT_THROW(fit(std::vector<ElectionGroup>{}), InsufficientData);
}

TEST(Fit, ExcludedGroupsAreIgnored) {
  auto recs = std::vector<DistrictRaceRecord>{race("1", 2012, 60, 40, Party::D)};
  recs[0].multi_member = true;
  EXPECT_THROW(fit(groups_of(recs)), InsufficientData);
}

TEST(Fit, RecoversIdentifiableCoefficientsWithinTwoStandardErrors) {
  synthetic::Config cfg;
  cfg.n_states = 4;
  cfg.districts_per_state = 20;
  cfg.seed = 17;
  const auto data = synthetic::generate(cfg);
  FitConfig fc;
  fc.lambdas = EffectLambdas{1e-4, 1e-4, 1e-4, 1e-4};
  const ImputationModel m = fit(groups_of(data.records), fc);
  const OlsFit o = ols(data.records);

  const double se_inc_d = std::sqrt(o.cov(2, 2));
  const double se_inc_r = std::sqrt(o.cov(3, 3));
  const double se_win = std::sqrt(o.cov(0, 0) + o.cov(1, 1) - 2 * o.cov(0, 1));
  const auto& t = data.truth;
  EXPECT_LT(std::abs(m.beta_inc_d - t.inc_d), 2 * se_inc_d);
  EXPECT_LT(std::abs(m.beta_inc_r - t.inc_r), 2 * se_inc_r);
  EXPECT_LT(std::abs((m.beta_win_d - m.beta_win_r) - (t.win_d - t.win_r)), 2 * se_win);

  // The penalized solve converges to the least-squares one as the penalty vanishes.
  EXPECT_NEAR(m.beta_inc_d, o.beta[2], 1e-4);
  EXPECT_NEAR(m.beta_inc_r, o.beta[3], 1e-4);
  EXPECT_NEAR(m.beta_win_d - m.beta_win_r, o.beta[0] - o.beta[1], 1e-4);

  // Year effects are identified up to centering.
  for (const auto& [year, effect] : t.year) {
    EXPECT_NEAR(m.year_effects.at(year), effect, 4 * cfg.noise_sd / std::sqrt(80.0)) << year;
  }
}

TEST(Fit, FamiliesAreCentered) {
  synthetic::Config cfg;
  cfg.n_states = 5;
  cfg.districts_per_state = 12;
  cfg.uncontested_fraction = 0.2;
  const auto data = synthetic::generate(cfg);
  const ImputationModel m = fit(groups_of(data.records));
  EXPECT_NEAR(family_sum(m.state_effects), 0.0, 1e-9);
  EXPECT_NEAR(district_sum(m), 0.0, 1e-9);
  EXPECT_NEAR(family_sum(m.year_effects), 0.0, 1e-9);
  EXPECT_GT(m.residual_sd, 0.0);
  std::set<double> grid{0.01, 0.1, 1.0, 10.0};
  EXPECT_TRUE(grid.contains(m.ridge_lambda.state));
  EXPECT_TRUE(grid.contains(m.ridge_lambda.district));
  EXPECT_TRUE(grid.contains(m.ridge_lambda.year));
  EXPECT_TRUE(grid.contains(m.ridge_lambda.beta));
}

TEST(Fit, Deterministic) {
  synthetic::Config cfg;
  cfg.n_states = 3;
  cfg.districts_per_state = 10;
  cfg.uncontested_fraction = 0.1;
  const auto groups = groups_of(synthetic::generate(cfg).records);
  FitConfig fc;
  fc.seed = 99;
  EXPECT_EQ(fit(groups, fc), fit(groups, fc));
}

TEST(Fit, TracksNeverContestedDistricts) {
  const auto groups = groups_of({race("1", 2012, 60, 40, Party::D), race("2", 2012, 70, std::nullopt, Party::D),
                                 race("2", 2014, 70, std::nullopt, Party::D),
                                 race("3", 2012, std::nullopt, 5, Party::R), race("3", 2014, 70, std::nullopt, Party::D)});
  const ImputationModel m = fit(groups);
  EXPECT_EQ(m.district_effects.size(), 1u);
  ASSERT_EQ(m.uncontested_districts.size(), 2u);
  EXPECT_EQ(m.uncontested_districts.at({"PA", "2", "2012"}), DistrictHolding::held_by_d);
  EXPECT_EQ(m.uncontested_districts.at({"PA", "3", "2012"}), DistrictHolding::mixed);
}

TEST(Predict, UnseenDistrictNeedsEffect) {
  const ImputationModel m = hand_model();
  const auto r = race("9", 2012, 10, std::nullopt, Party::D);
  EXPECT_THROW(m.predict(r, "2012"), MissingEffect);
  EXPECT_NEAR(m.predict(r, "2012", 0.05), 0.55, 1e-15);
  EXPECT_NEAR(impute_share(m, race("3", 2012, std::nullopt, 1, Party::R), "2012"), 0.3, 1e-15);
  EXPECT_EQ(impute_share(m, race("3", 2012, 1, std::nullopt, Party::D), "2012"), 0.505);
}

TEST(Fallback, SamePartyPool) {
  const ImputationModel m = hand_model();
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const double d = fallback_district_effect(m, DistrictHolding::held_by_d, seed);
    EXPECT_TRUE(d == 0.10 || d == 0.12) << d;
    EXPECT_EQ(fallback_district_effect(m, DistrictHolding::held_by_r, seed), -0.20);
  }
}

TEST(Fallback, MixedDrawsFromEveryEffect) {
  const ImputationModel m = hand_model();
  std::set<double> seen;
  for (std::uint64_t seed = 0; seed < 200; ++seed) seen.insert(fallback_district_effect(m, DistrictHolding::mixed, seed));
  EXPECT_EQ(seen, (std::set<double>{0.10, 0.12, -0.20, 0.01}));
}

TEST(Fallback, DeterministicAndEmptyPool) {
  const ImputationModel m = hand_model();
  EXPECT_EQ(fallback_district_effect(m, DistrictHolding::mixed, 5), fallback_district_effect(m, DistrictHolding::mixed, 5));
  ImputationModel only_d;
  only_d.district_effects[{"PA", "1", "2012"}] = {0.1, DistrictHolding::held_by_d, 1};
  EXPECT_THROW(fallback_district_effect(only_d, DistrictHolding::held_by_r, 1), EmptyEffectPool);
  EXPECT_THROW(fallback_district_effect(ImputationModel{}, DistrictHolding::mixed, 1), EmptyEffectPool);
}

TEST(CrossValidate, ModelBeatsBaseline) {
  synthetic::Config cfg;
  cfg.n_states = 5;
  cfg.districts_per_state = 20;
  const auto groups = groups_of(synthetic::generate(cfg).records);
  const CrossValidation cv = cross_validate(groups, FitConfig{}, 3);
  EXPECT_EQ(cv.n_held_out, 100u);
  EXPECT_LT(cv.model_rmse, 0.07);
  EXPECT_LT(cv.model_rmse, cv.baseline_rmse);
}

TEST(CrossValidate, NoiselessDataFitsAlmostExactly) {
  synthetic::Config cfg;
  cfg.n_states = 3;
  cfg.districts_per_state = 15;
  cfg.noise_sd = 0.0;
  cfg.winner_noise_sd = 0.0;
  const auto groups = groups_of(synthetic::generate(cfg).records);
  FitConfig fc;
  fc.lambdas = EffectLambdas{1e-4, 1e-4, 1e-4, 1e-4};
  const CrossValidation cv = cross_validate(groups, fc, 3);
  EXPECT_LT(cv.model_rmse, 1e-3);
}

TEST(CrossValidate, BaselineExactWhenWinnersGetSixtyFive) {
  std::vector<DistrictRaceRecord> recs;
  for (int d = 0; d < 10; ++d) {
    for (const int y : {2012, 2014, 2016}) {
      recs.push_back(d % 2 ? race(std::to_string(d), y, 65, 35, Party::D) : race(std::to_string(d), y, 35, 65, Party::R));
    }
  }
  const CrossValidation cv = cross_validate(groups_of(recs), FitConfig{}, 1, 10);
  EXPECT_EQ(cv.n_held_out, 10u);
  EXPECT_NEAR(cv.baseline_rmse, 0.0, 1e-15);
}

TEST(CrossValidate, NeedsTwoContestedRaces) {
  EXPECT_THROW(cross_validate(groups_of({race("1", 2012, 60, 40, Party::D)}), FitConfig{}, 1), InsufficientData);
}

TEST(ResolveGroup, Strategies) {
  const auto groups = groups_of({race("1", 2012, 10, 10, Party::D), race("2", 2012, 10, 10, Party::R),
                                 race("3", 2012, 60, std::nullopt, Party::D),
                                 race("4", 2012, std::nullopt, 60, Party::R)});
  ASSERT_EQ(groups.size(), 1u);
  const auto none = resolve_group(groups[0], {ImputeStrategy::Kind::none}, nullptr, 0);
  EXPECT_EQ(none.shares, (std::vector<double>{0.505, 0.5, 1.0, 0.0}));
  EXPECT_EQ(none.imputed, (std::vector<bool>{false, false, true, true}));
  EXPECT_EQ(none.n_imputed(), 2u);

  const auto uni = resolve_group(groups[0], {ImputeStrategy::Kind::uniform, 0.7}, nullptr, 0);
  EXPECT_EQ(uni.shares[2], 0.7);
  EXPECT_NEAR(uni.shares[3], 0.3, 1e-15);

  EXPECT_THROW(resolve_group(groups[0], {ImputeStrategy::Kind::model}, nullptr, 0), InsufficientData);
}

TEST(ResolveGroup, ModelUsesFallbackForUnseenDistricts) {
  const ImputationModel m = hand_model();
  const auto groups = groups_of({race("1", 2012, 40, std::nullopt, Party::D), race("7", 2012, 40, std::nullopt, Party::D)});
  const auto a = resolve_group(groups[0], {ImputeStrategy::Kind::model}, &m, 11);
  const auto b = resolve_group(groups[0], {ImputeStrategy::Kind::model}, &m, 11);
  EXPECT_EQ(a.shares, b.shares);
  EXPECT_NEAR(a.shares[0], 0.6, 1e-15);
  bool matched = false;
  for (const double effect : {0.10, 0.12, -0.20, 0.01}) {
    matched = matched || std::abs(a.shares[1] - clamp_imputed(0.5 + effect, Party::D)) < 1e-15;
  }
  EXPECT_TRUE(matched) << a.shares[1];
}

TEST(Partition, ChamberAndEra) {
  const PartitionKey p = partition_of({"TX", Chamber::congress, 1996, "TX1"});
  EXPECT_EQ(p.era, "1992");
  EXPECT_EQ(to_string(p), "congress:1992");
  EXPECT_EQ(partition_of({"TX", Chamber::congress, 1998, "TX2"}), p);
  EXPECT_NE(partition_of({"TX", Chamber::state_lower, 1998, "TX2"}), p);
}

TEST(Sensitivity, ZeroShiftAndNoImputation) {
  ResolvedElection a{{"PA", Chamber::congress, 2012, "2012"}, {"1", "2", "3"}, {0.3, 0.6, 0.7}, {true, false, false}};
  ResolvedElection b{{"OH", Chamber::congress, 2012, "2012"}, {"1", "2", "3"}, {0.3, 0.4, 0.7}, {false, false, false}};
  const std::vector<ResolvedElection> es{a, b};
  const SensitivityReport zero = sensitivity_shift(es, 0.0);
  ASSERT_EQ(zero.points.size(), 2u);
  for (const auto& p : zero.points) EXPECT_EQ(p.declination_change, 0.0);
  ASSERT_TRUE(zero.slope.has_value());
  EXPECT_EQ(*zero.slope, 0.0);

  const SensitivityReport shifted = sensitivity_shift(es, 0.03);
  EXPECT_EQ(shifted.points[1].declination_change, 0.0);
  EXPECT_NE(shifted.points[0].declination_change, 0.0);
}

TEST(Sensitivity, SlopePositiveForPositiveShift) {
  std::vector<ResolvedElection> es;
  for (int m = 0; m <= 8; ++m) {
    ResolvedElection e;
    e.key = {"S" + std::to_string(m), Chamber::congress, 2012, "2012"};
    for (int i = 0; i < 10; ++i) {
      e.district_ids.push_back(std::to_string(i));
      e.shares.push_back(i % 2 ? 0.7 : 0.3);
      e.imputed.push_back(i < m);
    }
    es.push_back(e);
  }
  const double shift = 0.03;
  const SensitivityReport rep = sensitivity_shift(es, shift);
  ASSERT_EQ(rep.points.size(), es.size());
  for (std::size_t j = 0; j < es.size(); ++j) {
    std::vector<double> after = es[j].shares;
    for (std::size_t i = 0; i < after.size(); ++i) {
      if (es[j].imputed[i]) after[i] += shift;
    }
    const auto expected = *oracle::declination(after) - *oracle::declination(es[j].shares);
    EXPECT_NEAR(rep.points[j].declination_change, static_cast<double>(expected), 1e-12);
    EXPECT_NEAR(rep.points[j].imputed_fraction, static_cast<double>(j) / 10.0, 1e-15);
  }
  ASSERT_TRUE(rep.slope.has_value());
  EXPECT_GT(*rep.slope, 0.0);
}

TEST(Sensitivity, SweepsAreOmitted) {
  ResolvedElection sweep{{"PA", Chamber::congress, 2012, "2012"}, {"1", "2"}, {0.6, 0.7}, {true, true}};
  EXPECT_TRUE(sensitivity_shift(std::vector<ResolvedElection>{sweep}, 0.03).points.empty());
}
