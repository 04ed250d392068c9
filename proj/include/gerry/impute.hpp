#pragma once

// Imputation of two-party shares for uncontested races.
//
// The additive model
//
//   y = 1/2 + state + district + year
//       + b_win_d W_D + b_win_r W_R + b_inc_d I_D + b_inc_r I_R + noise
//
// is fitted to contested races by ridge-penalized least squares, one
// penalty per effect family. A shared constant is left unpenalized during
// the solve and folded into b_win_d and b_win_r afterwards (W_D + W_R = 1
// in every race); each effect family is then centered to sum to zero.
// Fits are deterministic: identical inputs and seeds give identical models.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gerry/ingest.hpp"

namespace gerry {

struct DistrictKey {
  std::string state;
  std::string district_id;
  std::string cycle_id;

  friend auto operator<=>(const DistrictKey&, const DistrictKey&) = default;
  friend bool operator==(const DistrictKey&, const DistrictKey&) = default;
};

std::string to_string(const DistrictKey& key);

enum class DistrictHolding { held_by_d, held_by_r, mixed };

DistrictHolding holding_of(std::span<const Party> winners);

struct EffectLambdas {
  double state = 1.0;
  double district = 1.0;
  double year = 1.0;
  double beta = 1.0;

  friend bool operator==(const EffectLambdas&, const EffectLambdas&) = default;
};

struct FitConfig {
  // nullopt: choose per-family penalties by coordinate-wise grid search on
  // a seeded validation split of the contested races.
  std::optional<EffectLambdas> lambdas;
  std::vector<double> lambda_grid{0.01, 0.1, 1.0, 10.0};
  double validation_fraction = 0.1;
  std::uint64_t seed = 0;
};

struct DistrictEffect {
  double effect = 0.0;
  DistrictHolding holding = DistrictHolding::mixed;
  std::size_t n_contested = 0;

  friend bool operator==(const DistrictEffect&, const DistrictEffect&) = default;
};

struct ImputationModel {
  static constexpr double intercept = 0.5;

  std::map<std::string, double> state_effects;
  std::map<DistrictKey, DistrictEffect> district_effects;
  std::map<int, double> year_effects;
  // Districts present in the fit input that had no contested race.
  std::map<DistrictKey, DistrictHolding> uncontested_districts;

  double beta_win_d = 0.0;
  double beta_win_r = 0.0;
  double beta_inc_d = 0.0;
  double beta_inc_r = 0.0;

  EffectLambdas ridge_lambda;
  double residual_sd = 0.0;
  std::size_t n_observations = 0;

  // Unclamped prediction. Unseen states or years contribute 0; an unseen
  // district throws MissingEffect unless district_effect is supplied.
  double predict(const DistrictRaceRecord& r, const std::string& cycle_id,
                 std::optional<double> district_effect = std::nullopt) const;

  bool operator==(const ImputationModel&) const = default;
};

// Fits on the contested races of the non-excluded groups. Throws
// InsufficientData when there are none.
ImputationModel fit(std::span<const ElectionGroup> groups, const FitConfig& config = {});

inline constexpr double kDemWinnerFloor = 0.505;
inline constexpr double kDemLoserCeiling = 0.495;
inline constexpr double kShareClipLow = 0.005;
inline constexpr double kShareClipHigh = 0.995;

// Winner-consistency clamp followed by the [0.005, 0.995] clip.
double clamp_imputed(double raw_share, Party winner);

double impute_share(const ImputationModel& model, const DistrictRaceRecord& r,
                    const std::string& cycle_id,
                    std::optional<double> district_effect = std::nullopt);

// Draws an effect for a district the model never saw contested: from
// districts held by the same party throughout the cycle when the district
// was single-party held, otherwise from every fitted district effect.
// Throws EmptyEffectPool.
double fallback_district_effect(const ImputationModel& model, DistrictHolding holding,
                                std::uint64_t seed);

inline constexpr double kUniformWinnerShare = 0.65;

double uniform_baseline(const DistrictRaceRecord& r, double winner_share = kUniformWinnerShare);

struct CrossValidation {
  std::size_t n_held_out = 0;
  double model_rmse = 0.0;
  double baseline_rmse = 0.0;
};

// Holds out n_holdout contested races (preferring races whose district keeps
// another contested race), refits once without them, and scores the
// clamped imputations against the true shares.
CrossValidation cross_validate(std::span<const ElectionGroup> groups, const FitConfig& config,
                               std::uint64_t seed, std::size_t n_holdout = 100,
                               double baseline_share = kUniformWinnerShare);

struct ImputeStrategy {
  enum class Kind { none, uniform, model };
  Kind kind = Kind::model;
  double uniform_share = kUniformWinnerShare;
};

struct ResolvedElection {
  ElectionKey key;
  std::vector<std::string> district_ids;
  std::vector<double> shares;  // in record order, not sorted
  std::vector<bool> imputed;

  std::size_t n_imputed() const;
};

// Produces a share for every record of the group. Contested ties won by D
// are lifted to 0.505. With kind::none an unopposed winner gets the whole
// two-party vote. kind::model requires a model fitted on this group's
// partition; unseen districts use fallback_district_effect seeded per
// district.
ResolvedElection resolve_group(const ElectionGroup& group, const ImputeStrategy& strategy,
                               const ImputationModel* model, std::uint64_t seed);

// Fitting partition of a group: (chamber, decade cycle of its year).
struct PartitionKey {
  Chamber chamber = Chamber::congress;
  std::string era;

  friend auto operator<=>(const PartitionKey&, const PartitionKey&) = default;
  friend bool operator==(const PartitionKey&, const PartitionKey&) = default;
};

PartitionKey partition_of(const ElectionKey& key);
std::string to_string(const PartitionKey& key);

struct SensitivityPoint {
  ElectionKey key;
  double imputed_fraction = 0.0;
  double declination_change = 0.0;
};

struct SensitivityReport {
  std::vector<SensitivityPoint> points;
  std::optional<double> slope;
  std::optional<double> intercept;
  std::optional<double> r_squared;
};

// Adds shift to every imputed Democratic share (clipped to [0,1]) and
// regresses the change in declination on the imputed fraction. Elections
// whose declination is undefined before or after the shift are omitted.
SensitivityReport sensitivity_shift(std::span<const ResolvedElection> elections, double shift);

}  // namespace gerry
