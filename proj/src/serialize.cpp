#include "gerry/serialize.hpp"

#include <charconv>

#include "gerry/error.hpp"

namespace gerry {

namespace {

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::string_view holding_name(DistrictHolding h) {
  switch (h) {
    case DistrictHolding::held_by_d:
      return "D";
    case DistrictHolding::held_by_r:
      return "R";
    case DistrictHolding::mixed:
      break;
  }
  return "mixed";
}

DistrictHolding parse_holding(const std::string& s) {
  if (s == "D") return DistrictHolding::held_by_d;
  if (s == "R") return DistrictHolding::held_by_r;
  if (s == "mixed") return DistrictHolding::mixed;
  throw Error("unknown district holding: " + s);
}

template <typename Plan>
void plan_to_json(Json& j, const Plan& p) {
  j = Json{{"source_index", p.source_index},
           {"new_source_share", p.new_source_share},
           {"allocation", p.allocation}};
}

template <typename Plan>
void plan_from_json(const Json& j, Plan& p) {
  j.at("source_index").get_to(p.source_index);
  j.at("new_source_share").get_to(p.new_source_share);
  j.at("allocation").get_to(p.allocation);
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void to_json(Json& j, const MetricSet& m) {
  Json gaps = Json::object();
  for (const auto& [tau, gap] : m.tau_gaps) gaps[format_number(tau)] = gap;
  j = Json{{"n_districts", m.n_districts},
           {"declination", optional_number(m.declination)},
           {"delta_n", optional_number(m.delta_n)},
           {"delta_tilde", optional_number(m.delta_tilde)},
           {"efficiency_gap", m.efficiency_gap},
           {"tau_gaps", gaps},
           {"tau_gap_limit", m.tau_gap_limit},
           {"mean_median", m.mean_median},
           {"seat_share_p", m.seat_share_p},
           {"vote_share_p", m.vote_share_p}};
}

void to_json(Json& j, const CrackPlan& p) { plan_to_json(j, p); }
void from_json(const Json& j, CrackPlan& p) { plan_from_json(j, p); }
void to_json(Json& j, const PackPlan& p) { plan_to_json(j, p); }
void from_json(const Json& j, PackPlan& p) { plan_from_json(j, p); }

void to_json(Json& j, const ElectionKey& k) {
  j = Json{{"state", k.state},
           {"chamber", to_string(k.chamber)},
           {"year", k.year},
           {"cycle_id", k.cycle_id}};
}

void to_json(Json& j, const ImputationModel& m) {
  Json districts = Json::array();
  for (const auto& [key, d] : m.district_effects) {
    districts.push_back({{"state", key.state},
                         {"district", key.district_id},
                         {"cycle_id", key.cycle_id},
                         {"effect", d.effect},
                         {"holding", holding_name(d.holding)},
                         {"n_contested", d.n_contested}});
  }
  Json never = Json::array();
  for (const auto& [key, h] : m.uncontested_districts) {
    never.push_back({{"state", key.state},
                     {"district", key.district_id},
                     {"cycle_id", key.cycle_id},
                     {"holding", holding_name(h)}});
  }
  Json years = Json::object();
  for (const auto& [year, v] : m.year_effects) years[std::to_string(year)] = v;
  j = Json{{"intercept", ImputationModel::intercept},
           {"state_effects", m.state_effects},
           {"district_effects", districts},
           {"year_effects", years},
           {"uncontested_districts", never},
           {"beta_win_d", m.beta_win_d},
           {"beta_win_r", m.beta_win_r},
           {"beta_inc_d", m.beta_inc_d},
           {"beta_inc_r", m.beta_inc_r},
           {"ridge_lambda",
            {{"state", m.ridge_lambda.state},
             {"district", m.ridge_lambda.district},
             {"year", m.ridge_lambda.year},
             {"beta", m.ridge_lambda.beta}}},
           {"residual_sd", m.residual_sd},
           {"n_observations", m.n_observations}};
}

void from_json(const Json& j, ImputationModel& m) {
  m = ImputationModel{};
  j.at("state_effects").get_to(m.state_effects);
  for (const auto& d : j.at("district_effects")) {
    DistrictKey key{d.at("state").get<std::string>(), d.at("district").get<std::string>(),
                    d.at("cycle_id").get<std::string>()};
    m.district_effects[key] = {d.at("effect").get<double>(),
                               parse_holding(d.at("holding").get<std::string>()),
                               d.at("n_contested").get<std::size_t>()};
  }
  for (const auto& [year, v] : j.at("year_effects").items()) {
    m.year_effects[std::stoi(year)] = v.get<double>();
  }
  for (const auto& d : j.at("uncontested_districts")) {
    DistrictKey key{d.at("state").get<std::string>(), d.at("district").get<std::string>(),
                    d.at("cycle_id").get<std::string>()};
    m.uncontested_districts[key] = parse_holding(d.at("holding").get<std::string>());
  }
  j.at("beta_win_d").get_to(m.beta_win_d);
  j.at("beta_win_r").get_to(m.beta_win_r);
  j.at("beta_inc_d").get_to(m.beta_inc_d);
  j.at("beta_inc_r").get_to(m.beta_inc_r);
  const auto& l = j.at("ridge_lambda");
  m.ridge_lambda = {l.at("state").get<double>(), l.at("district").get<double>(),
                    l.at("year").get<double>(), l.at("beta").get<double>()};
  j.at("residual_sd").get_to(m.residual_sd);
  j.at("n_observations").get_to(m.n_observations);
}

void to_json(Json& j, const CrossValidation& cv) {
  j = Json{{"n_held_out", cv.n_held_out},
           {"model_rmse", cv.model_rmse},
           {"baseline_rmse", cv.baseline_rmse}};
}

void to_json(Json& j, const SensitivityReport& r) {
  Json points = Json::array();
  for (const auto& p : r.points) {
    points.push_back({{"election", p.key},
                      {"imputed_fraction", p.imputed_fraction},
                      {"declination_change", p.declination_change}});
  }
  j = Json{{"points", points},
           {"slope", optional_number(r.slope)},
           {"intercept", optional_number(r.intercept)},
           {"r_squared", optional_number(r.r_squared)}};
}

void to_json(Json& j, const ElectionRow& r) {
  j = Json{{"state", r.key.state},
           {"chamber", to_string(r.key.chamber)},
           {"year", r.key.year},
           {"cycle_id", r.key.cycle_id},
           {"seats", r.seats},
           {"delta_tilde", optional_number(r.delta_tilde)},
           {"declination", optional_number(r.declination)},
           {"delta_n", optional_number(r.delta_n)},
           {"efficiency_gap", r.efficiency_gap}};
  for (const auto& [tau, gap] : r.tau_gaps) j["gap_tau_" + format_number(tau)] = gap;
  j["mean_median"] = r.mean_median;
  j["seat_share_p"] = r.seat_share_p;
  j["vote_share_p"] = r.vote_share_p;
  j["n_imputed"] = r.n_imputed;
}

void to_json(Json& j, const CycleSummary& s) {
  Json values = Json::array();
  for (const auto& [year, v] : s.values) values.push_back({{"year", year}, {"delta_tilde", v}});
  j = Json{{"state", s.state},
           {"chamber", to_string(s.chamber)},
           {"cycle_id", s.cycle_id},
           {"values", values},
           {"min", s.min},
           {"max", s.max},
           {"sign_persistent", s.sign_persistent},
           {"n_defined", s.n_defined}};
}

}  // namespace gerry
