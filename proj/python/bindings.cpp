#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "gerry/batch.hpp"
#include "gerry/error.hpp"
#include "gerry/impute.hpp"
#include "gerry/metrics.hpp"
#include "gerry/serialize.hpp"
#include "gerry/theorem_check.hpp"
#include "gerry/transforms.hpp"

namespace py = pybind11;
using namespace gerry;

namespace {

py::object to_python(const Json& j) {
  switch (j.type()) {
    case Json::value_t::null:
      return py::none();
    case Json::value_t::boolean:
      return py::bool_(j.get<bool>());
    case Json::value_t::number_integer:
      return py::int_(j.get<std::int64_t>());
    case Json::value_t::number_unsigned:
      return py::int_(j.get<std::uint64_t>());
    case Json::value_t::number_float:
      return py::float_(j.get<double>());
    case Json::value_t::string:
      return py::str(j.get<std::string>());
    case Json::value_t::array: {
      py::list out;
      for (const auto& v : j) out.append(to_python(v));
      return out;
    }
    default: {
      py::dict out;
      for (const auto& [k, v] : j.items()) out[py::str(k)] = to_python(v);
      return out;
    }
  }
}

Election election(const std::vector<double>& shares) { return make_election(shares); }

Party party(const std::string& s) {
  if (s == "D") return Party::D;
  if (s == "R") return Party::R;
  throw Error("winner must be \"D\" or \"R\", got \"" + s + "\"");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Partisan asymmetry metrics, packing/cracking checks and batch reports.";

  static py::exception<Error> error(m, "GerryError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      error(e.what());
    }
  });

  m.def("declination", [](const std::vector<double>& s) { return declination(election(s)); }, py::arg("shares"));
  m.def("delta_n", [](const std::vector<double>& s) { return delta_n(election(s)); }, py::arg("shares"));
  m.def("delta_tilde", [](const std::vector<double>& s) { return delta_tilde(election(s)); }, py::arg("shares"));
  m.def("efficiency_gap", [](const std::vector<double>& s) { return efficiency_gap(election(s)); }, py::arg("shares"));
  m.def("tau_gap", [](const std::vector<double>& s, double tau) { return tau_gap(election(s), tau); },
        py::arg("shares"), py::arg("tau"));
  m.def("tau_gap_limit", [](const std::vector<double>& s) { return tau_gap_limit(election(s)); }, py::arg("shares"));
  m.def("mean_median", [](const std::vector<double>& s) { return mean_median(election(s)); }, py::arg("shares"));
  m.def("seat_share", [](const std::vector<double>& s) { return seat_share(election(s)); }, py::arg("shares"));
  m.def("vote_share", [](const std::vector<double>& s) { return vote_share(election(s)); }, py::arg("shares"));
  m.def(
      "metrics",
      [](const std::vector<double>& s, const std::vector<double>& taus) {
        Json j;
        to_json(j, metric_set(election(s), taus));
        return to_python(j);
      },
      py::arg("shares"), py::arg("taus") = std::vector<double>{0.0, 0.4, 1.0, 2.0});

  m.def("mirror_q", [](const std::vector<double>& s) {
    const auto e = mirror_q(election(s));
    return std::vector<double>(e.shares().begin(), e.shares().end());
  }, py::arg("shares"));
  m.def(
      "apply_crack",
      [](const std::vector<double>& s, std::size_t source_index, double new_source_share,
         const std::vector<double>& allocation) {
        const auto e = apply_crack(election(s), CrackPlan{source_index, new_source_share, allocation});
        return std::vector<double>(e.shares().begin(), e.shares().end());
      },
      py::arg("shares"), py::arg("source_index"), py::arg("new_source_share"), py::arg("allocation"));
  m.def(
      "apply_pack",
      [](const std::vector<double>& s, std::size_t source_index, double new_source_share,
         const std::vector<double>& allocation) {
        const auto e = apply_pack(election(s), PackPlan{source_index, new_source_share, allocation});
        return std::vector<double>(e.shares().begin(), e.shares().end());
      },
      py::arg("shares"), py::arg("source_index"), py::arg("new_source_share"), py::arg("allocation"));

  m.def(
      "theorem_check",
      [](std::size_t trials, std::uint64_t seed) {
        TheoremCheckConfig cfg;
        cfg.trials = trials;
        cfg.seed = seed;
        return to_python(Json::parse(to_json_text(theorem_check(cfg))));
      },
      py::arg("trials") = 1000, py::arg("seed") = 7);

  m.def("clamp_imputed", [](double raw, const std::string& winner) { return clamp_imputed(raw, party(winner)); },
        py::arg("raw_share"), py::arg("winner"));

  m.def(
      "run_batch",
      [](const std::filesystem::path& input, const std::filesystem::path& out_dir,
         std::optional<std::filesystem::path> cycles, const std::string& impute, std::vector<double> taus,
         std::uint64_t seed, bool svg, std::optional<double> shift) {
        BatchOptions opt;
        opt.input = input;
        opt.out_dir = out_dir;
        opt.cycles = std::move(cycles);
        opt.strategy = parse_strategy(impute);
        opt.taus = std::move(taus);
        opt.seed = seed;
        opt.svg = svg;
        opt.shift = shift;
        BatchSummary s;
        {
          py::gil_scoped_release release;
          s = run_batch(opt);
        }
        py::dict out;
        out["records"] = s.records;
        out["row_errors"] = s.row_errors;
        out["groups"] = s.groups;
        out["rows"] = s.rows;
        out["group_errors"] = s.group_errors;
        out["exclusions"] = s.exclusions;
        out["svgs"] = s.svgs;
        return out;
      },
      py::arg("input"), py::arg("out_dir"), py::arg("cycles") = py::none(), py::arg("impute") = "model",
      py::arg("taus") = std::vector<double>{0.0, 0.4, 1.0, 2.0}, py::arg("seed") = 0, py::arg("svg") = false,
      py::arg("shift") = py::none());
}
