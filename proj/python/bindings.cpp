#include "bblab/errors.hpp"
#include "bblab/estimate.hpp"
#include "bblab/flow.hpp"
#include "cli.hpp"

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace bblab;

namespace {

AttractorChoice attractor_choice(const std::string& s) {
  if (s == "auto") return AttractorChoice::automatic;
  if (s == "pushforward") return AttractorChoice::conformal_pushforward;
  if (s == "tangential") return AttractorChoice::tangential_projection;
  throw ConfigError("unknown attractor '" + s + "'");
}

SurfacePatch surface(const std::string& key, const ParamMap& params, Complex mobius) {
  SurfacePatch s = make_surface(key, params);
  return mobius == Complex(0.0, 0.0) ? s : s.recentred(mobius);
}

py::dict estimate_dict(const EstimateReport& r) {
  py::dict d;
  d["lhs"] = r.lhs;
  d["rhs"] = r.rhs;
  d["slack"] = r.slack;
  d["attractor"] = std::string(to_string(r.attractor_kind));
  return d;
}

std::vector<Complex> to_list(const ComplexVec& v) {
  std::vector<Complex> out;
  for (int k = 0; k < v.size(); ++k) out.push_back(v[k]);
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Surface geometry, attractor flows and the Bieberbach-type estimate";

  static py::exception<Error> base_error(m, "Error", PyExc_RuntimeError);
  static py::exception<ConfigError> config_error(m, "ConfigError", base_error.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConfigError& e) {
      py::set_error(config_error, e.what());
    } catch (const Error& e) {
      py::set_error(base_error, e.what());
    }
  });

  m.def("surface_keys", &surface_keys);
  m.def("surface_defaults", [](const std::string& key) { return surface_defaults(key); }, py::arg("key"));

  m.def(
      "z_derivatives",
      [](const std::string& key, const ParamMap& params, Complex mobius, double x, double y) {
        const ZDerivatives z = complex_z_derivatives(surface(key, params, mobius).jet(x, y));
        return py::make_tuple(to_list(z.fz), to_list(z.fzz));
      },
      py::arg("surface"), py::arg("params") = ParamMap{}, py::arg("mobius") = Complex(0.0, 0.0), py::arg("x") = 0.0,
      py::arg("y") = 0.0, "Wirtinger derivatives (f_z, f_zz) at a chart point.");

  m.def(
      "evaluate_theorem",
      [](const std::string& key, const ParamMap& params, Complex mobius, const std::string& attractor) {
        return estimate_dict(evaluate_theorem(surface(key, params, mobius), attractor_choice(attractor)));
      },
      py::arg("surface"), py::arg("params") = ParamMap{}, py::arg("mobius") = Complex(0.0, 0.0),
      py::arg("attractor") = "auto", "Both sides of the estimate at the chart origin.");

  m.def(
      "theorem_battery",
      [](std::uint64_t seed, int count) {
        py::list out;
        for (const BatteryCase& c : theorem_battery(seed, count)) {
          py::dict d = estimate_dict(evaluate_theorem(build_case(c)));
          d["case_id"] = c.id;
          d["surface"] = c.key;
          d["params"] = c.params;
          d["mobius"] = c.mobius;
          out.append(d);
        }
        return out;
      },
      py::arg("seed") = 2024, py::arg("count") = 120);

  m.def(
      "hessian_identity_residual",
      [](const std::string& key, const ParamMap& params, std::array<double, 2> v, std::array<double, 2> w,
         const std::string& attractor) {
        const SurfacePatch s = make_surface(key, params);
        const TangentAttractor x =
            attractor == "tangential" ? tangential_attractor(s) : theorem_attractor(s, attractor_choice(attractor));
        return hessian_identity_residual(x, Vec2(v[0], v[1]), Vec2(w[0], w[1]));
      },
      py::arg("surface"), py::arg("params") = ParamMap{}, py::arg("v") = std::array<double, 2>{1.0, 0.0},
      py::arg("w") = std::array<double, 2>{0.0, 1.0}, py::arg("attractor") = "auto");

  m.def(
      "bernoulli_variation",
      [](double a, const std::vector<double>& times) {
        const Vec one = Vec::Ones(1);
        const VariationReport r = check_variation_laws(bernoulli_field(a), one, one, times, IntegratorOptions{});
        std::vector<double> second;
        for (const Vec& v : r.trajectory.second_var) second.push_back(v[0]);
        py::dict d;
        d["times"] = r.trajectory.times;
        d["second_var"] = second;
        d["first_var_sup"] = r.first_var_sup;
        d["closed_form_relative_sup"] = r.closed_form_relative_sup;
        return d;
      },
      py::arg("a") = 0.3, py::arg("times") = std::vector<double>{0.0, 1.0, 5.0, 10.0},
      "Integrates x' = -x + a x^2 from 0 with its first and second variations.");

  m.def(
      "helicoid_scan",
      [](const std::vector<double>& r_values, Complex z0) {
        py::list out;
        for (const ScanRow& r : helicoid_scan(r_values, z0)) {
          py::dict d;
          d["R"] = r.R;
          d["naive_ratio"] = r.naive_ratio;
          d["geometric_ratio"] = r.geometric_ratio;
          d["slack"] = r.slack;
          out.append(d);
        }
        return out;
      },
      py::arg("r_values") = std::vector<double>{1.0, 2.0, 4.0, 8.0}, py::arg("z0") = Complex(0.0, 0.0));

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out;
        std::ostringstream err;
        int code = 0;
        {
          py::gil_scoped_release release;
          code = cli::run(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs a command line; returns (exit_code, stdout, stderr).");
}
