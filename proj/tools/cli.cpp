#include "cli.hpp"

#include "report.hpp"

#include "bblab/errors.hpp"
#include "bblab/estimate.hpp"
#include "bblab/flow.hpp"
#include "bblab/geometry.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

namespace bblab::cli {

std::map<std::string, double> default_tolerances() {
  return {
      {"slack", kSlackTol},          {"hessian_identity", 1e-5}, {"first_variation", 1e-6},
      {"closed_form", 1e-7},         {"composition", 1e-9},
      {"integrator_rtol", 1e-10},    {"integrator_atol", 1e-12},
  };
}

namespace {

using Tolerances = std::map<std::string, double>;

struct Config {
  std::string format = "csv";
  std::string output;
  // verify-theorem
  std::string surface;
  std::vector<std::string> params;
  std::vector<std::string> mobius;
  std::uint64_t seed = 2024;
  int count = 120;
  std::string attractor = "auto";
  // verify-lemma
  std::string which;
  std::string field = "bernoulli";
  std::string phi = "half";
  std::vector<std::string> phi_params;
  double t_end = 10.0;
  int pairs = 10;
  std::string dump;
  // helicoid-scan
  std::string r_list = "1,2,4,8";
  double x0 = 0.0;
  double y0 = 0.0;
};

double parse_double(const std::string& s, const std::string& what) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  const auto res = std::from_chars(first, last, v);
  if (s.empty() || res.ec != std::errc() || res.ptr != last || !std::isfinite(v)) {
    throw ConfigError("malformed number '" + s + "' for " + what);
  }
  return v;
}

ParamMap parse_params(const std::vector<std::string>& items, const std::string& what) {
  ParamMap out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("expected key=value for " + what + ", got '" + item + "'");
    const std::string key = item.substr(0, eq);
    if (out.contains(key)) throw ConfigError("duplicate " + what + " '" + key + "'");
    out[key] = parse_double(item.substr(eq + 1), what + " '" + key + "'");
  }
  return out;
}

Complex parse_mobius(const std::vector<std::string>& items) {
  ParamMap m = parse_params(items, "mobius parameter");
  Complex a(0.0, 0.0);
  for (const auto& [k, v] : m) {
    if (k == "a") {
      a.real(v);
    } else if (k == "a_im") {
      a.imag(v);
    } else {
      throw ConfigError("unknown mobius parameter '" + k + "' (expected a, a_im)");
    }
  }
  if (std::abs(a) >= 1.0) throw ConfigError("mobius parameter needs |a| < 1");
  return a;
}

std::string describe(const std::string& key, const ParamMap& params) {
  std::string s = key;
  if (params.empty()) return s;
  s += "(";
  bool first = true;
  for (const auto& [k, v] : params) {
    s += (first ? "" : ";") + k + "=" + format_double(v);
    first = false;
  }
  return s + ")";
}

std::string complex_string(Complex a) { return "(" + format_double(a.real()) + "," + format_double(a.imag()) + ")"; }

unsigned thread_cap() {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const char* env = std::getenv("BIEBERBACH_LAB_THREADS");
  if (env == nullptr || *env == '\0') return hw;
  unsigned v = 0;
  const std::string s(env);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || v == 0) {
    throw ConfigError("BIEBERBACH_LAB_THREADS must be a positive integer");
  }
  return v;
}

/// Runs fn(0..n-1) on up to thread_cap() workers. Rethrows the exception of the lowest index.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(thread_cap(), std::max<std::size_t>(n, 1));
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

AttractorChoice parse_attractor(const std::string& s) {
  if (s == "auto") return AttractorChoice::automatic;
  if (s == "pushforward") return AttractorChoice::conformal_pushforward;
  if (s == "tangential") return AttractorChoice::tangential_projection;
  throw ConfigError("unknown attractor '" + s + "' (expected auto, pushforward, tangential)");
}

ReportRow make_row(int id, std::string surface, std::string basepoint, std::string quantity, double value,
                   std::optional<double> reference, double residual, double tol) {
  return {id, std::move(surface), std::move(basepoint), std::move(quantity), value, reference, residual,
          std::isfinite(residual) && residual <= tol};
}

struct Result {
  std::vector<ReportRow> rows;
  std::optional<Table> table;
  bool passed() const {
    return std::all_of(rows.begin(), rows.end(), [](const ReportRow& r) { return r.pass; });
  }
};

Result verify_theorem(const Config& cfg, const Tolerances& tol) {
  const AttractorChoice choice = parse_attractor(cfg.attractor);
  std::vector<BatteryCase> cases;
  if (!cfg.surface.empty()) {
    cases.push_back({0, cfg.surface, parse_params(cfg.params, "surface parameter"), parse_mobius(cfg.mobius)});
  } else {
    if (!cfg.params.empty() || !cfg.mobius.empty()) throw ConfigError("--param and --mobius need --surface");
    if (cfg.count < 2) throw ConfigError("--count must be at least 2");
    cases = theorem_battery(cfg.seed, cfg.count);
  }
  // Reject bad keys and params before any computation.
  std::vector<SurfacePatch> patches;
  for (const auto& c : cases) {
    patches.push_back(build_case(c));
    if (!patches.back().conformal_flag()) throw ConfigError("surface '" + c.key + "' is not conformally parametrized");
  }

  std::vector<std::vector<ReportRow>> per_case(cases.size());
  const double slack_tol = tol.at("slack");
  parallel_for(cases.size(), [&](std::size_t i) {
    const BatteryCase& c = cases[i];
    const std::string name = describe(c.key, c.params);
    const std::string base = complex_string(c.mobius);
    try {
      const EstimateReport r = evaluate_theorem(patches[i], choice);
      const double deficit = std::max(0.0, -r.slack);
      per_case[i] = {make_row(c.id, name, base, "lhs", r.lhs, r.rhs, std::max(0.0, r.lhs - r.rhs), slack_tol),
                     make_row(c.id, name, base, "rhs", r.rhs, std::nullopt, 0.0, slack_tol),
                     make_row(c.id, name, base, "slack", r.slack, 0.0, deficit, slack_tol)};
    } catch (const NotConformal&) {
      throw;
    } catch (const AttractorNotAdmissible&) {
      throw;
    } catch (const Error& e) {
      per_case[i] = {make_row(c.id, name, base, std::string("error: ") + e.what(), std::nan(""), std::nullopt,
                              std::nan(""), slack_tol)};
    }
  });
  Result res;
  for (auto& rows : per_case) res.rows.insert(res.rows.end(), rows.begin(), rows.end());
  return res;
}

std::vector<double> variation_times(double t_end) {
  std::vector<double> t = output_grid(t_end, 40);
  for (double extra : {1.0, 5.0, 10.0}) {
    if (extra <= t_end) t.push_back(extra);
  }
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  return t;
}

Table trajectory_table(const FlowTrajectory& tr, int n) {
  Table t;
  t.columns.push_back("t");
  for (int k = 0; k < n; ++k) t.columns.push_back("x" + std::to_string(k));
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) t.columns.push_back("m" + std::to_string(r) + std::to_string(c));
  for (int k = 0; k < n; ++k) t.columns.push_back("v" + std::to_string(k));
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    std::vector<double> row{tr.times[i]};
    for (int k = 0; k < n; ++k) row.push_back(tr.points[i][k]);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) row.push_back(tr.first_var[i](r, c));
    for (int k = 0; k < n; ++k) row.push_back(tr.second_var[i][k]);
    t.rows.push_back(std::move(row));
  }
  return t;
}

Result verify_variation(const Config& cfg, const Tolerances& tol) {
  if (!(cfg.t_end > 0.0)) throw ConfigError("--T must be positive");
  ParamMap p = parse_params(cfg.params, "field parameter");
  auto take = [&p](const std::string& k, double def) {
    const auto it = p.find(k);
    if (it == p.end()) return def;
    const double v = it->second;
    p.erase(it);
    return v;
  };
  std::optional<AmbientField> field;
  Vec v;
  Vec w;
  std::string name;
  std::optional<double> bernoulli_a;
  if (cfg.field == "bernoulli") {
    bernoulli_a = take("a", 0.3);
    field = bernoulli_field(*bernoulli_a);
    v = w = Vec::Ones(1);
  } else if (cfg.field == "linear" || cfg.field == "quadratic") {
    const double nd = take("n", 3.0);
    const double a = cfg.field == "quadratic" ? take("a", 0.5) : 0.0;
    if (nd != std::floor(nd) || nd < 1 || nd > kMaxDim) throw ConfigError("field dimension n must be an integer in [1, 8]");
    const int n = static_cast<int>(nd);
    if (cfg.field == "quadratic" && n != 3) throw ConfigError("the quadratic field lives on R^3");
    const Vec origin = Vec::Zero(n);
    field = cfg.field == "linear" ? linear_field(origin) : quadratic_field(a, origin);
    v = Vec::Unit(n, 0);
    w = Vec::Unit(n, n > 1 ? 1 : 0);
  } else if (cfg.field == "helicoid") {
    const SurfacePatch h = make_surface("helicoid", {{"r", take("r", 1.0)}});
    field = AmbientField::from_extension("helicoid", extend_normal(conformal_attractor(h)));
    const TangentData td = tangent_data(h.jet(0.0, 0.0));
    v = td.push(Vec2(1.0, 0.0));
    w = td.push(Vec2(0.0, 1.0));
  } else {
    throw ConfigError("unknown field '" + cfg.field + "' (expected bernoulli, linear, quadratic, helicoid)");
  }
  if (!p.empty()) throw ConfigError("field '" + cfg.field + "' has no parameter '" + p.begin()->first + "'");
  name = describe(cfg.field, parse_params(cfg.params, "field parameter"));

  IntegratorOptions opts;
  opts.rtol = tol.at("integrator_rtol");
  opts.atol = tol.at("integrator_atol");
  const VariationReport rep = check_variation_laws(*field, v, w, variation_times(cfg.t_end), opts);
  const std::string base = "p";
  Result res;
  const double cf = tol.at("closed_form");
  res.rows.push_back(make_row(0, name, base, "first_var_sup", rep.first_var_sup, 0.0, rep.first_var_sup,
                              tol.at("first_variation")));
  res.rows.push_back(make_row(0, name, base, "closed_form_relative_sup", rep.closed_form_relative_sup, 0.0,
                              rep.closed_form_relative_sup, cf));
  const double tail_bound = std::exp(-cfg.t_end) * rep.w_second.norm() + cf;
  res.rows.push_back(make_row(0, name, base, "tail_discrepancy", rep.tail_discrepancy, 0.0,
                              std::max(0.0, rep.tail_discrepancy - tail_bound), 0.0));
  if (bernoulli_a && cfg.t_end >= 1.0) {
    const auto& tr = rep.trajectory;
    const auto it = std::find(tr.times.begin(), tr.times.end(), 1.0);
    const double got = tr.second_var[static_cast<std::size_t>(it - tr.times.begin())][0];
    const double want = 2.0 * *bernoulli_a * std::exp(-1.0) * (1.0 - std::exp(-1.0));
    res.rows.push_back(make_row(0, name, base, "second_var_t1", got, want, std::abs(got - want), cf));
  }
  if (!cfg.dump.empty()) {
    std::ofstream f(cfg.dump, std::ios::binary);
    if (!f) throw ConfigError("cannot write trajectory dump '" + cfg.dump + "'");
    const Table t = trajectory_table(rep.trajectory, field->dim());
    f << (cfg.format == "json" ? table_to_json("trajectory", t) : table_to_csv(t));
  }
  return res;
}

HolomorphicGerm make_phi(const Config& cfg) {
  ParamMap p = parse_params(cfg.phi_params, "phi parameter");
  auto take = [&p](const std::string& k, double def) {
    const auto it = p.find(k);
    if (it == p.end()) return def;
    const double v = it->second;
    p.erase(it);
    return v;
  };
  std::optional<HolomorphicGerm> phi;
  if (cfg.phi == "half") {
    phi = scaled_germ(0.5);
  } else if (cfg.phi == "identity") {
    phi = identity_germ();
  } else if (cfg.phi == "scaled") {
    const Complex s(take("s", 0.5), take("s_im", 0.0));
    if (std::abs(s) > 1.0 || std::abs(s) == 0.0) throw ConfigError("scaled phi needs 0 < |s| <= 1");
    phi = scaled_germ(s);
  } else if (cfg.phi == "mobius_shift") {
    phi = mobius_shift_germ({take("a", 0.3), take("a_im", 0.0)});
  } else {
    throw ConfigError("unknown phi '" + cfg.phi + "' (expected half, identity, scaled, mobius_shift)");
  }
  if (!p.empty()) throw ConfigError("phi '" + cfg.phi + "' has no parameter '" + p.begin()->first + "'");
  return *phi;
}

Result verify_composition(const Config& cfg, const Tolerances& tol) {
  const std::string key = cfg.surface.empty() ? "plane" : cfg.surface;
  const ParamMap params = parse_params(cfg.params, "surface parameter");
  const Complex a = parse_mobius(cfg.mobius);
  SurfacePatch f = make_surface(key, params);
  if (a != Complex(0.0, 0.0)) f = f.recentred(a);
  const HolomorphicGerm phi = make_phi(cfg);

  const CompositionReport r = composition_check(f, phi);
  const ZetaScan scan = scan_zeta(r);
  const std::string name = describe(key, params);
  const std::string base = complex_string(a);
  const double t = tol.at("composition");
  Result res;
  res.rows.push_back(make_row(0, name, base, "lhs", r.lhs, r.rhs, std::max(0.0, r.lhs - r.rhs), t));
  res.rows.push_back(make_row(0, name, base, "rhs", r.rhs, std::nullopt, 0.0, t));
  res.rows.push_back(make_row(0, name, base, "margin", r.margin, 0.0, std::max(0.0, -r.margin), t));
  res.rows.push_back(make_row(0, name, base, "zeta_scan_min", scan.lhs_min, r.lhs, std::max(0.0, scan.lhs_min - r.lhs), t));
  return res;
}

Result verify_hessian_identity(const Config& cfg, const Tolerances& tol) {
  const std::string key = cfg.surface.empty() ? "graph" : cfg.surface;
  const ParamMap params = parse_params(cfg.params, "surface parameter");
  const Complex a = parse_mobius(cfg.mobius);
  if (cfg.pairs < 1) throw ConfigError("--pairs must be positive");
  SurfacePatch s = make_surface(key, params);
  if (a != Complex(0.0, 0.0)) s = s.recentred(a);
  const AttractorChoice choice = parse_attractor(cfg.attractor);
  const TangentAttractor x = choice == AttractorChoice::tangential_projection ||
                                     (choice == AttractorChoice::automatic && !s.conformal_flag())
                                 ? tangential_attractor(s)
                                 : conformal_attractor(s);
  const AmbientExtension ext = extend_normal(x);

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<std::pair<Vec2, Vec2>> pairs;
  for (int i = 0; i < cfg.pairs; ++i) {
    const Vec2 v(u(rng), u(rng));
    const Vec2 w(u(rng), u(rng));
    pairs.emplace_back(v, w);
  }
  const std::string name = describe(key, params) + "/" + std::string(to_string(x.kind()));
  const std::string base = complex_string(a);
  const double t = tol.at("hessian_identity");
  Result res;
  res.rows.resize(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t i) {
    const HessianIdentityDetail d = hessian_identity_detail(ext, pairs[i].first, pairs[i].second);
    res.rows[i] = make_row(static_cast<int>(i), name, base, "hessian_identity_residual", d.residual, 0.0,
                           d.scaled_residual, t);
  });
  return res;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const double v = parse_double(item, "--R");
    if (!(v > 0.0)) throw ConfigError("--R values must be positive");
    out.push_back(v);
  }
  if (out.empty() || s.back() == ',') throw ConfigError("--R needs a nonempty comma-separated list");
  return out;
}

Result helicoid_scan_cmd(const Config& cfg, const Tolerances& tol) {
  const std::vector<double> rs = parse_list(cfg.r_list);
  const auto rows = helicoid_scan(rs, {cfg.x0, cfg.y0});
  Table t;
  t.columns = {"R", "naive_ratio", "geometric_ratio", "slack"};
  Result res;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    t.rows.push_back({r.R, r.naive_ratio, r.geometric_ratio, r.slack});
    res.rows.push_back(make_row(static_cast<int>(i), "helicoid", complex_string({cfg.x0, cfg.y0}), "slack", r.slack, 0.0,
                                std::max(0.0, -r.slack), tol.at("slack")));
  }
  res.table = std::move(t);
  return res;
}

/// Removes --tol.<name>=<value> arguments and applies them.
std::vector<std::string> extract_tolerances(const std::vector<std::string>& args, Tolerances& tol) {
  std::vector<std::string> rest;
  for (const auto& a : args) {
    if (a.rfind("--tol.", 0) != 0) {
      rest.push_back(a);
      continue;
    }
    const auto eq = a.find('=');
    if (eq == std::string::npos) throw ConfigError("tolerance override must be --tol.<name>=<value>");
    const std::string name = a.substr(6, eq - 6);
    if (!tol.contains(name)) throw ConfigError("unknown tolerance '" + name + "'");
    const double v = parse_double(a.substr(eq + 1), "tolerance '" + name + "'");
    if (v < 0.0) throw ConfigError("tolerance '" + name + "' must be nonnegative");
    tol[name] = v;
  }
  return rest;
}

void add_common(CLI::App* sub, Config& cfg) {
  sub->add_option("--format", cfg.format, "Report format")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--output", cfg.output, "Write the report to this file instead of stdout");
}

void add_surface(CLI::App* sub, Config& cfg) {
  sub->add_option("--surface", cfg.surface, "Registry key: plane, koebe_plane, helicoid, graph, catenoid_patch");
  sub->add_option("--param", cfg.params, "Surface parameter key=value (repeatable)");
  sub->add_option("--mobius", cfg.mobius, "Mobius recentring a=<re> [a_im=<im>]");
  sub->add_option("--attractor", cfg.attractor, "auto, pushforward or tangential");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Tolerances tol = default_tolerances();
  Config cfg;
  CLI::App app{"Numerical checks of a Bieberbach-type estimate for surfaces", "bblab"};
  app.require_subcommand(1);

  auto* thm = app.add_subcommand("verify-theorem", "Evaluate the estimate on one surface or on a seeded battery");
  add_common(thm, cfg);
  add_surface(thm, cfg);
  thm->add_option("--seed", cfg.seed, "Battery seed");
  thm->add_option("--count", cfg.count, "Battery size");

  auto* lem = app.add_subcommand("verify-lemma", "Check a supporting identity");
  add_common(lem, cfg);
  add_surface(lem, cfg);
  lem->add_option("--which", cfg.which, "2.1 (variation), 2.2 (composition) or 2.4 (hessian)")->required();
  lem->add_option("--field", cfg.field, "bernoulli, linear, quadratic or helicoid");
  lem->add_option("--phi", cfg.phi, "half, identity, scaled or mobius_shift");
  lem->add_option("--phi-param", cfg.phi_params, "phi parameter key=value (repeatable)");
  lem->add_option("--seed", cfg.seed, "Seed for random (v, w) pairs");
  lem->add_option("--pairs", cfg.pairs, "Number of random (v, w) pairs");
  lem->add_option("--T", cfg.t_end, "Final time");
  lem->add_option("--dump-trajectory", cfg.dump, "Write the trajectory records to this file");

  auto* scan = app.add_subcommand("helicoid-scan", "Scale the helicoid chart by R and tabulate the estimate terms");
  add_common(scan, cfg);
  scan->add_option("--R", cfg.r_list, "Comma-separated scale factors");
  scan->add_option("--x0", cfg.x0, "Basepoint in the helicoid chart (real part)");
  scan->add_option("--y0", cfg.y0, "Basepoint in the helicoid chart (imaginary part)");

  try {
    std::vector<std::string> rest = extract_tolerances(args, tol);
    std::reverse(rest.begin(), rest.end());
    app.parse(rest);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kPass;
    }
    err << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }

  Result res;
  std::string command;
  try {
    if (thm->parsed()) {
      command = "verify-theorem";
      res = verify_theorem(cfg, tol);
    } else if (lem->parsed()) {
      command = "verify-lemma";
      if (cfg.which == "2.1" || cfg.which == "variation") {
        res = verify_variation(cfg, tol);
      } else if (cfg.which == "2.2" || cfg.which == "composition") {
        res = verify_composition(cfg, tol);
      } else if (cfg.which == "2.4" || cfg.which == "hessian") {
        res = verify_hessian_identity(cfg, tol);
      } else {
        throw ConfigError("unknown --which '" + cfg.which + "' (expected 2.1, 2.2 or 2.4)");
      }
    } else {
      command = "helicoid-scan";
      res = helicoid_scan_cmd(cfg, tol);
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const NotConformal& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const AttractorNotAdmissible& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const Error& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  }

  std::string text;
  if (res.table) {
    text = cfg.format == "json" ? table_to_json(command, *res.table) : table_to_csv(*res.table);
  } else {
    text = cfg.format == "json" ? rows_to_json(command, res.rows) : rows_to_csv(res.rows);
  }
  if (cfg.output.empty()) {
    out << text;
  } else {
    std::ofstream f(cfg.output, std::ios::binary);
    if (!f) {
      err << "error: cannot write '" << cfg.output << "'\n";
      return kConfigError;
    }
    f << text;
  }
  if (!res.passed()) {
    err << "one or more checks failed\n";
    return kNumericalFailure;
  }
  return kPass;
}

}  // namespace bblab::cli
