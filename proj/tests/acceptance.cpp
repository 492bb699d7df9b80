// Prints one PASS/FAIL line per acceptance criterion; exits nonzero on any FAIL.

#include "bblab/attractor.hpp"
#include "bblab/estimate.hpp"
#include "bblab/flow.hpp"
#include "bblab/geometry.hpp"
#include "cli.hpp"
#include "geometry_oracles.hpp"
#include "support.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>

using namespace bblab;
using namespace testing_support;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& what) {
  std::printf("%s %d: %s\n", ok ? "PASS" : "FAIL", id, what.c_str());
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

ComplexVec cvec(std::initializer_list<Complex> xs) {
  ComplexVec v = ComplexVec::zero(static_cast<int>(xs.size()));
  int k = 0;
  for (Complex x : xs) {
    v.re[k] = x.real();
    v.im[k++] = x.imag();
  }
  return v;
}

AmbientField helicoid_field() {
  return AmbientField::from_extension("helicoid", extend_normal(conformal_attractor(make_surface("helicoid"))));
}

void classical_recovery() {
  const double r2 = 2.0 * std::sqrt(2.0);
  const EstimateReport pl = evaluate_theorem(make_surface("plane"));
  const EstimateReport ko = evaluate_theorem(make_surface("koebe_plane", {{"c", 1.0}}));
  const ZDerivatives zd = complex_z_derivatives(make_surface("koebe_plane", {{"c", 1.0}}).jet(0.0, 0.0));
  const Complex k2 = zd.fzz[0] + Complex(0.0, 1.0) * zd.fzz[1];  // k''(0) of the planar map
  const Complex a2 = koebe_series(1.0, 4)[2];
  const bool ok = std::abs(pl.lhs) <= 1e-12 && std::abs(pl.rhs - r2) <= 1e-12 && std::abs(ko.lhs - ko.rhs) <= 1e-9 &&
                  std::abs(ko.lhs - r2) <= 1e-9 && std::abs(a2 - 2.0) <= 1e-15 && std::abs(k2 - 2.0 * a2) <= 1e-12;
  report(1, ok,
         fmt("classical recovery: plane lhs=%.3g rhs-2sqrt2=%.3g; Koebe |lhs-rhs|=%.3g", pl.lhs, pl.rhs - r2,
             std::abs(ko.lhs - ko.rhs)) +
             fmt(", series a2=%.17g, chart k''(0)/2=%.17g", a2.real(), (k2 / 2.0).real()));
}

void battery() {
  const auto cases = theorem_battery(2024, 120);
  double worst = INFINITY;
  int bad = 0;
  for (const auto& c : cases) {
    const EstimateReport r = evaluate_theorem(build_case(c));
    worst = std::min(worst, r.slack);
    if (r.slack < -1e-9) ++bad;
  }
  report(2, cases.size() >= 100 && bad == 0,
         fmt("theorem battery: %.0f cases, min slack %.3g, %.0f below -1e-9", static_cast<double>(cases.size()), worst, bad));
}

void first_variation() {
  bool ok = true;
  std::string detail;
  for (const auto& f : {helicoid_field(), bernoulli_field(0.3)}) {
    const Vec v = Vec::Unit(f.dim(), 0);
    std::vector<double> res;
    for (double tol : {1e-6, 1e-8, 1e-10}) {
      IntegratorOptions o;
      o.rtol = tol;
      o.atol = 1e-2 * tol;
      res.push_back(check_variation_laws(f, v, v, output_grid(10.0, 40), o).first_var_sup);
    }
    const double r1 = res[0] / res[1];
    const double r2 = res[1] / res[2];
    ok = ok && res[2] <= 1e-6 && r1 >= 20.0 && r1 <= 500.0 && r2 >= 20.0 && r2 <= 500.0;
    detail += " " + f.name() + fmt(": sup=%.3g at 1e-10, per-decade ratios %.3g, %.3g;", res[2], r1, r2);
  }
  report(3, ok, "first variation e^{-t}I up to T=10:" + detail);
}

void second_variation() {
  const double a = 0.3;
  const AmbientField f = bernoulli_field(a);
  const Vec one = Vec::Ones(1);
  const VariationReport rep = check_variation_laws(f, one, one, {0.0, 1.0, 5.0, 10.0}, IntegratorOptions{});
  const double got = rep.trajectory.second_var[1][0];
  // Second Taylor coefficient of the closed-form flow e^{-t} x / (1 - a x (1 - e^{-t})).
  const double derived = 2.0 * a * std::exp(-1.0) * (1.0 - std::exp(-1.0));
  const double literal = 0.13952706;
  const bool ok = std::abs(got - derived) <= 1e-7 && rep.closed_form_relative_sup <= 1e-7;
  report(4, ok,
         fmt("Bernoulli a=0.3: (d2 eta_1)_0=%.12g vs hand-derived %.12g (err %.3g)", got, derived, std::abs(got - derived)) +
             fmt(", closed-form relative residual %.3g at t=1,5,10", rep.closed_form_relative_sup));
  std::printf("NOTE 4: the quoted literal %.8f differs from the hand-derived value by %.3g (> 1e-7); "
              "the hand-derived expansion is used as the reference\n",
              literal, std::abs(literal - derived));
}

void hessian_identity() {
  std::vector<TangentAttractor> fields = {
      conformal_attractor(make_surface("plane")),
      conformal_attractor(make_surface("koebe_plane", {{"c", 0.7}})),
      conformal_attractor(make_surface("helicoid")),
      conformal_attractor(make_surface("catenoid_patch")),
      conformal_attractor(make_surface("helicoid", {{"r", 0.5}}).recentred({0.2, -0.3})),
      tangential_attractor(make_surface("graph")),
  };
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  double worst_raw = 0.0;
  int pairs = 0;
  for (const auto& x : fields) {
    const AmbientExtension ext = extend_normal(x);
    for (int i = 0; i < 10; ++i) {
      const Vec2 v(u(rng), u(rng));
      const Vec2 w(u(rng), u(rng));
      const HessianIdentityDetail d = hessian_identity_detail(ext, v, w);
      worst = std::max(worst, d.scaled_residual);
      worst_raw = std::max(worst_raw, d.residual);
      ++pairs;
    }
  }
  report(5, worst <= 1e-5,
         fmt("Hessian identity: %.0f surfaces x 10 pairs, worst residual/(1+|intrinsic|) %.3g", static_cast<double>(fields.size()),
             worst) +
             fmt(" (unscaled %.3g)", worst_raw));
}

void helicoid_values() {
  const SurfacePatch h = make_surface("helicoid");
  const Complex i(0.0, 1.0);
  const ComplexVec gz = cvec({0.5, 0.0, -0.5 * i});
  const ComplexVec gzz = cvec({0.0, -0.5 * i, 0.0});
  const ZDerivatives zd = complex_z_derivatives(h.jet(0.0, 0.0));
  const ComplexVec sig = second_fundamental_complex(h, {0.0, 0.0});
  const double jet_err = std::max({(zd.fz - gz).norm(), (zd.fzz - gzz).norm(), (sig - gzz).norm()});

  const Vec fx = fd_partial(h, 0.0, 0.0, 0);
  const Vec fy = fd_partial(h, 0.0, 0.0, 1);
  const Vec fxx = fd_second(h, 0.0, 0.0, 0, 0);
  const Vec fxy = fd_second(h, 0.0, 0.0, 0, 1);
  const Vec fyy = fd_second(h, 0.0, 0.0, 1, 1);
  const ComplexVec fd_gz(0.5 * fx, -0.5 * fy);
  const ComplexVec fd_gzz(0.25 * (fxx - fyy), -0.5 * fxy);
  const Mat nproj = Mat::Identity(3, 3) - fd_projector(h, 0.0, 0.0);
  const ComplexVec fd_sig(nproj * fd_gzz.re, nproj * fd_gzz.im);
  const double fd_err = std::max({(fd_gz - gz).norm(), (fd_gzz - gzz).norm(), (fd_sig - gzz).norm()});

  const std::vector<double> one{1.0};
  const double dynamic = helicoid_scan(one, {0.5, 0.0}).front().geometric_ratio;
  report(6, jet_err <= 1e-10 && fd_err <= 1e-6 && dynamic > 1e-3,
         fmt("helicoid g_z, g_zz, sigma at 0: jet err %.3g, FD err %.3g; |f_zz - sigma|/|f_z| at x0=0.5: %.6g", jet_err,
             fd_err, dynamic));
}

void jet_soundness() {
  double worst1 = 0.0;
  double worst2 = 0.0;
  int surfaces = 0;
  for (const auto& key : surface_keys()) {
    const SurfacePatch s = make_surface(key);
    ++surfaces;
    for (const auto& q : sample_grid(s)) {
      const Jet2Vector j = s.jet(q.x, q.y);
      for (int a = 0; a < 2; ++a) {
        worst1 = std::max(worst1, rel_err(partial_of(j, a), fd_partial(s, q.x, q.y, a)));
        for (int b = 0; b < 2; ++b) worst2 = std::max(worst2, rel_err(second_of(j, a, b), fd_second(s, q.x, q.y, a, b)));
      }
    }
  }
  report(7, worst1 <= 1e-6 && worst2 <= 1e-5,
         fmt("jets vs central differences on %.0f surfaces: first %.3g, second %.3g", surfaces, worst1, worst2));
}

void determinism() {
  const std::vector<std::vector<std::string>> commands = {
      {"verify-theorem", "--seed", "2024", "--count", "120"},
      {"verify-lemma", "--which", "2.4", "--seed", "11"},
      {"helicoid-scan", "--R", "1,2,4,8", "--x0", "0.5"},
  };
  bool ok = true;
  std::size_t bytes = 0;
  for (const auto& args : commands) {
    std::ostringstream a;
    std::ostringstream b;
    std::ostringstream err;
    const int ca = cli::run(args, a, err);
    const int cb = cli::run(args, b, err);
    ok = ok && ca == cli::kPass && cb == cli::kPass && !a.str().empty() && a.str() == b.str();
    bytes += a.str().size();
  }
  report(8, ok, fmt("repeated seeded CLI runs produce byte-identical CSV (%.0f bytes compared)", static_cast<double>(bytes)));
}

}  // namespace

int main() {
  classical_recovery();
  battery();
  first_variation();
  second_variation();
  hessian_identity();
  helicoid_values();
  jet_soundness();
  determinism();
  return failures == 0 ? 0 : 1;
}
