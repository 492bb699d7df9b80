#include "bblab/estimate.hpp"

#include "bblab/errors.hpp"
#include "bblab/geometry.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace bblab {

TangentAttractor theorem_attractor(const SurfacePatch& s, AttractorChoice choice) {
  switch (choice) {
    case AttractorChoice::automatic:
      return is_planar(s) ? tangential_attractor(s) : conformal_attractor(s);
    case AttractorChoice::conformal_pushforward:
      return conformal_attractor(s);
    case AttractorChoice::tangential_projection:
      if (!is_planar(s)) {
        throw AttractorNotAdmissible("the tangential projection field is conformal only on planar surfaces");
      }
      return tangential_attractor(s);
  }
  throw ConfigError("unknown attractor choice");
}

EstimateReport evaluate_theorem(const SurfacePatch& s, AttractorChoice choice) {
  if (!s.conformal_flag()) throw NotConformal("surface '" + s.name() + "' is not declared conformal");
  if (!conformality_certificate(s).passed()) throw NotConformal("surface '" + s.name() + "' fails its conformality certificate");

  const TangentAttractor x = theorem_attractor(s, choice);
  const ZDerivatives zd = complex_z_derivatives(s.jet(0.0, 0.0));

  EstimateReport r;
  r.surface = s.name();
  r.fz0 = zd.fz;
  r.fzz0 = zd.fzz;
  r.sigma_zz = second_fundamental_complex(s, {0.0, 0.0});
  r.hess_zz = covariant_hessian_complex(x, {0.0, 0.0});
  r.lhs = (r.fzz0 - r.sigma_zz + r.hess_zz).norm();
  r.rhs = 4.0 * r.fz0.norm();
  r.slack = r.rhs - r.lhs;
  r.attractor_kind = x.kind();
  return r;
}

HessianIdentityDetail hessian_identity_detail(const AmbientExtension& ext, const Vec2& v, const Vec2& w) {
  const TangentAttractor& x = ext.base();
  const SurfacePatch& s = x.host();
  const TangentData t = tangent_data(s.jet(0.0, 0.0));
  HessianIdentityDetail d;
  d.ambient = ambient_second_derivative(ext, t.push(v), t.push(w));
  d.intrinsic = covariant_hessian(x, {0.0, 0.0}, v, w) - second_fundamental(s, {0.0, 0.0}, v, w);
  d.residual = (d.ambient - d.intrinsic).norm();
  d.scaled_residual = d.residual / (1.0 + d.intrinsic.norm());
  return d;
}

double hessian_identity_residual(const TangentAttractor& x, const Vec2& v, const Vec2& w) {
  return hessian_identity_detail(extend_normal(x), v, w).residual;
}

HolomorphicGerm::HolomorphicGerm(std::string name, std::vector<Complex> taylor, double radius)
    : name_(std::move(name)), taylor_(std::move(taylor)), radius_(radius) {
  if (taylor_.empty()) throw ConfigError("germ needs at least the linear coefficient");
}

Complex HolomorphicGerm::coefficient(int k) const {
  if (k < 1 || k > static_cast<int>(taylor_.size())) return {0.0, 0.0};
  return taylor_[static_cast<std::size_t>(k - 1)];
}

HolomorphicGerm identity_germ() { return {"identity", {Complex(1.0, 0.0)}}; }

HolomorphicGerm scaled_germ(Complex s) { return {"scaled", {s}}; }

HolomorphicGerm koebe_germ(Complex c, int order) {
  std::vector<Complex> a;
  Complex cp(1.0, 0.0);
  for (int k = 1; k <= order; ++k) {
    a.push_back(static_cast<double>(k) * cp);
    cp *= c;
  }
  return {"koebe", std::move(a)};
}

HolomorphicGerm mobius_shift_germ(Complex a, int order) {
  if (std::abs(a) >= 1.0) throw ConfigError("mobius shift needs |a| < 1");
  // (M_a(z) - a) = (1 - |a|^2) z / (1 + conj(a) z)
  const double scale = (1.0 - std::norm(a)) / (1.0 + std::abs(a));
  std::vector<Complex> coeffs;
  Complex pw(1.0, 0.0);
  for (int k = 1; k <= order; ++k) {
    coeffs.push_back(scale * pw);
    pw *= -std::conj(a);
  }
  return {"mobius_shift", std::move(coeffs)};
}

BieberbachCheck classical_bieberbach(const HolomorphicGerm& h) {
  const Complex a1 = h.coefficient(1);
  if (a1 == Complex(0.0, 0.0)) throw ZeroDerivative("germ has vanishing first derivative");
  BieberbachCheck c;
  c.ratio = 2.0 * std::abs(h.coefficient(2) / a1);
  c.satisfied = c.ratio <= 4.0 + 1e-12;
  return c;
}

CompositionReport composition_check(const SurfacePatch& f, const HolomorphicGerm& phi) {
  const Complex a1 = phi.coefficient(1);
  if (a1 == Complex(0.0, 0.0)) throw ZeroDerivative("phi'(0) = 0");
  // Only the 2-jet of phi at 0 enters g_z(0) and g_zz(0).
  const SurfacePatch g = f.precomposed(f.name() + "@" + phi.name(), QuadraticChartMap{a1, phi.coefficient(2)}, 1.0, f.conformal_flag());

  const ZDerivatives fd = complex_z_derivatives(f.jet(0.0, 0.0));
  const ZDerivatives gd = complex_z_derivatives(g.jet(0.0, 0.0));
  CompositionReport r;
  r.fz = fd.fz;
  r.fzz = fd.fzz;
  r.gz = gd.fz;
  r.gzz = gd.fzz;
  r.zeta = (a1 * a1) / std::norm(a1);
  r.lhs = composition_lhs(r, r.zeta);
  r.rhs = 4.0 / r.gz.norm();
  r.margin = r.rhs - r.lhs;
  return r;
}

double composition_lhs(const CompositionReport& r, Complex zeta) {
  const double ng2 = r.gz.norm() * r.gz.norm();
  const double nf2 = r.fz.norm() * r.fz.norm();
  return ((1.0 / ng2) * r.gzz - (zeta / nf2) * r.fzz).norm();
}

ZetaScan scan_zeta(const CompositionReport& r, int grid_points) {
  const double step = 2.0 * std::numbers::pi / grid_points;
  auto lhs_at = [&r](double th) { return composition_lhs(r, std::polar(1.0, th)); };
  int best = 0;
  double best_val = lhs_at(0.0);
  for (int k = 1; k < grid_points; ++k) {
    const double v = lhs_at(step * k);
    if (v < best_val) {
      best_val = v;
      best = k;
    }
  }
  double lo = step * (best - 1);
  double hi = step * (best + 1);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 100 && hi - lo > 1e-14; ++it) {
    const double m1 = hi - inv_phi * (hi - lo);
    const double m2 = lo + inv_phi * (hi - lo);
    if (lhs_at(m1) < lhs_at(m2)) {
      hi = m2;
    } else {
      lo = m1;
    }
  }
  ZetaScan z;
  const double th = 0.5 * (lo + hi);
  z.zeta_min = std::polar(1.0, th);
  z.lhs_min = std::min(lhs_at(th), best_val);
  z.distance_to_analytic = std::abs(z.zeta_min - r.zeta);
  return z;
}

std::vector<ScanRow> helicoid_scan(std::span<const double> r_values, Complex z0) {
  const SurfacePatch g = make_surface("helicoid");
  std::vector<ScanRow> rows;
  for (const double big_r : r_values) {
    if (!(big_r > 0.0) || !std::isfinite(big_r)) throw ConfigError("scan factors must be positive and finite");
    const SurfacePatch f = g.precomposed("helicoid_scan", AffineChartMap{Complex(big_r, 0.0), z0}, 1.0, true);
    const ZDerivatives zd = complex_z_derivatives(f.jet(0.0, 0.0));
    const ComplexVec sigma = second_fundamental_complex(f, {0.0, 0.0});
    const double nz = zd.fz.norm();
    ScanRow row;
    row.R = big_r;
    row.naive_ratio = zd.fzz.norm() / nz;
    row.geometric_ratio = (zd.fzz - sigma).norm() / nz;
    row.slack = evaluate_theorem(f).slack;
    rows.push_back(row);
  }
  return rows;
}

std::vector<BatteryCase> theorem_battery(std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto disc_point = [&](double radius) {
    const double rho = radius * unit(rng);
    const double th = 2.0 * std::numbers::pi * unit(rng);
    return std::polar(rho, th);
  };

  std::vector<BatteryCase> cases;
  cases.push_back({0, "plane", {}, {0.0, 0.0}});
  cases.push_back({1, "koebe_plane", {{"c", 1.0}}, {0.0, 0.0}});
  for (int id = 2; id < count; ++id) {
    BatteryCase c;
    c.id = id;
    switch (id % 3) {
      case 0:
        c.key = "plane";
        break;
      case 1: {
        c.key = "koebe_plane";
        const Complex k = disc_point(1.0);
        c.params = {{"c", k.real()}, {"c_im", k.imag()}};
        break;
      }
      default:
        c.key = "helicoid";
        c.params = {{"r", 0.05 + 0.75 * unit(rng)}};
        break;
    }
    c.mobius = disc_point(0.8);
    cases.push_back(std::move(c));
  }
  cases.resize(static_cast<std::size_t>(std::max(count, 0)));
  return cases;
}

SurfacePatch build_case(const BatteryCase& c) {
  const SurfacePatch base = make_surface(c.key, c.params);
  return c.mobius == Complex(0.0, 0.0) ? base : base.recentred(c.mobius);
}

}  // namespace bblab
