#include "bblab/attractor.hpp"

#include "bblab/errors.hpp"
#include "bblab/geometry.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>

namespace bblab {

std::string_view to_string(AttractorKind kind) {
  switch (kind) {
    case AttractorKind::conformal_pushforward:
      return "conformal_pushforward";
    case AttractorKind::tangential_projection:
      return "tangential_projection";
  }
  return "unknown";
}

TangentAttractor::TangentAttractor(SurfacePatch host, AttractorKind kind, ChartJetFn chart_jet)
    : host_(std::move(host)), kind_(kind), chart_jet_(std::move(chart_jet)) {}

Vec2 TangentAttractor::chart_field(double x, double y) const {
  const auto c = chart_jet_(x, y);
  return {c[0].val, c[1].val};
}

Vec TangentAttractor::ambient(double x, double y) const {
  const Jet2Vector j = host_.jet(x, y);
  const Vec2 c = chart_field(x, y);
  return c[0] * partial_of(j, 0) + c[1] * partial_of(j, 1);
}

TangentAttractor conformal_attractor(const SurfacePatch& s) {
  if (!s.conformal_flag()) throw NotConformal("surface '" + s.name() + "' is not declared conformal");
  const ConformalityCertificate cert = conformality_certificate(s);
  if (!cert.passed()) throw NotConformal("surface '" + s.name() + "' fails its conformality certificate");
  return TangentAttractor(s, AttractorKind::conformal_pushforward, [](double x, double y) {
    const auto [jx, jy] = lift_chart(x, y);
    return std::array<Jet2, 2>{-jx, -jy};
  });
}

TangentAttractor tangential_attractor(const SurfacePatch& s) {
  // Non-degeneracy at the basepoint; elsewhere it is checked on use.
  (void)tangent_data(s.jet(0.0, 0.0));
  const JetVec<Jet2> origin = s.nested_jet(0.0, 0.0);
  std::array<double, kMaxDim> p{};
  for (int k = 0; k < origin.n; ++k) p[k] = origin[k].val.val;

  return TangentAttractor(s, AttractorKind::tangential_projection, [s, p](double x, double y) {
    // c = G^{-1} J^T (p - f), carried as 2-jets; J comes from the nested jet.
    const JetVec<Jet2> nj = s.nested_jet(x, y);
    const int n = nj.n;
    JetVec<double> r(n), fx(n), fy(n);
    for (int k = 0; k < n; ++k) {
      r[k] = p[k] - nj[k].val;
      fx[k] = nj[k].d[0];
      fy[k] = nj[k].d[1];
    }
    const Jet2 g00 = dot(fx, fx);
    const Jet2 g01 = dot(fx, fy);
    const Jet2 g11 = dot(fy, fy);
    const Jet2 b0 = dot(fx, r);
    const Jet2 b1 = dot(fy, r);
    const Jet2 inv_det = reciprocal(g00 * g11 - g01 * g01);
    return std::array<Jet2, 2>{(g11 * b0 - g01 * b1) * inv_det, (g00 * b1 - g01 * b0) * inv_det};
  });
}

AmbientExtension::AmbientExtension(TangentAttractor base)
    : base_(std::move(base)), basepoint_(base_.host().basepoint()) {
  const double kappa = max_normal_curvature(base_.host());
  reach_ = kappa > 0.0 ? 1.0 / kappa : std::numeric_limits<double>::infinity();
}

bool AmbientExtension::newton(const Vec& q, ChartPoint& z, int& iterations) const {
  const SurfacePatch& s = base_.host();
  auto energy = [&](double x, double y) { return 0.5 * (q - s.point(x, y)).squaredNorm(); };
  for (iterations = 1; iterations <= 50; ++iterations) {
    const Jet2Vector j = s.jet(z.x, z.y);
    const Vec r = q - value_of(j);
    const Vec fx = partial_of(j, 0);
    const Vec fy = partial_of(j, 1);
    const Vec2 grad(fx.dot(r), fy.dot(r));  // minus the gradient of |q - f|^2 / 2
    Mat2 gn;
    gn << fx.dot(fx), fx.dot(fy), fx.dot(fy), fy.dot(fy);
    Mat2 full = gn;
    full(0, 0) -= r.dot(second_of(j, 0, 0));
    full(0, 1) -= r.dot(second_of(j, 0, 1));
    full(1, 0) = full(0, 1);
    full(1, 1) -= r.dot(second_of(j, 1, 1));

    Vec2 step;
    Eigen::LLT<Mat2> llt(full);
    if (llt.info() == Eigen::Success) {
      step = llt.solve(grad);
    } else {
      step = gn.ldlt().solve(grad);
    }
    if (!step.allFinite()) return false;

    const double e0 = 0.5 * r.squaredNorm();
    double t = 1.0;
    for (int k = 0; k < 30 && energy(z.x + t * step[0], z.y + t * step[1]) > e0; ++k) t *= 0.5;
    z.x += t * step[0];
    z.y += t * step[1];
    if (t * step.norm() <= 1e-12) return true;
  }
  return false;
}

AmbientExtension::Foot AmbientExtension::resolve(const Vec& q) const {
  const SurfacePatch& s = base_.host();
  if (q.size() != s.dim() || !q.allFinite()) throw OutsideTube("query point has wrong dimension or is not finite");
  Foot foot;
  ChartPoint z{0.0, 0.0};
  bool ok = newton(q, z, foot.iterations);
  if (!ok) {
    // Restart from the nearest sample of the chart grid.
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : sample_grid(s)) {
      const double d = (q - s.point(c.x, c.y)).squaredNorm();
      if (d < best) {
        best = d;
        z = c;
      }
    }
    ok = newton(q, z, foot.iterations);
  }
  if (!ok) throw OutsideTube("projected Newton did not converge within 50 iterations");

  const FrameAtPoint fr = frame_at(s, z.x, z.y);
  const Vec offset = q - fr.point;
  foot.chart = z;
  foot.offsets.resize(static_cast<int>(fr.normal.size()));
  for (std::size_t i = 0; i < fr.normal.size(); ++i) {
    const double si = fr.normal[i].dot(offset);
    if (std::abs(si) >= tube_radius()) throw OutsideTube("normal offset exceeds the tube radius");
    foot.offsets[static_cast<int>(i)] = si;
  }
  return foot;
}

Vec AmbientExtension::operator()(const Vec& q) const {
  const Foot foot = resolve(q);
  const FrameAtPoint fr = frame_at(base_.host(), foot.chart.x, foot.chart.y);
  Vec out = base_.ambient(foot.chart.x, foot.chart.y);
  for (std::size_t i = 0; i < fr.normal.size(); ++i) out -= foot.offsets[static_cast<int>(i)] * fr.normal[i];
  return out;
}

AmbientExtension extend_normal(const TangentAttractor& x) { return AmbientExtension(x); }

Vec second_difference(const AmbientExtension& e, const Vec& at, const Vec& v, const Vec& w) {
  const double nv = v.norm();
  const double nw = w.norm();
  if (nv == 0.0 || nw == 0.0) return Vec::Zero(e.dim());
  const double h = 1e-3 * e.length_scale();
  const Vec plus = h * (v / nv + w / nw);
  const Vec minus = h * (v / nv - w / nw);
  // (a + d) - (b + c) keeps the stencil exactly symmetric under v <-> w.
  const Vec outer = e(at + plus) + e(at - plus);
  const Vec inner = e(at + minus) + e(at - minus);
  return (nv * nw / (4.0 * h * h)) * (outer - inner);
}

Vec ambient_second_derivative(const AmbientExtension& e, const Vec& v, const Vec& w) {
  return second_difference(e, e.basepoint(), v, w);
}

Mat ambient_jacobian(const AmbientExtension& e, const Vec& at, double h) {
  const int n = e.dim();
  Mat jac(n, n);
  for (int k = 0; k < n; ++k) {
    const Vec step = h * Vec::Unit(n, k);
    jac.col(k) = (e(at + step) - e(at - step)) / (2.0 * h);
  }
  return jac;
}

}  // namespace bblab
