#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "bblab/attractor.hpp"
#include "bblab/errors.hpp"
#include "bblab/flow.hpp"
#include "bblab/geometry.hpp"
#include "geometry_oracles.hpp"
#include "support.hpp"

#include <cmath>

using namespace bblab;
using namespace testing_support;

namespace {

Vec v3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

void check_normalized(const TangentAttractor& x) {
  const Vec2 c0 = x.chart_field(0.0, 0.0);
  CHECK(c0.norm() == 0.0);
  const TangentData td = tangent_data(x.host().jet(0, 0));
  for (int i = 0; i < 2; ++i) {
    const Vec fi = td.push(Vec2::Unit(i));
    CHECK((covariant_derivative(x, {0, 0}, Vec2::Unit(i)) + fi).norm() <= 1e-8 * fi.norm());
  }
}

}  // namespace

TEST_CASE("pushforward attractor on the plane is -(w - p)") {
  Gen g(1);
  const SurfacePatch pl = make_surface("plane", {{"n", 4}});
  const TangentAttractor x = conformal_attractor(pl);
  CHECK(x.kind() == AttractorKind::conformal_pushforward);
  for (int t = 0; t < 10; ++t) {
    const Vec2 c = g.vec2(0.5);
    CHECK((x.ambient(c[0], c[1]) + (pl.point(c[0], c[1]) - pl.basepoint())).norm() <= 1e-15);
    CHECK((x.chart_field(c[0], c[1]) + c).norm() == 0.0);
  }
  check_normalized(x);
}

TEST_CASE("pushforward attractors are normalized") {
  check_normalized(conformal_attractor(make_surface("helicoid")));
  check_normalized(conformal_attractor(make_surface("koebe_plane", {{"c", 0.9}})));
  check_normalized(conformal_attractor(make_surface("catenoid_patch")));
  const SurfacePatch moved = make_surface("helicoid").recentred({0.5, 0.0});
  CHECK(conformality_certificate(moved).passed());
  check_normalized(conformal_attractor(moved));
}

TEST_CASE("non-conformal input is rejected") {
  CHECK_THROWS_AS(conformal_attractor(make_surface("graph")), NotConformal);
  // Declared conformal but failing the certificate.
  const SurfacePatch liar = make_surface("graph").precomposed("liar", AffineChartMap{}, 1.0, true);
  CHECK_THROWS_AS(conformal_attractor(liar), NotConformal);
}

TEST_CASE("the chart flow preserves conformality") {
  for (const auto& key : {"helicoid", "koebe_plane", "catenoid_patch"}) {
    const SurfacePatch s = make_surface(key);
    for (double t : {0.5, 1.0, 2.0}) {
      const ConformalityCertificate c = conformality_certificate(s.dilated(std::exp(-t)));
      CHECK(c.max_angle_residual <= 1e-8);
      CHECK(c.max_length_residual <= 1e-8);
    }
  }
}

TEST_CASE("positive orbits converge to the basepoint") {
  Gen g(15);
  const SurfacePatch h = make_surface("helicoid");
  const AmbientField f = AmbientField::from_extension("helicoid", extend_normal(conformal_attractor(h)));
  const Vec zero = Vec::Zero(3);
  for (int t = 0; t < 20; ++t) {
    const Vec2 c = g.vec2(0.5);
    const FlowTrajectory tr = integrate_flow(f, h.point(c[0], c[1]), 15.0, zero, zero, default_options(f));
    CHECK((tr.points.back() - h.basepoint()).norm() <= 1e-5);
    // The chart orbit itself is e^{-t} z.
    CHECK(std::exp(-15.0) * c.norm() <= 1e-6);
  }
}

TEST_CASE("tangential attractor") {
  const SurfacePatch pl = make_surface("plane");
  const TangentAttractor xp = tangential_attractor(pl);
  CHECK(xp.kind() == AttractorKind::tangential_projection);
  Gen g(3);
  for (int t = 0; t < 10; ++t) {
    const Vec2 c = g.vec2(0.5);
    CHECK((xp.ambient(c[0], c[1]) + (pl.point(c[0], c[1]) - pl.basepoint())).norm() <= 1e-15);
  }
  const SurfacePatch bowl = make_surface("graph", {{"a", 1.0}, {"b", 0.0}, {"c", 1.0}});
  const TangentAttractor xb = tangential_attractor(bowl);
  check_normalized(xb);
  const Mat nab = fd_nabla_x(xb, 0.0, 0.0);
  const Mat jac = fd_jacobian(bowl, 0.0, 0.0);
  for (int i = 0; i < 2; ++i) CHECK((nab * jac.col(i) + jac.col(i)).norm() <= 1e-8);

  const SurfacePatch h = make_surface("helicoid");
  const TangentAttractor xt = tangential_attractor(h);
  const TangentAttractor xc = conformal_attractor(h);
  check_normalized(xt);
  const auto jt = xt.chart_jet(0, 0);
  const auto jc = xc.chart_jet(0, 0);
  for (int k = 0; k < 2; ++k) {
    CHECK(jt[k].val == doctest::Approx(jc[k].val));
    for (int i = 0; i < 2; ++i) CHECK(std::abs(jt[k].d[i] - jc[k].d[i]) <= 1e-14);
  }
  CHECK((xt.chart_field(0.4, 0.3) - xc.chart_field(0.4, 0.3)).norm() > 1e-3);
}

TEST_CASE("extension of the plane field is affine in the slab") {
  Gen g(5);
  const SurfacePatch pl = make_surface("plane", {{"n", 5}});
  const AmbientExtension e = extend_normal(conformal_attractor(pl));
  CHECK(std::isinf(e.reach()));
  for (int t = 0; t < 20; ++t) {
    const Vec w = pl.basepoint() + g.vec(5, 0.4);
    CHECK((e(w) + (w - pl.basepoint())).norm() <= 1e-12);
  }
  CHECK(ambient_second_derivative(e, g.vec(5), g.vec(5)).norm() <= 1e-9);
}

TEST_CASE("helicoid extension along the normal") {
  const SurfacePatch h = make_surface("helicoid");
  const AmbientExtension e = extend_normal(conformal_attractor(h));
  CHECK(e.reach() == doctest::Approx(1.0).epsilon(1e-12));
  const Vec q = h.basepoint() + 0.01 * v3(0, 1, 0);
  CHECK((e(q) + 0.01 * v3(0, 1, 0)).norm() <= 1e-12);
  const AmbientExtension::Foot foot = e.resolve(q);
  CHECK(std::abs(foot.chart.x) + std::abs(foot.chart.y) <= 1e-12);
  CHECK(std::abs(foot.offsets[0] - 0.01) <= 1e-12);
}

TEST_CASE("extension differential at p is -I") {
  for (const auto& s : {make_surface("helicoid"), make_surface("catenoid_patch"), make_surface("graph"),
                        make_surface("koebe_plane", {{"c", 0.5}, {"n", 4}})}) {
    const TangentAttractor x = s.conformal_flag() ? conformal_attractor(s) : tangential_attractor(s);
    const AmbientExtension e = extend_normal(x);
    const Mat d = ambient_jacobian(e, e.basepoint());
    INFO(s.name());
    CHECK((d + Mat::Identity(s.dim(), s.dim())).norm() <= 1e-8);
    const FrameAtPoint fr = frame_at(s, 0, 0);
    for (const Vec& nu : fr.normal) CHECK((d * nu + nu).norm() <= 1e-8);
    for (const Vec& tv : fr.tangent) CHECK((d * tv + tv).norm() <= 1e-8 * tv.norm());
  }
}

TEST_CASE("extension restricts to the base field") {
  Gen g(7);
  for (const auto& s : {make_surface("helicoid"), make_surface("graph"), make_surface("koebe_plane", {{"c", -0.8}})}) {
    const TangentAttractor x = tangential_attractor(s);
    const AmbientExtension e = extend_normal(x);
    for (int t = 0; t < 10; ++t) {
      const Vec2 c = g.vec2(0.4);
      CHECK((e(s.point(c[0], c[1])) - x.ambient(c[0], c[1])).norm() <= 1e-10);
    }
  }
}

TEST_CASE("points outside the tube are rejected") {
  const SurfacePatch h = make_surface("helicoid");
  const AmbientExtension e = extend_normal(conformal_attractor(h));
  CHECK_THROWS_AS(e(h.basepoint() + 0.2 * v3(0, 1, 0)), OutsideTube);
  CHECK_THROWS_AS(e(v3(50, 50, 50)), OutsideTube);
  CHECK_THROWS_AS(e(Vec::Zero(4)), OutsideTube);
}

TEST_CASE("ambient second derivative is symmetric") {
  Gen g(9);
  const AmbientExtension e = extend_normal(conformal_attractor(make_surface("helicoid")));
  for (int t = 0; t < 10; ++t) {
    const Vec v = g.vec(3);
    const Vec w = g.vec(3);
    CHECK((ambient_second_derivative(e, v, w) - ambient_second_derivative(e, w, v)).norm() <= 1e-10);
  }
}
