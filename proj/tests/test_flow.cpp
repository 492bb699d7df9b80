#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "bblab/attractor.hpp"
#include "bblab/errors.hpp"
#include "bblab/flow.hpp"
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

Vec scalar(double a) { return Vec::Constant(1, a); }

/// Closed-form flow of x' = -x + a x^2.
double bernoulli_flow(double a, double t, double x0) {
  return std::exp(-t) * x0 / (1.0 - a * x0 * (1.0 - std::exp(-t)));
}

AmbientField helicoid_field() {
  return AmbientField::from_extension("helicoid", extend_normal(conformal_attractor(make_surface("helicoid"))));
}

}  // namespace

TEST_CASE("fixed-point hypotheses") {
  const Vec p = v3(0.2, -0.1, 0.4);
  for (const auto& f : {linear_field(p), quadratic_field(0.7, p), helicoid_field()}) {
    const FieldCheck c = check_fixed_point(f);
    CHECK(c.value_residual <= 1e-12);
    CHECK(c.jacobian_residual <= 1e-8);
  }
  CHECK(check_fixed_point(bernoulli_field(0.3)).jacobian_residual == 0.0);
}

TEST_CASE("closed-form derivatives match finite differences") {
  Gen g(2);
  const Vec p = v3(0.2, -0.1, 0.4);
  const AmbientField f = quadratic_field(0.7, p);
  for (int t = 0; t < 10; ++t) {
    const Vec x = p + g.vec(3, 0.5);
    const Vec a = g.vec(3);
    const Vec b = g.vec(3);
    const double h = 1e-5;
    const Vec fd1 = (f(x + h * a) - f(x - h * a)) / (2 * h);
    CHECK((f.jacobian(x) * a - fd1).norm() <= 1e-8);
    const double k = 1e-3;
    const Vec fd2 = (f(x + k * (a + b)) - f(x + k * (a - b)) - f(x - k * (a - b)) + f(x - k * (a + b))) / (4 * k * k);
    CHECK((f.second(x, a, b) - fd2).norm() <= 1e-6);
  }
}

TEST_CASE("linear field") {
  const Vec p = v3(1, 2, 3);
  const AmbientField f = linear_field(p);
  const FlowTrajectory tr = integrate_flow(f, p, output_grid(5.0, 10), v3(1, 0, 0), v3(0, 1, 1), IntegratorOptions{});
  REQUIRE(tr.times.size() == 11);
  CHECK((tr.first_var.front() - Mat::Identity(3, 3)).norm() == 0.0);
  CHECK(tr.second_var.front().norm() == 0.0);
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    CHECK((tr.points[i] - p).norm() == 0.0);
    CHECK((tr.first_var[i] - std::exp(-tr.times[i]) * Mat::Identity(3, 3)).norm() <= 1e-9);
    CHECK(tr.second_var[i].norm() == 0.0);
  }
}

TEST_CASE("Bernoulli second variation at t = 1") {
  const double a = 0.3;
  const FlowTrajectory tr = integrate_flow(bernoulli_field(a), scalar(0.0), 1.0, scalar(1.0), scalar(1.0), IntegratorOptions{});
  const double closed = 2.0 * a * std::exp(-1.0) * (1.0 - std::exp(-1.0));
  CHECK(std::abs(tr.second_var.back()[0] - closed) <= 1e-7);
  // Independent oracle: second difference of the explicit flow in x0.
  const double h = 1e-4;
  const double fd = (bernoulli_flow(a, 1, h) - 2 * bernoulli_flow(a, 1, 0) + bernoulli_flow(a, 1, -h)) / (h * h);
  CHECK(std::abs(tr.second_var.back()[0] - fd) <= 1e-7);
  CHECK(std::abs(closed - 0.1395264948) <= 1e-10);
}

TEST_CASE("Bernoulli variation laws up to T = 10") {
  const AmbientField f = bernoulli_field(0.3);
  const VariationReport r = check_variation_laws(f, scalar(1.0), scalar(1.0), output_grid(10.0, 40), IntegratorOptions{});
  CHECK(r.w_second[0] == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(r.first_var_sup <= 1e-6);
  CHECK(r.closed_form_residual_sup <= 1e-7);
  CHECK(r.tail_discrepancy <= std::exp(-10.0) * 0.6 + 1e-7);
  const VariationReport pts = check_variation_laws(f, scalar(1.0), scalar(1.0), {0.0, 1.0, 5.0, 10.0}, IntegratorOptions{});
  CHECK(pts.closed_form_relative_sup <= 1e-7);
}

TEST_CASE("helicoid extension first variation") {
  const AmbientField f = helicoid_field();
  const VariationReport r =
      check_variation_laws(f, v3(1, 0, 0), v3(0, 0, 1), output_grid(10.0, 20), IntegratorOptions{});
  CHECK(r.first_var_sup <= 1e-6);
  CHECK(r.closed_form_relative_sup <= 1e-6);
}

TEST_CASE("helicoid orbit reaches p by T = 15") {
  const SurfacePatch h = make_surface("helicoid");
  const AmbientField f = helicoid_field();
  const FlowTrajectory tr = integrate_flow(f, h.point(0.5, 0.3), 15.0, v3(1, 0, 0), v3(1, 0, 0), default_options(f));
  CHECK((tr.points.back() - h.basepoint()).norm() <= 1e-5);
}

TEST_CASE("flow semigroup") {
  Gen g(4);
  const Vec p = v3(0.2, -0.1, 0.4);
  const AmbientField f = quadratic_field(0.5, p);
  const Vec zero = Vec::Zero(3);
  for (int t = 0; t < 10; ++t) {
    const double s1 = g.uniform(0.0, 2.0);
    const double s2 = g.uniform(0.0, 2.0);
    const Vec x = p + g.vec(3, 0.3);
    const Vec direct = integrate_flow(f, x, s1 + s2, zero, zero, IntegratorOptions{}).points.back();
    const Vec mid = integrate_flow(f, x, s2, zero, zero, IntegratorOptions{}).points.back();
    const Vec composed = integrate_flow(f, mid, s1, zero, zero, IntegratorOptions{}).points.back();
    CHECK((direct - composed).norm() <= 1e-8);
  }
}

TEST_CASE("second variation satisfies dV/dt = -V + e^{-2t} W") {
  const Vec p = v3(0.2, -0.1, 0.4);
  const Vec v = v3(1, 0.5, -0.2);
  const Vec w = v3(0.3, -1, 0.7);
  for (const auto& f : {quadratic_field(0.8, p), helicoid_field()}) {
    const Vec W = f.second(f.fixed_point(), v, w);
    const double h = 1e-3;
    std::vector<double> times;
    for (double t : {0.5, 1.0, 2.0, 4.0}) {
      times.push_back(t - h);
      times.push_back(t);
      times.push_back(t + h);
    }
    const FlowTrajectory tr = integrate_flow(f, f.fixed_point(), times, v, w, IntegratorOptions{});
    for (std::size_t i = 1; i < times.size(); i += 3) {
      const Vec dv = (tr.second_var[i + 1] - tr.second_var[i - 1]) / (2 * h);
      const Vec rhs = -tr.second_var[i] + std::exp(-2 * times[i]) * W;
      CHECK((dv - rhs).norm() <= 1e-6);
    }
  }
}

TEST_CASE("first-variation residual scales with the tolerance") {
  for (const auto& f : {bernoulli_field(0.3), helicoid_field()}) {
    const Vec v = Vec::Unit(f.dim(), 0);
    std::vector<double> res;
    for (double tol : {1e-6, 1e-8, 1e-10}) {
      IntegratorOptions o;
      o.rtol = tol;
      o.atol = 1e-2 * tol;
      res.push_back(check_variation_laws(f, v, v, output_grid(10.0, 20), o).first_var_sup);
    }
    INFO(f.name(), " ", res[0], " ", res[1], " ", res[2]);
    CHECK(res[0] / res[1] >= 20.0);
    CHECK(res[0] / res[1] <= 500.0);
    CHECK(res[1] / res[2] >= 20.0);
    CHECK(res[1] / res[2] <= 500.0);
  }
}

TEST_CASE("integrator errors") {
  const AmbientField f = bernoulli_field(0.3);
  CHECK_THROWS_AS(integrate_flow(f, Vec::Zero(2), 1.0, scalar(1), scalar(1), IntegratorOptions{}), ConfigError);
  CHECK_THROWS_AS(integrate_flow(f, scalar(0), std::vector<double>{1.0, 0.5}, scalar(1), scalar(1), IntegratorOptions{}),
                  ConfigError);
  IntegratorOptions tiny;
  tiny.max_steps = 3;
  CHECK_THROWS_AS(integrate_flow(f, scalar(0.5), 10.0, scalar(1), scalar(1), tiny), StepFailure);
  // Finite-time blow-up of x' = -x + x^2 from x0 = 2 at t = log 2.
  CHECK_THROWS_AS(integrate_flow(bernoulli_field(1.0), scalar(2.0), 1.0, scalar(1), scalar(1), IntegratorOptions{}),
                  Error);
  const SurfacePatch h = make_surface("helicoid");
  const AmbientField hf = helicoid_field();
  CHECK_THROWS_AS(integrate_flow(hf, h.basepoint() + v3(0, 0.3, 0), 1.0, v3(1, 0, 0), v3(1, 0, 0), default_options(hf)),
                  LeftDomain);
}

TEST_CASE("default options relax tolerances for extensions") {
  CHECK(default_options(bernoulli_field(0.1)).rtol == 1e-10);
  CHECK(default_options(helicoid_field()).rtol == 1e-6);
  const auto grid = output_grid(3.0, 7);
  CHECK(grid.size() == 8);
  CHECK(grid.back() == 3.0);
}
