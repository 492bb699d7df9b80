#pragma once

// Ambient flows with their first and second variational equations.

#include "bblab/attractor.hpp"
#include "bblab/jet.hpp"
#include "bblab/types.hpp"

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace bblab {

/// Twice-differentiable vector field on (a domain of) R^n with a designated fixed point.
///
/// Derivatives come from jets restricted to planes for closed-form fields, and
/// from central differences for surface extensions.
class AmbientField {
 public:
  using Value = std::function<Vec(const Vec&)>;
  using Directional = std::function<Vec(const Vec&, const Vec&)>;
  using Second = std::function<Vec(const Vec&, const Vec&, const Vec&)>;
  using Jacobian = std::function<Mat(const Vec&)>;

  AmbientField(std::string name, int dim, Vec fixed_point, bool exact_derivatives, Value value, Jacobian jacobian,
               Second second);

  /// Closed-form field from a functor with a templated
  /// `operator()(std::span<const Jet<T>> x, std::span<Jet<T>> out)`.
  /// Derivatives along a, b come from the 2-jet of s, t -> F(x + s a + t b).
  template <class Fn>
  static AmbientField closed_form(std::string name, int dim, Vec fixed_point, Fn fn) {
    auto plane_jet = [fn, dim](const Vec& x, const Vec& a, const Vec& b) {
      const auto [s, t] = lift_chart(0.0, 0.0);
      std::array<Jet2, kMaxDim> in{};
      for (int k = 0; k < dim; ++k) in[k] = x[k] + a[k] * s + b[k] * t;
      Jet2Vector out(dim);
      fn(std::span<const Jet2>(in.data(), dim), out.span());
      return out;
    };
    auto value = [plane_jet, dim](const Vec& x) {
      const Vec zero = Vec::Zero(dim);
      return value_of(plane_jet(x, zero, zero));
    };
    auto jacobian = [plane_jet, dim](const Vec& x) {
      Mat jac(dim, dim);
      for (int k = 0; k < dim; k += 2) {
        const Vec a = Vec::Unit(dim, k);
        const Vec b = k + 1 < dim ? Vec(Vec::Unit(dim, k + 1)) : Vec(Vec::Zero(dim));
        const Jet2Vector j = plane_jet(x, a, b);
        jac.col(k) = partial_of(j, 0);
        if (k + 1 < dim) jac.col(k + 1) = partial_of(j, 1);
      }
      return jac;
    };
    auto second = [plane_jet](const Vec& x, const Vec& a, const Vec& b) { return second_of(plane_jet(x, a, b), 0, 1); };
    return AmbientField(std::move(name), dim, std::move(fixed_point), true, value, jacobian, second);
  }

  /// Field given by a normal extension; derivatives by central differences.
  static AmbientField from_extension(std::string name, AmbientExtension ext);

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  const Vec& fixed_point() const { return fixed_point_; }
  bool exact_derivatives() const { return exact_; }

  Vec operator()(const Vec& x) const { return value_(x); }
  Mat jacobian(const Vec& x) const { return jacobian_(x); }
  /// d^2 F_x(a, b).
  Vec second(const Vec& x, const Vec& a, const Vec& b) const { return second_(x, a, b); }

 private:
  std::string name_;
  int dim_;
  Vec fixed_point_;
  bool exact_;
  Value value_;
  Jacobian jacobian_;
  Second second_;
};

/// F(x) = -(x - p).
AmbientField linear_field(const Vec& fixed_point);
/// One-dimensional F(x) = -x + a x^2 with fixed point 0.
AmbientField bernoulli_field(double a);
/// F(x) = -u + a (u_1 u_2, u_0^2, u_0 u_1), u = x - p, on R^3.
AmbientField quadratic_field(double a, const Vec& fixed_point);

struct FieldCheck {
  double value_residual;     // |F(p)|
  double jacobian_residual;  // |dF_p + I| (operator 2-norm)
};

/// Attractor hypotheses at the fixed point: F(p) = 0 and dF_p = -I.
FieldCheck check_fixed_point(const AmbientField& f);

struct IntegratorOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  std::size_t max_steps = 1'000'000;
};

/// Default options for a field: extensions relax the tolerance to 1e-6.
IntegratorOptions default_options(const AmbientField& f);

struct FlowTrajectory {
  std::vector<double> times;
  std::vector<Vec> points;
  std::vector<Mat> first_var;   // (d eta_t)_{x0}
  std::vector<Vec> second_var;  // (d^2 eta_t)_{x0}(v, w)
  std::size_t steps = 0;
  std::size_t rejected = 0;
};

/// Adaptive Dormand-Prince 5(4) integration of the flow and its first and second
/// variational equations, recorded at the requested output times (sorted, >= 0).
/// Throws LeftDomain when the field cannot be evaluated, StepFailure when the
/// step size falls below 1e-13 T or the step budget is exhausted.
FlowTrajectory integrate_flow(const AmbientField& f, const Vec& x0, const std::vector<double>& output_times, const Vec& v,
                              const Vec& w, const IntegratorOptions& opts);
FlowTrajectory integrate_flow(const AmbientField& f, const Vec& x0, double t_end, const Vec& v, const Vec& w,
                              const IntegratorOptions& opts);

/// Evenly spaced output grid 0, T/k, ..., T.
std::vector<double> output_grid(double t_end, int intervals);

struct VariationReport {
  Vec w_second;                           // W = (d^2 F)_p(v, w)
  double first_var_sup = 0.0;             // sup_t |(d eta_t)_p - e^{-t} I|
  double closed_form_residual_sup = 0.0;  // sup_t |e^t V(t) - W (1 - e^{-t})|
  double closed_form_relative_sup = 0.0;  // same, divided by |W (1 - e^{-t})| (t > 0)
  double tail_discrepancy = 0.0;          // |e^T V(T) - W|
  FlowTrajectory trajectory;
};

/// Integrates from the fixed point and compares with the exact first-variation
/// law and the closed form e^t V(t) = W (1 - e^{-t}).
VariationReport check_variation_laws(const AmbientField& f, const Vec& v, const Vec& w,
                                     const std::vector<double>& output_times, const IntegratorOptions& opts);

}  // namespace bblab
