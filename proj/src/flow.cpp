#include "bblab/flow.hpp"

#include "bblab/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace bblab {

AmbientField::AmbientField(std::string name, int dim, Vec fixed_point, bool exact_derivatives, Value value,
                           Jacobian jacobian, Second second)
    : name_(std::move(name)),
      dim_(dim),
      fixed_point_(std::move(fixed_point)),
      exact_(exact_derivatives),
      value_(std::move(value)),
      jacobian_(std::move(jacobian)),
      second_(std::move(second)) {
  if (dim < 1 || dim > kMaxDim) throw ConfigError("field dimension must lie in [1, 8]");
  if (fixed_point_.size() != dim) throw ConfigError("fixed point has the wrong dimension");
}

AmbientField AmbientField::from_extension(std::string name, AmbientExtension ext) {
  const int n = ext.dim();
  const Vec p = ext.basepoint();
  auto shared = std::make_shared<const AmbientExtension>(std::move(ext));
  return AmbientField(
      std::move(name), n, p, false, [shared](const Vec& x) { return (*shared)(x); },
      [shared](const Vec& x) { return ambient_jacobian(*shared, x); },
      [shared](const Vec& x, const Vec& a, const Vec& b) { return second_difference(*shared, x, a, b); });
}

namespace {

struct Linear {
  Vec p;
  template <class T>
  void operator()(std::span<const Jet<T>> x, std::span<Jet<T>> out) const {
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = p[static_cast<int>(k)] - x[k];
  }
};

struct Bernoulli {
  double a;
  template <class T>
  void operator()(std::span<const Jet<T>> x, std::span<Jet<T>> out) const {
    out[0] = a * (x[0] * x[0]) - x[0];
  }
};

struct Quadratic {
  double a;
  Vec p;
  template <class T>
  void operator()(std::span<const Jet<T>> x, std::span<Jet<T>> out) const {
    const Jet<T> u0 = x[0] - p[0];
    const Jet<T> u1 = x[1] - p[1];
    const Jet<T> u2 = x[2] - p[2];
    out[0] = a * (u1 * u2) - u0;
    out[1] = a * (u0 * u0) - u1;
    out[2] = a * (u0 * u1) - u2;
  }
};

}  // namespace

AmbientField linear_field(const Vec& fixed_point) {
  return AmbientField::closed_form("linear", static_cast<int>(fixed_point.size()), fixed_point, Linear{fixed_point});
}

AmbientField bernoulli_field(double a) { return AmbientField::closed_form("bernoulli", 1, Vec::Zero(1), Bernoulli{a}); }

AmbientField quadratic_field(double a, const Vec& fixed_point) {
  if (fixed_point.size() != 3) throw ConfigError("quadratic field lives on R^3");
  return AmbientField::closed_form("quadratic", 3, fixed_point, Quadratic{a, fixed_point});
}

FieldCheck check_fixed_point(const AmbientField& f) {
  const Vec& p = f.fixed_point();
  const Mat jac = f.jacobian(p) + Mat::Identity(f.dim(), f.dim());
  Eigen::JacobiSVD<Mat> svd(jac);
  return {f(p).norm(), svd.singularValues()(0)};
}

IntegratorOptions default_options(const AmbientField& f) {
  IntegratorOptions o;
  if (!f.exact_derivatives()) {
    o.rtol = 1e-6;
    o.atol = 1e-8;
  }
  return o;
}

std::vector<double> output_grid(double t_end, int intervals) {
  std::vector<double> t(static_cast<std::size_t>(intervals) + 1);
  for (int k = 0; k <= intervals; ++k) t[static_cast<std::size_t>(k)] = t_end * k / intervals;
  t.back() = t_end;
  return t;
}

namespace {

using State = Eigen::VectorXd;

// Dormand-Prince 5(4) tableau; the field is autonomous so the nodes c_i are not needed.
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
constexpr double kE[7] = {71.0 / 57600, 0.0, -71.0 / 16695, 71.0 / 1920, -17253.0 / 339200, 22.0 / 525, -1.0 / 40};

class VariationalSystem {
 public:
  VariationalSystem(const AmbientField& f, const Vec& v, const Vec& w) : f_(f), n_(f.dim()), v_(v), w_(w) {}

  int size() const { return n_ + n_ * n_ + n_; }

  State pack(const Vec& x, const Mat& m, const Vec& second) const {
    State y(size());
    y.head(n_) = x;
    for (int c = 0; c < n_; ++c) y.segment(n_ + c * n_, n_) = m.col(c);
    y.tail(n_) = second;
    return y;
  }
  Vec point(const State& y) const { return y.head(n_); }
  Mat first(const State& y) const {
    Mat m(n_, n_);
    for (int c = 0; c < n_; ++c) m.col(c) = y.segment(n_ + c * n_, n_);
    return m;
  }
  Vec second(const State& y) const { return y.tail(n_); }

  State rhs(const State& y) const {
    const Vec x = point(y);
    const Mat m = first(y);
    const Vec s = second(y);
    try {
      const Mat jac = f_.jacobian(x);
      const Vec dx = f_(x);
      const Mat dm = jac * m;
      const Vec mv = m * v_;
      const Vec mw = m * w_;
      const Vec ds = f_.second(x, mv, mw) + jac * s;
      if (!dx.allFinite() || !dm.allFinite() || !ds.allFinite()) throw LeftDomain("field is not finite along the trajectory");
      return pack(dx, dm, ds);
    } catch (const OutsideTube& e) {
      throw LeftDomain(std::string("trajectory left the extension tube: ") + e.what());
    } catch (const DegenerateImmersion& e) {
      throw LeftDomain(std::string("trajectory reached a degenerate chart point: ") + e.what());
    }
  }

 private:
  const AmbientField& f_;
  int n_;
  Vec v_, w_;
};

double error_norm(const State& err, const State& y0, const State& y1, const IntegratorOptions& o) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < err.size(); ++i) {
    const double sc = o.atol + o.rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    acc += (err[i] / sc) * (err[i] / sc);
  }
  return std::sqrt(acc / static_cast<double>(err.size()));
}

}  // namespace

FlowTrajectory integrate_flow(const AmbientField& f, const Vec& x0, const std::vector<double>& output_times, const Vec& v,
                              const Vec& w, const IntegratorOptions& opts) {
  const int n = f.dim();
  if (x0.size() != n || v.size() != n || w.size() != n) throw ConfigError("flow vectors must match the field dimension");
  if (output_times.empty() || output_times.front() < 0.0 || !std::is_sorted(output_times.begin(), output_times.end())) {
    throw ConfigError("output times must be sorted and nonnegative");
  }
  const double t_end = output_times.back();
  const double h_floor = 1e-13 * std::max(t_end, 1e-300);

  const VariationalSystem sys(f, v, w);
  State y = sys.pack(x0, Mat::Identity(n, n), Vec::Zero(n));
  State k[7];
  k[0] = sys.rhs(y);

  FlowTrajectory traj;
  auto record = [&](double t) {
    traj.times.push_back(t);
    traj.points.push_back(sys.point(y));
    traj.first_var.push_back(sys.first(y));
    traj.second_var.push_back(sys.second(y));
  };

  double t = 0.0;
  std::size_t next = 0;
  while (next < output_times.size() && output_times[next] <= 0.0) record(output_times[next++]);
  if (next == output_times.size()) return traj;

  // Starting step from the scaled size of the state and its derivative.
  double h;
  {
    State sc = (opts.atol + opts.rtol * y.array().abs()).matrix();
    const double d0 = (y.array() / sc.array()).matrix().norm();
    const double d1 = (k[0].array() / sc.array()).matrix().norm();
    h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h = std::min(h, 0.1 * t_end);
  }

  while (next < output_times.size()) {
    const double target = output_times[next];
    const bool clipped = t + h >= target;
    const double step = clipped ? target - t : h;

    for (int s = 1; s < 7; ++s) {
      State ys = y;
      for (int r = 0; r < s; ++r) {
        if (kA[s][r] != 0.0) ys += (step * kA[s][r]) * k[r];
      }
      k[s] = sys.rhs(ys);
    }
    State y_new = y;
    State err = State::Zero(y.size());
    for (int r = 0; r < 6; ++r) {
      if (kA[6][r] != 0.0) y_new += (step * kA[6][r]) * k[r];
    }
    // Stage 7 is evaluated at y_new (FSAL), so k[6] already holds f(y_new).
    for (int r = 0; r < 7; ++r) err += (step * kE[r]) * k[r];
    const double en = error_norm(err, y, y_new, opts);
    const double factor = std::clamp(en > 0.0 ? 0.9 * std::pow(en, -0.2) : 5.0, 0.2, 5.0);

    if (++traj.steps > opts.max_steps) throw StepFailure("step budget exhausted");
    if (en <= 1.0) {
      t = clipped ? target : t + step;
      y = std::move(y_new);
      k[0] = k[6];
      if (clipped) {
        record(target);
        ++next;
      } else {
        h = step * factor;
      }
      if (clipped) h = std::max(h, step * factor);
    } else {
      ++traj.rejected;
      h = step * factor;
      if (h < h_floor) throw StepFailure("step size fell below 1e-13 T");
    }
  }
  return traj;
}

FlowTrajectory integrate_flow(const AmbientField& f, const Vec& x0, double t_end, const Vec& v, const Vec& w,
                              const IntegratorOptions& opts) {
  return integrate_flow(f, x0, std::vector<double>{0.0, t_end}, v, w, opts);
}

VariationReport check_variation_laws(const AmbientField& f, const Vec& v, const Vec& w,
                                     const std::vector<double>& output_times, const IntegratorOptions& opts) {
  const int n = f.dim();
  const Vec& p = f.fixed_point();
  VariationReport rep;
  rep.w_second = f.second(p, v, w);
  rep.trajectory = integrate_flow(f, p, output_times, v, w, opts);

  const auto& tr = rep.trajectory;
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    const double t = tr.times[i];
    const Mat dev = tr.first_var[i] - std::exp(-t) * Mat::Identity(n, n);
    Eigen::JacobiSVD<Mat> svd(dev);
    rep.first_var_sup = std::max(rep.first_var_sup, svd.singularValues()(0));

    const Vec expected = (1.0 - std::exp(-t)) * rep.w_second;
    const double res = (std::exp(t) * tr.second_var[i] - expected).norm();
    rep.closed_form_residual_sup = std::max(rep.closed_form_residual_sup, res);
    if (t > 0.0) {
      const double scale = expected.norm();
      rep.closed_form_relative_sup = std::max(rep.closed_form_relative_sup, scale > 0.0 ? res / scale : res);
    }
  }
  const double t_end = tr.times.back();
  rep.tail_discrepancy = (std::exp(t_end) * tr.second_var.back() - rep.w_second).norm();
  return rep;
}

}  // namespace bblab
