#pragma once

#include "bblab/jet.hpp"
#include "bblab/types.hpp"

#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace bblab {

/// Complex arithmetic on a pair of real jets, used to build holomorphic chart maps.
template <class T>
struct ComplexJet {
  Jet<T> re;
  Jet<T> im;

  friend ComplexJet operator+(const ComplexJet& a, const ComplexJet& b) { return {a.re + b.re, a.im + b.im}; }
  friend ComplexJet operator-(const ComplexJet& a, const ComplexJet& b) { return {a.re - b.re, a.im - b.im}; }
  friend ComplexJet operator*(const ComplexJet& a, const ComplexJet& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend ComplexJet operator*(Complex s, const ComplexJet& a) {
    return {s.real() * a.re - s.imag() * a.im, s.real() * a.im + s.imag() * a.re};
  }
  friend ComplexJet operator+(const ComplexJet& a, Complex s) { return {a.re + s.real(), a.im + s.imag()}; }
  friend ComplexJet operator/(const ComplexJet& a, const ComplexJet& b) {
    const Jet<T> inv = reciprocal(b.re * b.re + b.im * b.im);
    return {(a.re * b.re + a.im * b.im) * inv, (a.im * b.re - a.re * b.im) * inv};
  }
};

/// Disc automorphism z -> (z + a) / (1 + conj(a) z); sends 0 to a.
struct MobiusMap {
  Complex a;
  template <class T>
  std::pair<Jet<T>, Jet<T>> operator()(const Jet<T>& x, const Jet<T>& y) const {
    const ComplexJet<T> z{x, y};
    const ComplexJet<T> w = (z + a) / (std::conj(a) * z + Complex(1.0, 0.0));
    return {w.re, w.im};
  }
};

/// Complex-affine chart map z -> scale * z + shift (dilations, rotations, translations).
struct AffineChartMap {
  Complex scale{1.0, 0.0};
  Complex shift{0.0, 0.0};
  template <class T>
  std::pair<Jet<T>, Jet<T>> operator()(const Jet<T>& x, const Jet<T>& y) const {
    const ComplexJet<T> w = scale * ComplexJet<T>{x, y} + shift;
    return {w.re, w.im};
  }
};

/// Quadratic chart map z -> a1 z + a2 z^2: carries the full 2-jet at 0 of a germ.
struct QuadraticChartMap {
  Complex a1{1.0, 0.0};
  Complex a2{0.0, 0.0};
  template <class T>
  std::pair<Jet<T>, Jet<T>> operator()(const Jet<T>& x, const Jet<T>& y) const {
    const ComplexJet<T> z{x, y};
    const ComplexJet<T> w = a1 * z + a2 * (z * z);
    return {w.re, w.im};
  }
};

/// Immersion of the disc of radius rho into R^n, evaluable to 2-jets (and nested jets).
///
/// Immutable after construction; copies share the evaluator.
class SurfacePatch {
 public:
  using Eval2 = std::function<void(const Jet2&, const Jet2&, std::span<Jet2>)>;
  using EvalNested = std::function<void(const NestedJet&, const NestedJet&, std::span<NestedJet>)>;

  SurfacePatch(std::string name, int dim, double radius, bool conformal, Eval2 eval2, EvalNested eval3);

  /// Builds a patch from a functor with a templated
  /// `operator()(const Jet<T>& x, const Jet<T>& y, std::span<Jet<T>> out)`.
  template <class Map>
  static SurfacePatch from_map(std::string name, int dim, double radius, bool conformal, Map map) {
    return SurfacePatch(
        std::move(name), dim, radius, conformal,
        [map](const Jet2& x, const Jet2& y, std::span<Jet2> out) { map(x, y, out); },
        [map](const NestedJet& x, const NestedJet& y, std::span<NestedJet> out) { map(x, y, out); });
  }

  const std::string& name() const { return impl_->name; }
  int dim() const { return impl_->dim; }
  double radius() const { return impl_->radius; }
  bool conformal_flag() const { return impl_->conformal; }

  Jet2Vector jet(double x, double y) const;
  Jet2Vector jet(const Jet2& x, const Jet2& y) const;
  JetVec<Jet2> nested_jet(double x, double y) const;
  JetVec<Jet2> nested_jet(const NestedJet& x, const NestedJet& y) const;
  Vec point(double x, double y) const;
  Vec basepoint() const { return point(0.0, 0.0); }

  /// f o m for a chart map m with templated `operator()(x, y) -> pair<Jet<T>, Jet<T>>`.
  /// Holomorphic chart maps preserve conformality; pass `conformal` to override.
  template <class ChartMap>
  SurfacePatch precomposed(std::string name, ChartMap m, double radius, bool conformal) const {
    auto base = impl_;
    return SurfacePatch(
        std::move(name), impl_->dim, radius, conformal,
        [base, m](const Jet2& x, const Jet2& y, std::span<Jet2> out) {
          const auto [u, v] = m(x, y);
          base->eval2(u, v, out);
        },
        [base, m](const NestedJet& x, const NestedJet& y, std::span<NestedJet> out) {
          const auto [u, v] = m(x, y);
          base->eval3(u, v, out);
        });
  }

  SurfacePatch recentred(Complex a) const;
  SurfacePatch rotated(double theta) const;
  SurfacePatch dilated(double factor) const;

 private:
  struct Impl {
    std::string name;
    int dim;
    double radius;
    bool conformal;
    Eval2 eval2;
    EvalNested eval3;
  };
  std::shared_ptr<const Impl> impl_;
};

/// Chart points used by every sampled invariant: a 7x7 grid on [-rho/2, rho/2]^2.
std::vector<ChartPoint> sample_grid(const SurfacePatch& s);

struct ConformalityCertificate {
  double max_angle_residual = 0.0;   // max |<f_x, f_y>| / (|f_x| |f_y|)
  double max_length_residual = 0.0;  // max ||f_x| - |f_y|| / |f_x|
  bool passed(double tol = 1e-9) const { return max_angle_residual <= tol && max_length_residual <= tol; }
};

ConformalityCertificate conformality_certificate(const SurfacePatch& s);

using ParamMap = std::map<std::string, double>;

/// Registry of built-in surfaces: plane, koebe_plane, helicoid, graph, catenoid_patch.
/// Unknown keys and unknown or out-of-range parameters raise ConfigError.
SurfacePatch make_surface(std::string_view key, const ParamMap& params = {});

std::vector<std::string> surface_keys();

/// Parameter names (with defaults) accepted by a registry key.
ParamMap surface_defaults(std::string_view key);

}  // namespace bblab
