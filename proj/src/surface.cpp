#include "bblab/surface.hpp"

#include "bblab/errors.hpp"

#include <cmath>
#include <sstream>

namespace bblab {

SurfacePatch::SurfacePatch(std::string name, int dim, double radius, bool conformal, Eval2 eval2, EvalNested eval3)
    : impl_(std::make_shared<const Impl>(Impl{std::move(name), dim, radius, conformal, std::move(eval2), std::move(eval3)})) {
  if (dim < 2 || dim > kMaxDim) throw ConfigError("ambient dimension must lie in [2, 8]");
  if (!(radius > 0.0)) throw ConfigError("domain radius must be positive");
}

Jet2Vector SurfacePatch::jet(const Jet2& x, const Jet2& y) const {
  Jet2Vector out(impl_->dim);
  impl_->eval2(x, y, out.span());
  return out;
}

Jet2Vector SurfacePatch::jet(double x, double y) const {
  const auto [jx, jy] = lift_chart(x, y);
  return jet(jx, jy);
}

JetVec<Jet2> SurfacePatch::nested_jet(const NestedJet& x, const NestedJet& y) const {
  JetVec<Jet2> out(impl_->dim);
  impl_->eval3(x, y, out.span());
  return out;
}

JetVec<Jet2> SurfacePatch::nested_jet(double x, double y) const {
  const auto [jx, jy] = lift_chart_nested(x, y);
  return nested_jet(jx, jy);
}

Vec SurfacePatch::point(double x, double y) const { return value_of(jet(x, y)); }

SurfacePatch SurfacePatch::recentred(Complex a) const {
  if (std::abs(a) >= 1.0) throw ConfigError("Mobius recentring needs |a| < 1");
  std::ostringstream os;
  os << name() << "@mobius(" << a.real() << "," << a.imag() << ")";
  return precomposed(os.str(), MobiusMap{a}, 1.0, conformal_flag());
}

SurfacePatch SurfacePatch::rotated(double theta) const {
  std::ostringstream os;
  os << name() << "@rot(" << theta << ")";
  return precomposed(os.str(), AffineChartMap{std::polar(1.0, theta), {}}, radius(), conformal_flag());
}

SurfacePatch SurfacePatch::dilated(double factor) const {
  if (!(factor > 0.0)) throw ConfigError("dilation factor must be positive");
  std::ostringstream os;
  os << name() << "@dil(" << factor << ")";
  return precomposed(os.str(), AffineChartMap{Complex(factor, 0.0), {}}, radius(), conformal_flag());
}

std::vector<ChartPoint> sample_grid(const SurfacePatch& s) {
  std::vector<ChartPoint> pts;
  pts.reserve(49);
  const double h = 0.5 * s.radius();
  for (int i = 0; i < 7; ++i) {
    for (int j = 0; j < 7; ++j) {
      pts.push_back({-h + h * i / 3.0, -h + h * j / 3.0});
    }
  }
  return pts;
}

ConformalityCertificate conformality_certificate(const SurfacePatch& s) {
  ConformalityCertificate c;
  for (const auto& q : sample_grid(s)) {
    const Jet2Vector j = s.jet(q.x, q.y);
    const Vec fx = partial_of(j, 0);
    const Vec fy = partial_of(j, 1);
    const double nx = fx.norm();
    const double ny = fy.norm();
    c.max_angle_residual = std::max(c.max_angle_residual, std::abs(fx.dot(fy)) / (nx * ny));
    c.max_length_residual = std::max(c.max_length_residual, std::abs(nx - ny) / nx);
  }
  return c;
}

namespace {

struct Plane {
  template <class T>
  void operator()(const Jet<T>& x, const Jet<T>& y, std::span<Jet<T>> out) const {
    for (auto& c : out) c = Jet<T>(0.0);
    out[0] = x;
    out[1] = y;
  }
};

// (Re k, Im k, 0, ...) for the rotated Koebe function k(z) = z / (1 - c z)^2.
struct KoebePlane {
  Complex c;
  template <class T>
  void operator()(const Jet<T>& x, const Jet<T>& y, std::span<Jet<T>> out) const {
    const ComplexJet<T> z{x, y};
    const ComplexJet<T> one_minus = (-c) * z + Complex(1.0, 0.0);
    const ComplexJet<T> k = z / (one_minus * one_minus);
    for (auto& comp : out) comp = Jet<T>(0.0);
    out[0] = k.re;
    out[1] = k.im;
  }
};

// g(r z) with g(x, y) = (sinh x cos y, sinh x sin y, y).
struct Helicoid {
  double r;
  template <class T>
  void operator()(const Jet<T>& x, const Jet<T>& y, std::span<Jet<T>> out) const {
    const Jet<T> u = r * x;
    const Jet<T> v = r * y;
    const Jet<T> sh = sinh(u);
    out[0] = sh * cos(v);
    out[1] = sh * sin(v);
    out[2] = v;
  }
};

struct Graph {
  double a, b, c;
  template <class T>
  void operator()(const Jet<T>& x, const Jet<T>& y, std::span<Jet<T>> out) const {
    out[0] = x;
    out[1] = y;
    out[2] = a * (x * x) + b * (x * y) + c * (y * y);
  }
};

// Conformal catenoid chart (cosh u cos v, cosh u sin v, u) with (u, v) = s (x, y).
struct Catenoid {
  double s;
  template <class T>
  void operator()(const Jet<T>& x, const Jet<T>& y, std::span<Jet<T>> out) const {
    const Jet<T> u = s * x;
    const Jet<T> v = s * y;
    const Jet<T> ch = cosh(u);
    out[0] = ch * cos(v);
    out[1] = ch * sin(v);
    out[2] = u;
  }
};

double take(ParamMap& p, const char* key) {
  const double v = p.at(key);
  p.erase(key);
  return v;
}

int take_dim(ParamMap& p) {
  const double n = take(p, "n");
  if (n != std::floor(n) || n < 3 || n > kMaxDim) throw ConfigError("parameter n must be an integer in [3, 8]");
  return static_cast<int>(n);
}

}  // namespace

std::vector<std::string> surface_keys() { return {"plane", "koebe_plane", "helicoid", "graph", "catenoid_patch"}; }

ParamMap surface_defaults(std::string_view key) {
  if (key == "plane") return {{"n", 3}};
  if (key == "koebe_plane") return {{"c", 1.0}, {"c_im", 0.0}, {"n", 3}};
  if (key == "helicoid") return {{"r", 1.0}};
  if (key == "graph") return {{"a", 0.3}, {"b", 0.1}, {"c", 0.0}};
  if (key == "catenoid_patch") return {{"s", 0.5}};
  throw ConfigError("unknown surface '" + std::string(key) + "'");
}

SurfacePatch make_surface(std::string_view key, const ParamMap& params) {
  ParamMap p = surface_defaults(key);
  for (const auto& [name, value] : params) {
    if (!p.contains(name)) throw ConfigError("surface '" + std::string(key) + "' has no parameter '" + name + "'");
    if (!std::isfinite(value)) throw ConfigError("parameter '" + name + "' must be finite");
    p[name] = value;
  }

  if (key == "plane") {
    const int n = take_dim(p);
    return SurfacePatch::from_map("plane", n, 1.0, true, Plane{});
  }
  if (key == "koebe_plane") {
    const Complex c(take(p, "c"), take(p, "c_im"));
    if (std::abs(c) > 1.0 + 1e-15) throw ConfigError("koebe_plane needs |c| <= 1 for univalence on the disc");
    const int n = take_dim(p);
    return SurfacePatch::from_map("koebe_plane", n, 1.0, true, KoebePlane{c});
  }
  if (key == "helicoid") {
    const double r = take(p, "r");
    if (!(r > 0.0)) throw ConfigError("helicoid needs r > 0");
    return SurfacePatch::from_map("helicoid", 3, 1.0, true, Helicoid{r});
  }
  if (key == "graph") {
    const double a = take(p, "a");
    const double b = take(p, "b");
    const double c = take(p, "c");
    return SurfacePatch::from_map("graph", 3, 1.0, false, Graph{a, b, c});
  }
  if (key == "catenoid_patch") {
    const double s = take(p, "s");
    if (!(s > 0.0 && s < 3.0)) throw ConfigError("catenoid_patch needs 0 < s < 3 for injectivity on the disc");
    return SurfacePatch::from_map("catenoid_patch", 3, 1.0, true, Catenoid{s});
  }
  throw ConfigError("unknown surface '" + std::string(key) + "'");
}

}  // namespace bblab
