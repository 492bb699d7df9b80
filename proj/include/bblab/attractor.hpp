#pragma once

// Normalized attractors on a surface patch and their extension off the surface.

#include "bblab/surface.hpp"
#include "bblab/types.hpp"

#include <functional>
#include <string_view>

namespace bblab {

enum class AttractorKind { conformal_pushforward, tangential_projection };

std::string_view to_string(AttractorKind kind);

/// Tangent vector field on a patch, stored through its chart components.
/// Invariants: the chart field vanishes at the origin and (nabla X)_p = -I.
class TangentAttractor {
 public:
  /// 2-jet of the chart components (c^0, c^1) at a chart point.
  using ChartJetFn = std::function<std::array<Jet2, 2>(double, double)>;

  TangentAttractor(SurfacePatch host, AttractorKind kind, ChartJetFn chart_jet);

  const SurfacePatch& host() const { return host_; }
  AttractorKind kind() const { return kind_; }

  std::array<Jet2, 2> chart_jet(double x, double y) const { return chart_jet_(x, y); }
  Vec2 chart_field(double x, double y) const;
  /// Pushforward df(c) as an ambient vector.
  Vec ambient(double x, double y) const;

 private:
  SurfacePatch host_;
  AttractorKind kind_;
  ChartJetFn chart_jet_;
};

/// Pushforward of the holomorphic field -z through a conformal chart.
/// Throws NotConformal when the patch fails its conformality certificate.
TangentAttractor conformal_attractor(const SurfacePatch& s);

/// X(q) = -Proj_{T_q}(q - p); works on any immersion, conformal or not.
TangentAttractor tangential_attractor(const SurfacePatch& s);

/// Extension of a tangent field to a tube around the surface:
/// X~(q + sum s_i xi_i(q)) = X(q) - sum s_i xi_i(q).
class AmbientExtension {
 public:
  struct Foot {
    ChartPoint chart;
    Vec offsets;  // s_i in the normal frame at the foot point
    int iterations = 0;
  };

  explicit AmbientExtension(TangentAttractor base);

  const TangentAttractor& base() const { return base_; }
  int dim() const { return base_.host().dim(); }
  const Vec& basepoint() const { return basepoint_; }
  /// Reach estimate 1 / (max sampled normal curvature); infinite for planar patches.
  double reach() const { return reach_; }
  double tube_radius() const { return 0.05 * reach_; }
  /// Ambient length used to size finite-difference stencils.
  double length_scale() const { return std::min(1.0, reach_); }

  /// Projected-Newton decomposition of an ambient point. Throws OutsideTube.
  Foot resolve(const Vec& q) const;
  Vec operator()(const Vec& q) const;

 private:
  bool newton(const Vec& q, ChartPoint& z, int& iterations) const;

  TangentAttractor base_;
  Vec basepoint_;
  double reach_;
};

AmbientExtension extend_normal(const TangentAttractor& x);

/// Central 4-point mixed stencil for d^2 F(v, w) at an arbitrary ambient point.
Vec second_difference(const AmbientExtension& e, const Vec& at, const Vec& v, const Vec& w);

/// (d^2 X~)_p(v, w) at the basepoint, step 1e-3 times the length scale.
Vec ambient_second_derivative(const AmbientExtension& e, const Vec& v, const Vec& w);

/// Central-difference Jacobian of the extension, step h.
Mat ambient_jacobian(const AmbientExtension& e, const Vec& at, double h = 1e-5);

}  // namespace bblab
