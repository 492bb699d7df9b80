#pragma once

// Calculus on an embedded surface: induced metric, projectors, second
// fundamental form, Levi-Civita connection and the covariant derivative and
// Hessian of chart-expressed vector fields. All quantities come from jets;
// finite differences appear only in tests.

#include "bblab/surface.hpp"
#include "bblab/types.hpp"

#include <array>
#include <vector>

namespace bblab {

class TangentAttractor;

struct FrameAtPoint {
  Vec point;
  std::array<Vec, 2> tangent;  // f_x, f_y
  std::vector<Vec> normal;     // orthonormal, n - 2 entries
};

/// Tangent rows f_x, f_y and a normal frame obtained by orthonormalizing the
/// ambient basis against the tangent plane, pivoting on the largest residual
/// (ties go to the lowest index). Throws DegenerateImmersion.
FrameAtPoint frame_at(const SurfacePatch& s, double x, double y);

/// Largest operator-norm distance between normal projections built from consecutive frames along a chart path.
double max_frame_jump(const SurfacePatch& s, const std::vector<ChartPoint>& path);

/// Smallest singular value of [f_x f_y] relative to |f_x|; below 1e-10 the immersion counts as degenerate.
inline constexpr double kDegeneracyTol = 1e-10;

/// First-order data at a chart point shared by the operations below.
struct TangentData {
  Mat2 metric;
  Mat2 metric_inv;
  Mat jacobian;  // n x 2, columns f_x, f_y

  Vec push(const Vec2& chart) const { return jacobian * chart; }
  /// Chart coordinates of the tangential projection of an ambient vector.
  Vec2 pull(const Vec& ambient) const;
  Vec tangential(const Vec& ambient) const { return push(pull(ambient)); }
  Vec normal_part(const Vec& ambient) const { return ambient - tangential(ambient); }
};

TangentData tangent_data(const Jet2Vector& j);

/// sigma(df v, df w): normal projection of sum v_i w_j d_i d_j f.
Vec second_fundamental(const SurfacePatch& s, ChartPoint at, const Vec2& v, const Vec2& w);

/// sigma(a, a) for a complexified chart vector (default d/dz).
ComplexVec second_fundamental_complex(const SurfacePatch& s, ChartPoint at, const ComplexChartVec& a = kWirtingerZ);

/// Christoffel symbols gamma[k][i][j] of the induced metric.
using Christoffels = std::array<std::array<std::array<double, 2>, 2>, 2>;

Christoffels christoffels(const SurfacePatch& s, ChartPoint at);

struct ChristoffelJet {
  Christoffels gamma;
  std::array<Christoffels, 2> dgamma;  // dgamma[m][k][i][j] = d_m gamma[k][i][j]
};

/// Christoffel symbols and their first partials, from the 2-jet of the metric.
ChristoffelJet christoffel_jet(const SurfacePatch& s, ChartPoint at);

/// Largest |sigma(u, u)| over unit tangent vectors u, sampled on the standard grid.
double max_normal_curvature(const SurfacePatch& s);

/// True when the sampled second fundamental form vanishes to rounding, relative to the image size.
bool is_planar(const SurfacePatch& s);

/// nabla_v X: tangential projection of the ambient directional derivative of X along df v.
Vec covariant_derivative(const TangentAttractor& field, ChartPoint at, const Vec2& v);

/// (nabla^2 X)(v, w) = (nabla_w nabla X)(v), computed from chart data and Christoffels.
/// Returned as an ambient tangent vector.
Vec covariant_hessian(const TangentAttractor& field, ChartPoint at, const Vec2& v, const Vec2& w);

/// (nabla^2 X)(a, a), complex-bilinear extension (default a = d/dz).
ComplexVec covariant_hessian_complex(const TangentAttractor& field, ChartPoint at, const ComplexChartVec& a = kWirtingerZ);

}  // namespace bblab
