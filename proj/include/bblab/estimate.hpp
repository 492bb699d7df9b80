#pragma once

// Evaluation of the generalized Bieberbach inequality
//
//   | f_zz(0) - sigma(f_z, f_z) + (nabla^2 X)_p(f_z, f_z) | <= 4 |f_z(0)|
//
// together with the supporting identities: the cross-pipeline check of the
// ambient second derivative of an extended attractor, the classical k = 2
// coefficient bound, the composition estimate and the helicoid scaling scan.

#include "bblab/attractor.hpp"
#include "bblab/surface.hpp"
#include "bblab/types.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace bblab {

enum class AttractorChoice { automatic, conformal_pushforward, tangential_projection };

struct EstimateReport {
  std::string surface;
  ComplexVec fz0;
  ComplexVec fzz0;
  ComplexVec sigma_zz;
  ComplexVec hess_zz;
  double lhs = 0.0;    // |fzz0 - sigma_zz + hess_zz|
  double rhs = 0.0;    // 4 |fz0|
  double slack = 0.0;  // rhs - lhs
  AttractorKind attractor_kind = AttractorKind::conformal_pushforward;
};

/// Picks the attractor used for a theorem evaluation. `automatic` uses the
/// affine field -(w - p) on planar surfaces and the pushforward of -z otherwise.
/// The tangential projection is admissible only on planar surfaces (elsewhere
/// it is not conformal); requesting it on a curved surface throws AttractorNotAdmissible.
TangentAttractor theorem_attractor(const SurfacePatch& s, AttractorChoice choice = AttractorChoice::automatic);

/// Throws NotConformal or DegenerateImmersion.
EstimateReport evaluate_theorem(const SurfacePatch& s, AttractorChoice choice = AttractorChoice::automatic);

struct HessianIdentityDetail {
  Vec ambient;    // (d^2 X~)_p(df v, df w), finite differences on the extension
  Vec intrinsic;  // (nabla^2 X)_p(v, w) - sigma(v, w), jets and Christoffels
  double residual = 0.0;
  double scaled_residual = 0.0;  // residual / (1 + |intrinsic|)
};

HessianIdentityDetail hessian_identity_detail(const AmbientExtension& ext, const Vec2& v, const Vec2& w);
/// |ambient - intrinsic| for chart vectors v, w at the basepoint.
double hessian_identity_residual(const TangentAttractor& x, const Vec2& v, const Vec2& w);

/// Taylor germ a_1 z + a_2 z^2 + ... at 0 of a holomorphic function (univalence is declared by the caller).
class HolomorphicGerm {
 public:
  HolomorphicGerm(std::string name, std::vector<Complex> taylor, double radius = 1.0);

  const std::string& name() const { return name_; }
  /// Coefficient a_k, k >= 1; zero beyond the stored order.
  Complex coefficient(int k) const;
  const std::vector<Complex>& taylor() const { return taylor_; }
  double radius() const { return radius_; }

 private:
  std::string name_;
  std::vector<Complex> taylor_;
  double radius_;
};

HolomorphicGerm identity_germ();
HolomorphicGerm scaled_germ(Complex s);
/// z / (1 - c z)^2 with a_k = k c^{k-1}.
HolomorphicGerm koebe_germ(Complex c, int order = 8);
/// (M_a(z) - a) / (1 + |a|) for M_a(z) = (z + a)/(1 + conj(a) z): univalent, D -> D, fixes 0.
HolomorphicGerm mobius_shift_germ(Complex a, int order = 8);

struct BieberbachCheck {
  double ratio = 0.0;  // |h''(0)| / |h'(0)| = 2 |a_2 / a_1|
  bool satisfied = false;
};

/// Throws ZeroDerivative when a_1 = 0.
BieberbachCheck classical_bieberbach(const HolomorphicGerm& h);

struct CompositionReport {
  ComplexVec fz, fzz, gz, gzz;
  Complex zeta;  // phi'(0)^2 / |phi'(0)|^2
  double lhs = 0.0;
  double rhs = 0.0;  // 4 / |g_z(0)|
  double margin = 0.0;
};

/// Composition estimate for g = f o phi. Throws ZeroDerivative.
CompositionReport composition_check(const SurfacePatch& f, const HolomorphicGerm& phi);

/// LHS of the composition estimate at an arbitrary unimodular zeta.
double composition_lhs(const CompositionReport& r, Complex zeta);

struct ZetaScan {
  Complex zeta_min;
  double lhs_min = 0.0;
  double distance_to_analytic = 0.0;  // |zeta_min - zeta|
};

/// Minimizes the LHS over |zeta| = 1 on a grid, refined by golden-section search.
ZetaScan scan_zeta(const CompositionReport& r, int grid_points = 3600);

struct ScanRow {
  double R = 0.0;
  double naive_ratio = 0.0;      // |f_zz| / |f_z|
  double geometric_ratio = 0.0;  // |f_zz - sigma(f_z, f_z)| / |f_z|
  double slack = 0.0;            // full inequality slack
};

/// f(z) = g(z0 + R z) for the helicoid g; z0 is the basepoint in the chart of g.
std::vector<ScanRow> helicoid_scan(std::span<const double> r_values, Complex z0 = {0.0, 0.0});

struct BatteryCase {
  int id = 0;
  std::string key;
  ParamMap params;
  Complex mobius{0.0, 0.0};
};

/// Seeded randomized conformal cases over {plane, koebe_plane(|c| <= 1), helicoid(r <= 0.8)}
/// times Mobius recentrings |a| <= 0.8. The first two cases are the plane and the Koebe equality case.
std::vector<BatteryCase> theorem_battery(std::uint64_t seed, int count);

SurfacePatch build_case(const BatteryCase& c);

/// Default tolerance for slack >= -tol.
inline constexpr double kSlackTol = 1e-9;

}  // namespace bblab
