#include "bblab/geometry.hpp"

#include "bblab/attractor.hpp"
#include "bblab/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

namespace bblab {

namespace {

Mat2 metric_of(const Vec& fx, const Vec& fy) {
  Mat2 g;
  g << fx.dot(fx), fx.dot(fy), fy.dot(fx), fy.dot(fy);
  return g;
}

void check_nondegenerate(const Mat2& g) {
  // Smallest singular value of [f_x f_y] is sqrt(lambda_min(G)); lambda_min = det / lambda_max.
  const double tr = g.trace();
  const double det = g.determinant();
  const double disc = std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
  const double lmax = 0.5 * tr + disc;
  const double lmin = lmax > 0.0 ? det / lmax : 0.0;
  const double smin = std::sqrt(std::max(0.0, lmin));
  if (!(lmax > 0.0) || smin <= kDegeneracyTol * std::sqrt(g(0, 0))) {
    throw DegenerateImmersion("f_x and f_y are linearly dependent");
  }
}

std::array<std::array<Vec, 2>, 2> second_partials(const Jet2Vector& j) {
  return {{{second_of(j, 0, 0), second_of(j, 0, 1)}, {second_of(j, 1, 0), second_of(j, 1, 1)}}};
}

}  // namespace

Vec2 TangentData::pull(const Vec& ambient) const { return metric_inv * (jacobian.transpose() * ambient); }

TangentData tangent_data(const Jet2Vector& j) {
  TangentData t;
  const Vec fx = partial_of(j, 0);
  const Vec fy = partial_of(j, 1);
  t.metric = metric_of(fx, fy);
  check_nondegenerate(t.metric);
  t.metric_inv = t.metric.inverse();
  t.jacobian.resize(j.n, 2);
  t.jacobian.col(0) = fx;
  t.jacobian.col(1) = fy;
  return t;
}

FrameAtPoint frame_at(const SurfacePatch& s, double x, double y) {
  const Jet2Vector j = s.jet(x, y);
  const int n = j.n;
  FrameAtPoint fr;
  fr.point = value_of(j);
  fr.tangent = {partial_of(j, 0), partial_of(j, 1)};
  check_nondegenerate(metric_of(fr.tangent[0], fr.tangent[1]));

  std::vector<Vec> basis;
  auto orthogonalize = [&basis](Vec v) {
    // Two passes of modified Gram-Schmidt keep residuals at rounding level.
    for (int pass = 0; pass < 2; ++pass) {
      for (const Vec& b : basis) v -= b.dot(v) * b;
    }
    return v;
  };
  for (const Vec& t : fr.tangent) {
    Vec r = orthogonalize(t);
    basis.push_back(r / r.norm());
  }

  std::vector<bool> used(n, false);
  for (int k = 0; k < n - 2; ++k) {
    int best = -1;
    double best_norm = -1.0;
    Vec best_res;
    for (int e = 0; e < n; ++e) {
      if (used[e]) continue;
      Vec r = orthogonalize(Vec::Unit(n, e));
      const double nr = r.norm();
      if (nr > best_norm) {
        best = e;
        best_norm = nr;
        best_res = r;
      }
    }
    used[best] = true;
    Vec xi = best_res / best_norm;
    basis.push_back(xi);
    fr.normal.push_back(xi);
  }
  return fr;
}

double max_frame_jump(const SurfacePatch& s, const std::vector<ChartPoint>& path) {
  double jump = 0.0;
  Mat prev;
  for (std::size_t i = 0; i < path.size(); ++i) {
    const FrameAtPoint fr = frame_at(s, path[i].x, path[i].y);
    const int n = s.dim();
    Mat frame(n, static_cast<int>(fr.normal.size()));
    for (std::size_t k = 0; k < fr.normal.size(); ++k) frame.col(static_cast<int>(k)) = fr.normal[k];
    if (i > 0) {
      const Mat diff = frame - prev;
      Eigen::JacobiSVD<Mat> svd(diff);
      jump = std::max(jump, svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0);
    }
    prev = frame;
  }
  return jump;
}

Vec second_fundamental(const SurfacePatch& s, ChartPoint at, const Vec2& v, const Vec2& w) {
  const Jet2Vector j = s.jet(at.x, at.y);
  const TangentData t = tangent_data(j);
  const auto h = second_partials(j);
  Vec amb = Vec::Zero(j.n);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) amb += (v[a] * w[b]) * h[a][b];
  }
  return t.normal_part(amb);
}

ComplexVec second_fundamental_complex(const SurfacePatch& s, ChartPoint at, const ComplexChartVec& a) {
  const Jet2Vector j = s.jet(at.x, at.y);
  const TangentData t = tangent_data(j);
  const auto h = second_partials(j);
  std::array<std::array<Vec, 2>, 2> sig;
  for (int i = 0; i < 2; ++i) {
    for (int k = 0; k < 2; ++k) sig[i][k] = t.normal_part(h[i][k]);
  }
  return complexify(a, a, sig);
}

namespace {

// Levi-Civita: gamma^k_ij = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij).
Christoffels levi_civita(const Mat2& ginv, const std::array<Mat2, 2>& dg) {
  Christoffels gam{};
  for (int k = 0; k < 2; ++k) {
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        double acc = 0.0;
        for (int l = 0; l < 2; ++l) acc += ginv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
        gam[k][i][j] = 0.5 * acc;
      }
    }
  }
  return gam;
}

}  // namespace

Christoffels christoffels(const SurfacePatch& s, ChartPoint at) {
  const Jet2Vector j = s.jet(at.x, at.y);
  const TangentData t = tangent_data(j);
  const std::array<Vec, 2> f{partial_of(j, 0), partial_of(j, 1)};
  const auto h = second_partials(j);
  std::array<Mat2, 2> dg;
  for (int m = 0; m < 2; ++m) {
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) dg[m](a, b) = h[a][m].dot(f[b]) + f[a].dot(h[b][m]);
    }
  }
  return levi_civita(t.metric_inv, dg);
}

ChristoffelJet christoffel_jet(const SurfacePatch& s, ChartPoint at) {
  // Outer slot d[i] of the nested jet is the 2-jet of f_i; metric entries become 2-jets.
  const JetVec<Jet2> nj = s.nested_jet(at.x, at.y);
  std::array<JetVec<double>, 2> fi{JetVec<double>(nj.n), JetVec<double>(nj.n)};
  for (int k = 0; k < nj.n; ++k) {
    fi[0][k] = nj[k].d[0];
    fi[1][k] = nj[k].d[1];
  }
  std::array<std::array<Jet2, 2>, 2> g;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) g[a][b] = dot(fi[a], fi[b]);
  }

  Mat2 g0;
  std::array<Mat2, 2> dg;
  std::array<std::array<Mat2, 2>, 2> ddg;  // ddg[m][l](a, b) = d_m d_l g_ab
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      g0(a, b) = g[a][b].val;
      for (int m = 0; m < 2; ++m) {
        dg[m](a, b) = g[a][b].d[m];
        for (int l = 0; l < 2; ++l) ddg[m][l](a, b) = g[a][b].hess(m, l);
      }
    }
  }
  check_nondegenerate(g0);
  const Mat2 ginv = g0.inverse();

  ChristoffelJet out;
  out.gamma = levi_civita(ginv, dg);
  for (int m = 0; m < 2; ++m) {
    // d_m (g^{-1}) = -g^{-1} (d_m g) g^{-1}
    const Mat2 dginv = -ginv * dg[m] * ginv;
    const Christoffels part_a = levi_civita(dginv, dg);
    const Christoffels part_b = levi_civita(ginv, ddg[m]);
    for (int k = 0; k < 2; ++k) {
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) out.dgamma[m][k][i][j] = part_a[k][i][j] + part_b[k][i][j];
      }
    }
  }
  return out;
}

double max_normal_curvature(const SurfacePatch& s) {
  double kmax = 0.0;
  for (const auto& q : sample_grid(s)) {
    const Jet2Vector j = s.jet(q.x, q.y);
    const TangentData t = tangent_data(j);
    const auto h = second_partials(j);
    // Unit tangent directions from an orthonormal chart frame of the metric.
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig{Eigen::Matrix2d(t.metric)};
    const Mat2 to_unit = eig.eigenvectors() * eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal();
    for (int k = 0; k < 16; ++k) {
      const double th = std::numbers::pi * k / 16.0;
      const Vec2 u = to_unit * Vec2(std::cos(th), std::sin(th));
      Vec amb = Vec::Zero(j.n);
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) amb += (u[a] * u[b]) * h[a][b];
      }
      kmax = std::max(kmax, t.normal_part(amb).norm());
    }
  }
  return kmax;
}

bool is_planar(const SurfacePatch& s) {
  const Jet2Vector j = s.jet(0.0, 0.0);
  const double extent = partial_of(j, 0).norm() * s.radius();
  return max_normal_curvature(s) * extent <= 1e-9;
}

Vec covariant_derivative(const TangentAttractor& field, ChartPoint at, const Vec2& v) {
  const SurfacePatch& s = field.host();
  const Jet2Vector j = s.jet(at.x, at.y);
  const TangentData t = tangent_data(j);
  const auto h = second_partials(j);
  const auto c = field.chart_jet(at.x, at.y);
  // d/dv (J c) = sum_i v_i (f_ij c^j + f_j d_i c^j)
  Vec amb = Vec::Zero(j.n);
  for (int i = 0; i < 2; ++i) {
    for (int k = 0; k < 2; ++k) {
      amb += v[i] * (c[k].val * h[i][k] + c[k].d[i] * t.jacobian.col(k));
    }
  }
  return t.tangential(amb);
}

namespace {

// Chart components of (nabla^2 X)(e_i, e_l) = (nabla_l A)^k_i with A^k_i = d_i c^k + gamma^k_ij c^j.
std::array<std::array<Vec2, 2>, 2> hessian_chart(const TangentAttractor& field, ChartPoint at) {
  const auto c = field.chart_jet(at.x, at.y);
  const ChristoffelJet cj = christoffel_jet(field.host(), at);
  const auto& gam = cj.gamma;

  double a[2][2];      // a[k][i] = A^k_i
  double da[2][2][2];  // da[l][k][i] = d_l A^k_i
  for (int k = 0; k < 2; ++k) {
    for (int i = 0; i < 2; ++i) {
      a[k][i] = c[k].d[i];
      for (int m = 0; m < 2; ++m) a[k][i] += gam[k][i][m] * c[m].val;
      for (int l = 0; l < 2; ++l) {
        double acc = c[k].hess(l, i);
        for (int m = 0; m < 2; ++m) acc += cj.dgamma[l][k][i][m] * c[m].val + gam[k][i][m] * c[m].d[l];
        da[l][k][i] = acc;
      }
    }
  }

  std::array<std::array<Vec2, 2>, 2> out;  // out[i][l] = H(e_i, e_l)
  for (int i = 0; i < 2; ++i) {
    for (int l = 0; l < 2; ++l) {
      Vec2 hv;
      for (int k = 0; k < 2; ++k) {
        double acc = da[l][k][i];
        for (int m = 0; m < 2; ++m) acc += gam[k][l][m] * a[m][i] - gam[m][l][i] * a[k][m];
        hv[k] = acc;
      }
      out[i][l] = hv;
    }
  }
  return out;
}

}  // namespace

Vec covariant_hessian(const TangentAttractor& field, ChartPoint at, const Vec2& v, const Vec2& w) {
  const TangentData t = tangent_data(field.host().jet(at.x, at.y));
  const auto hc = hessian_chart(field, at);
  Vec2 acc = Vec2::Zero();
  for (int i = 0; i < 2; ++i) {
    for (int l = 0; l < 2; ++l) acc += (v[i] * w[l]) * hc[i][l];
  }
  return t.push(acc);
}

ComplexVec covariant_hessian_complex(const TangentAttractor& field, ChartPoint at, const ComplexChartVec& a) {
  const TangentData t = tangent_data(field.host().jet(at.x, at.y));
  const auto hc = hessian_chart(field, at);
  std::array<std::array<Vec, 2>, 2> amb;
  for (int i = 0; i < 2; ++i) {
    for (int l = 0; l < 2; ++l) amb[i][l] = t.push(hc[i][l]);
  }
  return complexify(a, a, amb);
}

}  // namespace bblab
