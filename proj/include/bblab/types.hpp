#pragma once

#include <Eigen/Core>

#include <array>
#include <complex>

namespace bblab {

inline constexpr int kMaxDim = 8;

/// Ambient vector, dense, at most kMaxDim entries, never heap allocated.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;
using Vec2 = Eigen::Matrix<double, 2, 1, Eigen::DontAlign>;
using Mat2 = Eigen::Matrix<double, 2, 2, Eigen::DontAlign>;

using Complex = std::complex<double>;

struct ChartPoint {
  double x = 0.0;
  double y = 0.0;
};

/// Complexified chart vector alpha*d/dx + beta*d/dy.
struct ComplexChartVec {
  Complex dx;
  Complex dy;
};

/// The Wirtinger direction d/dz = (d/dx - i d/dy) / 2.
inline constexpr ComplexChartVec kWirtingerZ{Complex(0.5, 0.0), Complex(0.0, -0.5)};

/// Vector of C^n stored as separate real and imaginary parts.
struct ComplexVec {
  Vec re;
  Vec im;

  ComplexVec() = default;
  ComplexVec(Vec real, Vec imag) : re(std::move(real)), im(std::move(imag)) {}
  static ComplexVec zero(int n) { return {Vec::Zero(n), Vec::Zero(n)}; }

  int size() const { return static_cast<int>(re.size()); }
  Complex operator[](int k) const { return {re[k], im[k]}; }

  /// Hermitian norm sqrt(sum |v_k|^2); the norm used by every estimate comparison.
  double norm() const { return std::sqrt(re.squaredNorm() + im.squaredNorm()); }

  friend ComplexVec operator+(const ComplexVec& a, const ComplexVec& b) { return {a.re + b.re, a.im + b.im}; }
  friend ComplexVec operator-(const ComplexVec& a, const ComplexVec& b) { return {a.re - b.re, a.im - b.im}; }
  friend ComplexVec operator*(Complex s, const ComplexVec& a) {
    return {s.real() * a.re - s.imag() * a.im, s.real() * a.im + s.imag() * a.re};
  }
  friend ComplexVec operator*(double s, const ComplexVec& a) { return {s * a.re, s * a.im}; }
  ComplexVec conj() const { return {re, -im}; }
};

/// Sum over i, j of a_i b_j T(e_i, e_j) for a real-bilinear T given by its values on the chart basis.
inline ComplexVec complexify(const ComplexChartVec& a, const ComplexChartVec& b, const std::array<std::array<Vec, 2>, 2>& t) {
  const std::array<Complex, 2> ca{a.dx, a.dy};
  const std::array<Complex, 2> cb{b.dx, b.dy};
  ComplexVec out = ComplexVec::zero(static_cast<int>(t[0][0].size()));
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      out = out + (ca[i] * cb[j]) * ComplexVec(t[i][j], Vec::Zero(t[i][j].size()));
    }
  }
  return out;
}

}  // namespace bblab
