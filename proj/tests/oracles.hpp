#pragma once
// Independent reference computations used only by tests.
#include <array>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <complex>
#include <numbers>

namespace oracle_ref {

using cplx = std::complex<double>;
using Mat3 = std::array<std::array<double, 3>, 3>;
constexpr double pi = std::numbers::pi;

inline Mat3 rot_z(double a) {
  const double c = std::cos(a), s = std::sin(a);
  return {{{c, -s, 0}, {s, c, 0}, {0, 0, 1}}};
}
inline Mat3 rot_y(double b) {
  const double c = std::cos(b), s = std::sin(b);
  return {{{c, 0, s}, {0, 1, 0}, {-s, 0, c}}};
}
inline Mat3 mul(const Mat3 &A, const Mat3 &B) {
  Mat3 C{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        C[i][j] += A[i][k] * B[k][j];
  return C;
}
inline Mat3 euler(double a, double b, double g) {
  return mul(rot_z(a), mul(rot_y(b), rot_z(g)));
}
inline std::array<double, 3> apply_T(const Mat3 &R,
                                     const std::array<double, 3> &v) {
  std::array<double, 3> o{};
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k)
      o[i] += R[k][i] * v[k];
  return o;
}

// Racah formula with plain factorials in exact rational arithmetic.
// Arguments are integers (j and m integral).
inline double racah3j(int j1, int j2, int j3, int m1, int m2, int m3) {
  namespace mp = boost::multiprecision;
  if (m1 + m2 + m3 != 0 || j3 < std::abs(j1 - j2) || j3 > j1 + j2 ||
      std::abs(m1) > j1 || std::abs(m2) > j2 || std::abs(m3) > j3)
    return 0.0;
  auto f = [](int n) {
    mp::cpp_int r = 1;
    for (int i = 2; i <= n; ++i)
      r *= i;
    return r;
  };
  mp::cpp_rational pre(f(j1 + j2 - j3) * f(j1 - j2 + j3) * f(-j1 + j2 + j3),
                       f(j1 + j2 + j3 + 1));
  pre *= f(j1 + m1) * f(j1 - m1) * f(j2 + m2) * f(j2 - m2) * f(j3 + m3) *
         f(j3 - m3);
  mp::cpp_rational s = 0;
  for (int k = 0; k <= j1 + j2 + j3; ++k) {
    const int a[6] = {k, j3 - j2 + k + m1, j3 - j1 + k - m2,
                      j1 + j2 - j3 - k, j1 - k - m1, j2 - k + m2};
    bool ok = true;
    for (int x : a)
      ok = ok && x >= 0;
    if (!ok)
      continue;
    mp::cpp_int d = 1;
    for (int x : a)
      d *= f(x);
    s += mp::cpp_rational((k % 2) ? -1 : 1, d);
  }
  if (s == 0)
    return 0.0;
  const mp::cpp_rational v2 = s * s * pre;
  using big = mp::cpp_bin_float_100;
  big v = mp::sqrt(big(mp::numerator(v2)) / big(mp::denominator(v2)));
  const int sg = (s < 0 ? -1 : 1) * (((j1 - j2 - m3) % 2 == 0) ? 1 : -1);
  return sg * v.convert_to<double>();
}

// spherical components of a complex vector: v_q = e_q . v
inline cplx sph_component(int q, const std::array<cplx, 3> &v) {
  const double r2 = std::sqrt(0.5);
  const cplx i(0, 1);
  if (q == 0)
    return v[2];
  if (q == 1)
    return -r2 * (v[0] + i * v[1]);
  return r2 * (v[0] - i * v[1]);
}

// spherical basis vector e_q in cartesian components
inline std::array<cplx, 3> basis(int q) {
  const double r2 = std::sqrt(0.5);
  const cplx i(0, 1);
  if (q == 0)
    return {0.0, 0.0, 1.0};
  if (q == 1)
    return {-r2, -r2 * i, 0.0};
  return {r2, -r2 * i, 0.0};
}

} // namespace oracle_ref
