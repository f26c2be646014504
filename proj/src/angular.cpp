#include "pecd/angular.hpp"
#include "pecd/error.hpp"
#include <algorithm>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <mutex>
#include <numbers>

namespace pecd::angular {

namespace mp = boost::multiprecision;

namespace {

constexpr int exact_limit = 120; // doubled j
constexpr double pi = std::numbers::pi;

const std::vector<int> &primes() {
  static const std::vector<int> p = [] {
    std::vector<int> out;
    for (int n = 2; n <= 400; ++n) {
      bool is_p = true;
      for (int d : out) {
        if (d * d > n)
          break;
        if (n % d == 0) {
          is_p = false;
          break;
        }
      }
      if (is_p)
        out.push_back(n);
    }
    return out;
  }();
  return p;
}

// exponent of every prime in n! added (times 'sign') to e
void add_factorial(std::vector<int> &e, int n, int sign) {
  const auto &p = primes();
  for (std::size_t i = 0; i < p.size() && p[i] <= n; ++i) {
    int c = 0;
    for (long q = p[i]; q <= n; q *= p[i])
      c += static_cast<int>(n / q);
    e[i] += sign * c;
  }
}

mp::cpp_int prime_power(const std::vector<int> &e, bool positive) {
  mp::cpp_int r = 1;
  const auto &p = primes();
  for (std::size_t i = 0; i < e.size(); ++i) {
    const int x = positive ? e[i] : -e[i];
    if (x > 0)
      r *= mp::pow(mp::cpp_int(p[i]), static_cast<unsigned>(x));
  }
  return r;
}

struct Racah {
  // all integer after halving
  int a1, a2, a3; // j1+j2-j3, j1-j2+j3, -j1+j2+j3
  int J1;         // j1+j2+j3+1
  std::array<int, 6> jm; // j+-m
  int kmin, kmax;
  std::array<int, 6> den0; // denominator arguments at k = 0 (with k signs)
  int phase;              // j1-j2-m3
};

Racah racah_terms(const AngularKey &k) {
  Racah r{};
  r.a1 = (k.j1 + k.j2 - k.j3) / 2;
  r.a2 = (k.j1 - k.j2 + k.j3) / 2;
  r.a3 = (-k.j1 + k.j2 + k.j3) / 2;
  r.J1 = (k.j1 + k.j2 + k.j3) / 2 + 1;
  r.jm = {(k.j1 + k.m1) / 2, (k.j1 - k.m1) / 2, (k.j2 + k.m2) / 2,
          (k.j2 - k.m2) / 2, (k.j3 + k.m3) / 2, (k.j3 - k.m3) / 2};
  const int t1 = (k.j3 - k.j2 + k.m1) / 2; // + k
  const int t2 = (k.j3 - k.j1 - k.m2) / 2; // + k
  const int t3 = r.a1;                     // - k
  const int t4 = (k.j1 - k.m1) / 2;        // - k
  const int t5 = (k.j2 + k.m2) / 2;        // - k
  r.kmin = std::max({0, -t1, -t2});
  r.kmax = std::min({t3, t4, t5});
  r.den0 = {0, t1, t2, t3, t4, t5};
  r.phase = (k.j1 - k.j2 - k.m3) / 2;
  return r;
}

std::array<int, 6> den_args(const Racah &r, int k) {
  return {k, r.den0[1] + k, r.den0[2] + k, r.den0[3] - k, r.den0[4] - k,
          r.den0[5] - k};
}

double exact_value(const AngularKey &key) {
  const Racah r = racah_terms(key);
  if (r.kmin > r.kmax)
    return 0.0;
  const std::size_t np = primes().size();

  std::vector<int> pre(np, 0);
  add_factorial(pre, r.a1, 1);
  add_factorial(pre, r.a2, 1);
  add_factorial(pre, r.a3, 1);
  add_factorial(pre, r.J1, -1);
  for (int x : r.jm)
    add_factorial(pre, x, 1);

  std::vector<std::vector<int>> ek;
  std::vector<int> emax(np, 0);
  for (int k = r.kmin; k <= r.kmax; ++k) {
    std::vector<int> e(np, 0);
    for (int x : den_args(r, k))
      add_factorial(e, x, 1);
    for (std::size_t i = 0; i < np; ++i)
      emax[i] = std::max(emax[i], e[i]);
    ek.push_back(std::move(e));
  }
  mp::cpp_int S = 0;
  for (int k = r.kmin; k <= r.kmax; ++k) {
    std::vector<int> diff(np);
    const auto &e = ek[static_cast<std::size_t>(k - r.kmin)];
    for (std::size_t i = 0; i < np; ++i)
      diff[i] = emax[i] - e[i];
    const mp::cpp_int term = prime_power(diff, true);
    if (k % 2 == 0)
      S += term;
    else
      S -= term;
  }
  if (S == 0)
    return 0.0;
  const int sgn_s = S < 0 ? -1 : 1;

  // value^2 = S^2 * prod p^(pre - 2 emax)
  std::vector<int> net(np);
  for (std::size_t i = 0; i < np; ++i)
    net[i] = pre[i] - 2 * emax[i];
  mp::cpp_int num = S * S * prime_power(net, true);
  mp::cpp_int den = prime_power(net, false);
  const mp::cpp_int g = mp::gcd(num, den);
  num /= g;
  den /= g;
  using big = mp::cpp_bin_float_100;
  const big v = mp::sqrt(big(num) / big(den));
  const int sgn_phase = (r.phase % 2 == 0) ? 1 : -1;
  return sgn_phase * sgn_s * v.convert_to<double>();
}

double lf(int n) { return std::lgamma(n + 1.0); }

double log_value(const AngularKey &key) {
  const Racah r = racah_terms(key);
  if (r.kmin > r.kmax)
    return 0.0;
  double lpre = lf(r.a1) + lf(r.a2) + lf(r.a3) - lf(r.J1);
  for (int x : r.jm)
    lpre += lf(x);
  lpre *= 0.5;
  double s = 0.0;
  for (int k = r.kmin; k <= r.kmax; ++k) {
    double ld = 0.0;
    for (int x : den_args(r, k))
      ld += lf(x);
    const double t = std::exp(lpre - ld);
    s += (k % 2 == 0) ? t : -t;
  }
  return (r.phase % 2 == 0 ? 1 : -1) * s;
}

using Square = std::array<std::array<int, 3>, 3>;

Square regge(const AngularKey &k) {
  return {{{(-k.j1 + k.j2 + k.j3) / 2, (k.j1 - k.j2 + k.j3) / 2,
            (k.j1 + k.j2 - k.j3) / 2},
           {(k.j1 - k.m1) / 2, (k.j2 - k.m2) / 2, (k.j3 - k.m3) / 2},
           {(k.j1 + k.m1) / 2, (k.j2 + k.m2) / 2, (k.j3 + k.m3) / 2}}};
}

} // namespace

AngularKey int_key(int j1, int j2, int j3, int m1, int m2, int m3) {
  return {2 * j1, 2 * j2, 2 * j3, 2 * m1, 2 * m2, 2 * m3};
}

bool selection_ok(const AngularKey &k) {
  const int j[3] = {k.j1, k.j2, k.j3};
  const int m[3] = {k.m1, k.m2, k.m3};
  for (int i = 0; i < 3; ++i) {
    if (j[i] < 0 || std::abs(m[i]) > j[i] || ((j[i] - m[i]) & 1))
      return false;
  }
  if (m[0] + m[1] + m[2] != 0)
    return false;
  if ((k.j1 + k.j2 + k.j3) & 1)
    return false;
  if (k.j3 < std::abs(k.j1 - k.j2) || k.j3 > k.j1 + k.j2)
    return false;
  return true;
}

Canonical canonicalize(const AngularKey &k) {
  const Square R = regge(k);
  const int J = R[0][0] + R[0][1] + R[0][2];
  static constexpr int perms[6][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1},
                                      {1, 0, 2}, {0, 2, 1}, {2, 1, 0}};
  Square best{};
  int best_sign = 1;
  bool first = true;
  for (int t = 0; t < 2; ++t) {
    for (int rp = 0; rp < 6; ++rp) {
      for (int cp = 0; cp < 6; ++cp) {
        Square S;
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b) {
            const int ra = perms[rp][a], cb = perms[cp][b];
            S[a][b] = t ? R[cb][ra] : R[ra][cb];
          }
        const bool odd = ((rp >= 3) != (cp >= 3));
        const int sign = (odd && (J & 1)) ? -1 : 1;
        if (first || S < best) {
          best = S;
          best_sign = sign;
          first = false;
        }
      }
    }
  }
  Canonical c;
  c.sign = best_sign;
  c.code = (static_cast<std::uint64_t>(J) << 48) |
           (static_cast<std::uint64_t>(best[0][0]) << 36) |
           (static_cast<std::uint64_t>(best[0][1]) << 24) |
           (static_cast<std::uint64_t>(best[1][0]) << 12) |
           static_cast<std::uint64_t>(best[1][1]);
  c.key = {best[1][0] + best[2][0], best[1][1] + best[2][1],
           best[1][2] + best[2][2], best[2][0] - best[1][0],
           best[2][1] - best[1][1], best[2][2] - best[1][2]};
  return c;
}

double wigner3j_uncached(const AngularKey &k) {
  if (!selection_ok(k))
    return 0.0;
  if (std::max({k.j1, k.j2, k.j3}) <= exact_limit)
    return exact_value(k);
  return log_value(k);
}

double Wigner3jCache::get(const AngularKey &k) {
  if (!selection_ok(k))
    return 0.0;
  if (k.j1 + k.j2 + k.j3 >= 2 * 4096)
    return wigner3j_uncached(k);
  const Canonical c = canonicalize(k);
  {
    std::shared_lock lock(mutex_);
    auto it = table_.find(c.code);
    if (it != table_.end())
      return c.sign * it->second;
  }
  const double v = wigner3j_uncached(c.key);
  {
    std::unique_lock lock(mutex_);
    table_.emplace(c.code, v);
  }
  return c.sign * v;
}

std::size_t Wigner3jCache::size() const {
  std::shared_lock lock(mutex_);
  return table_.size();
}

void Wigner3jCache::clear() {
  std::unique_lock lock(mutex_);
  table_.clear();
}

Wigner3jCache &global_cache() {
  static Wigner3jCache cache;
  return cache;
}

double wigner3j(const AngularKey &k) { return global_cache().get(k); }

double w3j(int j1, int j2, int j3, int m1, int m2, int m3) {
  return wigner3j(int_key(j1, j2, j3, m1, m2, m3));
}

double factorial(int n) {
  static const std::vector<double> table = [] {
    std::vector<double> f(171, 1.0);
    for (int i = 1; i <= 170; ++i)
      f[i] = f[i - 1] * i;
    return f;
  }();
  if (n < 0 || n > 170)
    throw DomainError("factorial argument out of range");
  return table[static_cast<std::size_t>(n)];
}

double assoc_legendre(int L, int M, double x) {
  if (std::abs(x) > 1.0)
    throw DomainError("assoc_legendre: |x| > 1");
  if (L < 0 || std::abs(M) > L)
    throw DomainError("assoc_legendre: need 0 <= |M| <= L");
  if (M < 0) {
    const int a = -M;
    const double s = (a % 2 == 0) ? 1.0 : -1.0;
    return s * factorial(L - a) / factorial(L + a) * assoc_legendre(L, a, x);
  }
  double pmm = 1.0;
  if (M > 0) {
    const double st = std::sqrt((1.0 - x) * (1.0 + x));
    double f = 1.0;
    for (int i = 1; i <= M; ++i) {
      pmm *= -f * st;
      f += 2.0;
    }
  }
  if (L == M)
    return pmm;
  double p1 = x * (2 * M + 1) * pmm;
  if (L == M + 1)
    return p1;
  double p0 = pmm;
  for (int l = M + 2; l <= L; ++l) {
    const double p2 = ((2 * l - 1) * x * p1 - (l + M - 1) * p0) / (l - M);
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

double wigner_small_d(int j, int mp, int m, double beta) {
  if (std::abs(mp) > j || std::abs(m) > j)
    return 0.0;
  const double c = std::cos(0.5 * beta), s = std::sin(0.5 * beta);
  const double pre = std::sqrt(factorial(j + mp) * factorial(j - mp) *
                               factorial(j + m) * factorial(j - m));
  double sum = 0.0;
  for (int k = std::max(0, m - mp); k <= std::min(j + m, j - mp); ++k) {
    const double den = factorial(j + m - k) * factorial(k) *
                       factorial(mp - m + k) * factorial(j - mp - k);
    const double t = std::pow(c, 2 * j + m - mp - 2 * k) *
                     std::pow(s, mp - m + 2 * k) / den;
    sum += ((mp - m + k) % 2 == 0) ? t : -t;
  }
  return pre * sum;
}

std::complex<double> wigner_D(int j, int mp, int m, double a, double b,
                              double g) {
  return std::polar(wigner_small_d(j, mp, m, b), -(mp * a + m * g));
}

std::complex<double> spherical_harmonic(int l, int m, double theta,
                                        double phi) {
  const double n = std::sqrt((2 * l + 1) / (4.0 * pi) * factorial(l - m) /
                             factorial(l + m));
  return std::polar(n * assoc_legendre(l, m, std::cos(theta)), m * phi);
}

double euler_triple_integral(const std::array<std::array<int, 3>, 3> &r) {
  return w3j(r[0][0], r[1][0], r[2][0], r[0][1], r[1][1], r[2][1]) *
         w3j(r[0][0], r[1][0], r[2][0], r[0][2], r[1][2], r[2][2]);
}

std::vector<DTerm> d_product_expand(int l1, int m1, int m1p, int l2, int m2,
                                    int m2p) {
  std::vector<DTerm> out;
  for (int l = std::abs(l1 - l2); l <= l1 + l2; ++l) {
    const double c = (2 * l + 1) * w3j(l1, l2, l, m1, m2, -m1 - m2) *
                     w3j(l1, l2, l, m1p, m2p, -m1p - m2p);
    if (c != 0.0)
      out.push_back({l, c});
  }
  return out;
}

double zeta_prefactor(int l, int lp, int L, int M) {
  if (std::abs(M) > L)
    return 0.0;
  return (2 * L + 1) / (4.0 * pi) *
         std::sqrt((2 * l + 1) * (2 * lp + 1) * factorial(L - M) /
                   factorial(L + M));
}

double lab_frame_coupling(int l, int m, int lp, int mp, int L, int M) {
  if (M != m - mp || std::abs(M) > L)
    return 0.0;
  const double s = (m % 2 == 0) ? 1.0 : -1.0;
  return s * zeta_prefactor(l, lp, L, M) * w3j(l, lp, L, 0, 0, 0) *
         w3j(l, lp, L, m, -mp, mp - m);
}

void gauss_legendre(int n, std::vector<double> &x, std::vector<double> &w) {
  x.assign(static_cast<std::size_t>(n), 0.0);
  w.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) {
        p1 = z;
        p0 = 1.0;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16)
        break;
    }
    double p0 = 1.0, p1 = z;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (z * p1 - p0) / (z * z - 1.0);
    const auto a = static_cast<std::size_t>(i);
    const auto b = static_cast<std::size_t>(n - 1 - i);
    x[a] = -z;
    x[b] = z;
    w[a] = w[b] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

} // namespace pecd::angular
