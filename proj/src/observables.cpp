#include "pecd/observables.hpp"
#include "pecd/angular.hpp"
#include "pecd/error.hpp"
#include <algorithm>
#include <cmath>
#include <numbers>

namespace pecd::observables {

namespace {

constexpr double pi = std::numbers::pi;

double legendre_series(const anisotropy::BetaTable &t, std::size_t k, double x) {
  double s = 0.0;
  for (int L = t.Lmin; L <= t.Lmax; ++L)
    s += t.at(L, k).real() * angular::assoc_legendre(L, 0, x);
  return s;
}

double interference_series(const anisotropy::BetaTable &t, std::size_t k, double theta, double phi) {
  const int M = t.M;
  const double x = std::cos(theta);
  double s = 0.0;
  for (int L = std::max(t.Lmin, std::abs(M)); L <= t.Lmax; ++L) {
    const auto b = t.at(L, k);
    s += 2.0 * (b.real() * std::cos(M * phi) - b.imag() * std::sin(M * phi)) *
         angular::assoc_legendre(L, M, x);
  }
  return s;
}

//! sin 2t reduced by multiples of pi first, so the nodes 0, pi/2, pi give exact zeros
double sin_2theta(double t) {
  const double x = 2 * t;
  const double n = std::nearbyint(x / pi);
  const double s = std::sin(x - n * pi);
  return std::fmod(std::abs(n), 2.0) == 1.0 ? -s : s;
}

} // namespace

double momentum_distribution(const BetaSet &b, std::size_t k, double theta, double phi) {
  const double x = std::cos(theta);
  return legendre_series(b.one, k, x) + legendre_series(b.two, k, x) +
         interference_series(b.inter, k, theta, phi);
}

double momentum_distribution(const BetaSet &b, double energy, double theta, double phi) {
  const auto &g = b.energies();
  if (g.empty() || energy < g.front() || energy > g.back())
    throw RangeError("energy " + std::to_string(energy) + " a.u. outside the beta grid");
  if (g.size() == 1)
    return momentum_distribution(b, std::size_t{0}, theta, phi);
  auto it = std::upper_bound(g.begin(), g.end(), energy);
  std::size_t hi = std::min<std::size_t>(static_cast<std::size_t>(it - g.begin()), g.size() - 1);
  const std::size_t lo = hi - 1;
  const double w = (energy - g[lo]) / (g[hi] - g[lo]);
  return (1 - w) * momentum_distribution(b, lo, theta, phi) + w * momentum_distribution(b, hi, theta, phi);
}

std::vector<double> theta_grid(int n) {
  std::vector<double> t(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    t[static_cast<std::size_t>(i)] = (n == 1) ? 0.0 : pi * i / (n - 1);
  return t;
}

double normalization(const BetaSet &plus, const std::vector<double> &theta) {
  double n = 0.0;
  bool first = true;
  for (std::size_t k = 0; k < plus.energies().size(); ++k)
    for (double t : theta) {
      const double v = momentum_distribution(plus, k, t, pi / 2);
      if (first || v > n)
        n = v;
      first = false;
    }
  return n;
}

double PECDMap::eval(std::size_t k, double t) const {
  const double x = std::cos(t);
  return c1[k] * x + c3[k] * 0.5 * (5 * x * x * x - 3 * x) + cint[k] * sin_2theta(t);
}

PECDMap pecd_map(const BetaSet &plus, const MapOptions &opt) {
  if (plus.mu0 != 1)
    throw ConfigError("pecd_map expects tables computed for mu0 = +1");
  PECDMap m;
  m.energies = plus.energies();
  m.theta = opt.theta;
  m.norm = opt.norm_override > 0 ? opt.norm_override : normalization(plus, opt.theta);
  const std::size_t nk = m.energies.size();
  m.c1.assign(nk, 0.0);
  m.c3.assign(nk, 0.0);
  m.cint.assign(nk, 0.0);
  m.values.assign(nk * m.theta.size(), 0.0);
  if (!(m.norm >= opt.threshold))
    return m;
  const double s = 100.0 / m.norm;
  for (std::size_t k = 0; k < nk; ++k) {
    m.c1[k] = s * 2.0 * (plus.one.at(1, k).real() + plus.two.at(1, k).real());
    m.c3[k] = s * 2.0 * plus.two.at(3, k).real();
    m.cint[k] = s * 6.0 * plus.inter.at(2, k).imag();
    for (std::size_t it = 0; it < m.theta.size(); ++it)
      m.values[k * m.theta.size() + it] = m.eval(k, m.theta[it]);
  }
  return m;
}

double interference_part(const PECDMap &m, std::size_t k, double theta) {
  return m.cint[k] * sin_2theta(theta);
}

std::vector<double> hemisphere_average(const PECDMap &m, bool forward, int nodes) {
  std::vector<double> x, w;
  angular::gauss_legendre(nodes, x, w);
  const double a = forward ? 0.0 : pi / 2, b = forward ? pi / 2 : pi;
  std::vector<double> rho(m.energies.size(), 0.0);
  for (std::size_t k = 0; k < rho.size(); ++k)
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double t = 0.5 * (a + b) + 0.5 * (b - a) * x[i];
      rho[k] += 0.5 * (b - a) * w[i] * m.eval(k, t) * std::sin(t);
    }
  return rho;
}

Extremum argmax_pecd(const PECDMap &m) {
  Extremum e;
  if (m.energies.empty() || m.theta.empty())
    throw ConfigError("argmax_pecd: empty map");
  double best = -1.0;
  for (std::size_t it = 0; it < m.theta.size(); ++it)
    for (std::size_t k = 0; k < m.energies.size(); ++k) {
      const double v = std::abs(m.at(k, it));
      if (v > best) {
        best = v;
        e.k = k;
        e.it = it;
      }
    }
  e.energy = m.energies[e.k];
  e.theta = m.theta[e.it];
  e.value = m.at(e.k, e.it);
  return e;
}

double yield(const BetaSet &b) {
  const auto &g = b.energies();
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < g.size(); ++k) {
    const double f0 = b.one.at(0, k).real() + b.two.at(0, k).real();
    const double f1 = b.one.at(0, k + 1).real() + b.two.at(0, k + 1).real();
    s += 0.5 * (g[k + 1] - g[k]) * (f0 + f1);
  }
  return 4 * pi / anisotropy::kOrientationMeasure * s;
}

} // namespace pecd::observables
