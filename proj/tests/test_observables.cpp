#include "doctest.h"
#include "pecd/anisotropy.hpp"
#include "pecd/error.hpp"
#include "pecd/model.hpp"
#include "pecd/observables.hpp"
#include "pecd/units.hpp"
#include <cmath>

using namespace pecd;
using namespace pecd::observables;

namespace {

constexpr double pi = units::pi;

field::PulseTrain two_color(double scale = 1.0) {
  field::PulseTrain tr;
  tr.pulses = {{0.003 * scale, 0.26, 0.2, units::fs_to_au(3.0), 0.0},
               {0.002 * scale, 0.52, 0.9, units::fs_to_au(3.0), 0.0}};
  return tr;
}

model::MolecularModel toy(std::uint64_t seed = 21, int n = 16) {
  return model::generate_toy_chiral(seed, 2, 3, model::energy_grid_eV(1.0, 4.0, n));
}

PECDMap synthetic(std::size_t nk, std::size_t nt) {
  PECDMap m;
  m.energies.resize(nk);
  for (std::size_t k = 0; k < nk; ++k)
    m.energies[k] = 0.05 * static_cast<double>(k + 1);
  m.theta = theta_grid(static_cast<int>(nt));
  m.values.assign(nk * nt, 0.0);
  m.c1.assign(nk, 0.0);
  m.c3.assign(nk, 0.0);
  m.cint.assign(nk, 0.0);
  return m;
}

} // namespace

TEST_CASE("zero field gives a zero distribution and map") {
  const auto m = toy();
  const auto b = anisotropy::compute_betas(m, two_color(0.0), 1);
  for (std::size_t k = 0; k < 16; k += 5)
    CHECK(momentum_distribution(b, k, 0.7, 0.3) == 0.0);
  const auto map = pecd_map(b);
  for (double v : map.values)
    CHECK(v == 0.0);
}

TEST_CASE("interference at phi = 0 uses only real parts") {
  const auto m = toy();
  auto b = anisotropy::compute_betas(m, two_color(), 1);
  const double ref = momentum_distribution(b, std::size_t{4}, 1.1, 0.0);
  for (auto &v : b.inter.values)
    v = anisotropy::cplx(v.real(), 0.0);
  CHECK(momentum_distribution(b, std::size_t{4}, 1.1, 0.0) == doctest::Approx(ref).epsilon(1e-14));
}

TEST_CASE("distribution is non-negative") {
  const auto m = toy(22);
  for (int mu0 : {1, 0, -1}) {
    const auto b = anisotropy::compute_betas(m, two_color(), mu0);
    double peak = 0.0, low = 0.0;
    for (std::size_t k = 0; k < 16; ++k)
      for (int it = 0; it <= 36; ++it)
        for (int ip = 0; ip < 12; ++ip) {
          const double v = momentum_distribution(b, k, pi * it / 36.0, 2 * pi * ip / 12.0);
          peak = std::max(peak, v);
          low = std::min(low, v);
        }
    CHECK(peak > 0.0);
    CHECK(low >= -1e-8 * peak);
  }
}

TEST_CASE("energy interpolation of the distribution") {
  const auto m = toy();
  const auto b = anisotropy::compute_betas(m, two_color(), 1);
  const auto &g = b.energies();
  CHECK(momentum_distribution(b, g[3], 0.4, 1.0) == doctest::Approx(momentum_distribution(b, std::size_t{3}, 0.4, 1.0)));
  const double mid = momentum_distribution(b, 0.5 * (g[3] + g[4]), 0.4, 1.0);
  CHECK(mid == doctest::Approx(0.5 * (momentum_distribution(b, std::size_t{3}, 0.4, 1.0) +
                                      momentum_distribution(b, std::size_t{4}, 0.4, 1.0))));
  CHECK_THROWS_AS(momentum_distribution(b, g.back() + 0.01, 0.4, 1.0), RangeError);
}

TEST_CASE("map equals explicit helicity subtraction") {
  const auto m = toy(23);
  const auto fi = anisotropy::model_field_integrals(m, two_color());
  const auto p = anisotropy::compute_betas(m, fi, 1);
  const auto n = anisotropy::compute_betas(m, fi, -1);
  const auto map = pecd_map(p);
  double worst = 0.0, peak = 0.0;
  for (std::size_t k = 0; k < 16; ++k)
    for (std::size_t it = 0; it < map.theta.size(); ++it) {
      const double t = map.theta[it];
      const double d = 100.0 * (momentum_distribution(p, k, t, pi / 2) - momentum_distribution(n, k, t, pi / 2)) / map.norm;
      worst = std::max(worst, std::abs(d - map.at(k, it)));
      peak = std::max(peak, std::abs(d));
    }
  CHECK(peak > 1e-3);
  CHECK(worst < 1e-10);
  CHECK_THROWS_AS(pecd_map(n), ConfigError);
}

TEST_CASE("map structure") {
  const auto m = toy(24);
  const auto p = anisotropy::compute_betas(m, two_color(), 1);
  const auto map = pecd_map(p);
  const double s = 100.0 / map.norm;
  for (std::size_t k = 0; k < 16; ++k) {
    const double th0 = s * (2 * (p.one.at(1, k).real() + p.two.at(1, k).real()) + 2 * p.two.at(3, k).real());
    CHECK(map.at(k, 0) == doctest::Approx(th0).epsilon(1e-12));
    for (double t : {0.0, pi / 2, pi})
      CHECK(interference_part(map, k, t) == 0.0);
    CHECK(std::abs(interference_part(map, k, pi / 4)) == doctest::Approx(std::abs(map.cint[k])));
    CHECK(map.eval(k, 0.0) == doctest::Approx(map.at(k, 0)));
    for (std::size_t it = 0; it < map.theta.size(); ++it)
      CHECK(std::abs(map.eval(k, pi - map.theta[it]) + map.at(k, it)) < 1e-12 * (1.0 + std::abs(map.c1[k])));
  }
  CHECK(map.theta[90] == pi / 2);
}

TEST_CASE("normalization") {
  const std::vector<double> e = {0.1, 0.2, 0.3};
  anisotropy::BetaSet b;
  b.mu0 = 1;
  b.one = anisotropy::make_beta_table(anisotropy::Pathway::one_photon, 1, e);
  b.two = anisotropy::make_beta_table(anisotropy::Pathway::two_photon, 1, e);
  b.inter = anisotropy::make_beta_table(anisotropy::Pathway::interference, 1, e);
  for (std::size_t k = 0; k < 3; ++k)
    b.one.ref(0, k) = 1.0;
  CHECK(normalization(b) == doctest::Approx(1.0).epsilon(1e-15));

  const auto m = toy(25);
  auto p = anisotropy::compute_betas(m, two_color(), 1);
  const double n0 = normalization(p);
  for (auto *t : {&p.one, &p.two, &p.inter})
    for (auto &v : t->values)
      v *= 3.0;
  CHECK(normalization(p) == doctest::Approx(3.0 * n0).epsilon(1e-13));

  // x4 refinement in energy and angle on a grid that resolves the spectrum
  const auto base = model::resample(m, model::energy_grid_eV(1.0, 4.0, 31));
  const double nb = normalization(anisotropy::compute_betas(base, two_color(), 1));
  const auto fine = model::resample(m, model::energy_grid_eV(1.0, 4.0, 121));
  const double nf = normalization(anisotropy::compute_betas(fine, two_color(), 1), theta_grid(721));
  CHECK(std::abs(nf - nb) <= 0.005 * nf);
}

TEST_CASE("threshold zeroes the map") {
  const auto m = toy();
  const auto p = anisotropy::compute_betas(m, two_color(1e-9), 1);
  MapOptions o;
  o.threshold = 1.0;
  const auto map = pecd_map(p, o);
  for (double v : map.values)
    CHECK(v == 0.0);
}

TEST_CASE("hemisphere averages") {
  auto unit = synthetic(2, 181);
  unit.c1 = {1.0, 0.0};
  unit.c3 = {0.0, 1.0};
  const auto f = hemisphere_average(unit, true);
  CHECK(f[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(f[1] == doctest::Approx(-0.125).epsilon(1e-14));

  const auto m = toy(26);
  const auto map = pecd_map(anisotropy::compute_betas(m, two_color(), 1));
  const auto rf = hemisphere_average(map, true);
  const auto rb = hemisphere_average(map, false);
  for (std::size_t k = 0; k < 16; ++k) {
    CHECK(std::abs(rf[k] + rb[k]) < 1e-12);
    // 10^4-interval trapezoid with one Richardson step
    auto trap = [&](int n) {
      const double h = (pi / 2) / n;
      double s = 0.0;
      for (int i = 0; i <= n; ++i) {
        const double t = h * i;
        s += ((i == 0 || i == n) ? 0.5 : 1.0) * map.eval(k, t) * std::sin(t);
      }
      return s * h;
    };
    const double r = (4 * trap(10000) - trap(5000)) / 3;
    CHECK(std::abs(rf[k] - r) < 1e-10);
  }
}

TEST_CASE("argmax tie-breaking") {
  auto z = synthetic(3, 11);
  auto e = argmax_pecd(z);
  CHECK(e.k == 0);
  CHECK(e.it == 0);
  CHECK(e.value == 0.0);

  auto one = synthetic(3, 11);
  one.values[2 * 11 + 7] = -4.0;
  e = argmax_pecd(one);
  CHECK(e.k == 2);
  CHECK(e.it == 7);
  CHECK(e.value == -4.0);
  CHECK(e.theta == doctest::Approx(one.theta[7]));

  auto tie = synthetic(3, 11);
  tie.values[2 * 11 + 3] = 2.0;
  tie.values[1 * 11 + 5] = -2.0;
  tie.values[0 * 11 + 5] = 2.0;
  e = argmax_pecd(tie);
  CHECK(e.k == 2);
  CHECK(e.it == 3);
  tie.values[2 * 11 + 3] = 0.0;
  e = argmax_pecd(tie);
  CHECK(e.k == 0);
  CHECK(e.it == 5);

  PECDMap empty;
  CHECK_THROWS_AS(argmax_pecd(empty), ConfigError);
}

TEST_CASE("argmax is stable under refinement") {
  const auto m = toy(27);
  const auto coarse = pecd_map(anisotropy::compute_betas(m, two_color(), 1));
  const auto fm = model::resample(m, model::energy_grid_eV(1.0, 4.0, 31));
  MapOptions o;
  o.theta = theta_grid(361);
  const auto fine = pecd_map(anisotropy::compute_betas(fm, two_color(), 1), o);
  const auto a = argmax_pecd(coarse), b = argmax_pecd(fine);
  const double de = coarse.energies[1] - coarse.energies[0];
  CHECK(std::abs(a.energy - b.energy) <= de * (1 + 1e-12));
  CHECK(std::abs(a.theta - b.theta) <= pi / 180 * (1 + 1e-12));
}

TEST_CASE("achiral model gives a zero map") {
  const auto m = model::mirror_achiralize(toy(28));
  for (int mu0 : {1, -1}) {
    const auto b = anisotropy::compute_betas(m, two_color(), mu0);
    const auto bp = anisotropy::compute_betas(m, two_color(), 1);
    const double peak = normalization(bp);
    for (std::size_t k = 0; k < 16; ++k)
      for (int it = 0; it <= 18; ++it) {
        const double t = pi * it / 18;
        const double d = momentum_distribution(b, k, t, pi / 2) - momentum_distribution(b, k, pi - t, pi / 2);
        CHECK(std::abs(d) < 1e-10 * peak);
      }
  }
  const auto map = pecd_map(anisotropy::compute_betas(m, two_color(), 1));
  for (double v : map.values)
    CHECK(std::abs(v) < 1e-8); // percent, i.e. < 1e-10 of the peak
}

TEST_CASE("yield") {
  const auto m = toy();
  const auto a = anisotropy::compute_betas(m, two_color(), 1);
  const double y = yield(a);
  CHECK(y > 0.0);
  // trapezoid of (4 pi / 8 pi^2) beta_00 by hand
  double s = 0.0;
  const auto &g = a.energies();
  for (std::size_t k = 0; k + 1 < g.size(); ++k)
    s += 0.5 * (g[k + 1] - g[k]) *
         (a.one.at(0, k).real() + a.two.at(0, k).real() + a.one.at(0, k + 1).real() + a.two.at(0, k + 1).real());
  CHECK(y == doctest::Approx(s / (2 * pi)).epsilon(1e-14));
}
