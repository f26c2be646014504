#include "doctest.h"
#include "oracles.hpp"
#include "pecd/anisotropy.hpp"
#include "pecd/error.hpp"
#include "pecd/oracle.hpp"
#include "pecd/units.hpp"
#include <cmath>

using namespace pecd;
using namespace pecd::anisotropy;

namespace {

field::PulseTrain two_color(double scale = 1.0) {
  field::PulseTrain tr;
  tr.pulses = {{0.003 * scale, 0.26, 0.2, units::fs_to_au(3.0), 0.0},
               {0.002 * scale, 0.52, 0.9, units::fs_to_au(3.0), 0.0}};
  return tr;
}

model::MolecularModel small_model(std::uint64_t seed = 11) {
  return model::generate_toy_chiral(seed, 2, 2, model::energy_grid_eV(1.0, 4.0, 6));
}

double table_max(const BetaTable &t) {
  double m = 0.0;
  for (auto v : t.values)
    m = std::max(m, std::abs(v));
  return m;
}

//! max |a - b| over entries, relative to the largest |b|
double table_diff(const BetaTable &a, const BetaTable &b) {
  REQUIRE(a.Lmin == b.Lmin);
  REQUIRE(a.Lmax == b.Lmax);
  double d = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i)
    d = std::max(d, std::abs(a.values[i] - b.values[i]));
  return d / table_max(b);
}

double factorial(int n) { return std::tgamma(n + 1.0); }

} // namespace

TEST_CASE("g coefficient") {
  for (int mu = -1; mu <= 1; ++mu)
    for (int mup = -1; mup <= 1; ++mup) {
      CHECK(g_coefficient(1, mu, mup, 0) == 0.0);
      for (int Q = 0; Q <= 2; ++Q)
        for (int mu0 = -1; mu0 <= 1; ++mu0) {
          CHECK(g_coefficient(Q, mu, mup, -mu0) ==
                doctest::Approx((Q % 2 ? -1 : 1) * g_coefficient(Q, mu, mup, mu0)).epsilon(1e-14));
          const double ref = (2 * Q + 1) * oracle_ref::racah3j(1, 1, Q, mu, mup, -mu - mup) *
                             oracle_ref::racah3j(1, 1, Q, mu0, mu0, -2 * mu0);
          CHECK(std::abs(g_coefficient(Q, mu, mup, mu0) - ref) < 1e-15);
        }
    }
  CHECK(g_coefficient(2, 1, 1, 1) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("structural L and M ranges") {
  const std::vector<double> e = {0.1, 0.2};
  for (int mu0 : {-1, 0, 1}) {
    const auto one = make_beta_table(Pathway::one_photon, mu0, e);
    const auto two = make_beta_table(Pathway::two_photon, mu0, e);
    const auto in = make_beta_table(Pathway::interference, mu0, e);
    CHECK(one.Lmin == 0);
    CHECK(one.Lmax == 2);
    CHECK_FALSE(one.has(3));
    CHECK(two.Lmax == 4);
    CHECK_FALSE(two.has(5));
    CHECK(one.M == 0);
    CHECK(two.M == 0);
    CHECK(in.M == mu0);
    CHECK(in.Lmax == 3);
    CHECK_FALSE(in.has(4));
    CHECK(in.Lmin == (mu0 == 0 ? 0 : 1));
    CHECK(in.nonstandard == (mu0 == 0));
  }
  const auto m = small_model();
  const auto b = compute_betas(m, two_color(), 1);
  for (std::size_t k = 0; k < 6; ++k) {
    CHECK(b.one.at(3, k) == cplx(0.0));
    CHECK(b.two.at(5, k) == cplx(0.0));
    CHECK(b.one.at(2, 1, k) == cplx(0.0));
    CHECK(b.two.at(2, -1, k) == cplx(0.0));
    CHECK(b.inter.at(0, k) == cplx(0.0));
    CHECK(b.inter.at(4, k) == cplx(0.0));
    CHECK(b.inter.at(2, 0, k) == cplx(0.0));
  }
}

TEST_CASE("linear polarization has no one-photon forward-backward term") {
  const auto m = small_model();
  const auto b = beta_1ph(m, two_color(), 0);
  for (std::size_t k = 0; k < 6; ++k)
    CHECK(std::abs(b.at(1, k)) < 1e-14 * std::abs(b.at(0, k)));
}

TEST_CASE("one-photon normalization against a closed form") {
  // single s-wave channel along z, linear light: sigma = |F1 M|^2 / (4 pi) int cos^2 beta dR
  auto m = small_model();
  for (std::size_t k = 0; k < m.energy_grid.size(); ++k)
    for (int l = 0; l <= m.lmax; ++l)
      for (int mm = -l; mm <= l; ++mm)
        for (int mu = -1; mu <= 1; ++mu)
          m.continuum_from_homo.at(k, l, mm, mu) = 0.0;
  const cplx M(0.3, -0.4);
  for (std::size_t k = 0; k < m.energy_grid.size(); ++k)
    m.continuum_from_homo.at(k, 0, 0, 0) = M;
  const auto fi = model_field_integrals(m, two_color());
  const auto b = beta_1ph(m, fi, 0);
  for (std::size_t k = 0; k < m.energy_grid.size(); ++k) {
    const double ref = std::norm(fi.F1[k] * M) / (4 * units::pi) * kOrientationMeasure / 3.0;
    CHECK(b.at(0, k).real() == doctest::Approx(ref).epsilon(1e-12));
  }
  CHECK(kOrientationMeasure == doctest::Approx(8 * units::pi * units::pi).epsilon(1e-15));
}

TEST_CASE("polarization reversal") {
  const auto m = small_model(3);
  const auto fi = model_field_integrals(m, two_color());
  const auto p = compute_betas(m, fi, 1);
  const auto n = compute_betas(m, fi, -1);
  for (const auto *pair : {&p.one, &p.two}) {
    const BetaTable &plus = *pair;
    const BetaTable &minus = (pair == &p.one) ? n.one : n.two;
    BetaTable expect = plus;
    for (int L = plus.Lmin; L <= plus.Lmax; ++L)
      for (std::size_t k = 0; k < 6; ++k)
        expect.ref(L, k) = (L % 2 ? -1.0 : 1.0) * plus.at(L, k);
    CHECK(table_diff(minus, expect) < 1e-10);
  }
  // interference: (-1)^{1+L} (L+mu0)!/(L-mu0)! with mu0 = +1
  BetaTable expect = p.inter;
  expect.M = -1;
  for (int L = 1; L <= 3; ++L)
    for (std::size_t k = 0; k < 6; ++k)
      expect.ref(L, k) = ((L + 1) % 2 ? -1.0 : 1.0) * factorial(L + 1) / factorial(L - 1) * p.inter.at(L, k);
  CHECK(table_diff(n.inter, expect) < 1e-10);
}

TEST_CASE("amplitude scaling laws") {
  const auto m = small_model(5);
  const auto a = compute_betas(m, two_color(1.0), 1);
  const auto b = compute_betas(m, two_color(2.0), 1);
  auto scaled = [](BetaTable t, double f) {
    for (auto &v : t.values)
      v *= f;
    return t;
  };
  CHECK(table_diff(b.one, scaled(a.one, 4.0)) < 1e-12);
  CHECK(table_diff(b.two, scaled(a.two, 16.0)) < 1e-12);
  CHECK(table_diff(b.inter, scaled(a.inter, 8.0)) < 1e-12);
}

TEST_CASE("single-photon families are real") {
  const auto m = small_model(6);
  const auto b = compute_betas(m, two_color(), 1);
  for (const auto *t : {&b.one, &b.two})
    for (auto v : t->values)
      CHECK(std::abs(v.imag()) < 1e-12 * table_max(*t));
}

TEST_CASE("serial twin agrees with the threaded kernel") {
  const auto m = small_model(7);
  const auto fi = model_field_integrals(m, two_color());
  for (int mu0 : {1, 0, -1}) {
    const auto a = compute_betas(m, fi, mu0);
    const auto s = compute_betas_serial(m, fi, mu0);
    CHECK(table_diff(a.one, s.one) < 1e-12);
    CHECK(table_diff(a.two, s.two) < 1e-12);
    CHECK(table_diff(a.inter, s.inter) < 1e-12);
  }
}

TEST_CASE("analytic betas match orientation quadrature") {
  const auto m = small_model(11);
  const auto fi = model_field_integrals(m, two_color());
  const auto g = oracle::EulerGrid::make(10, 10, 10);
  for (int mu0 : {1, -1, 0}) {
    const auto a = compute_betas(m, fi, mu0);
    const auto q = oracle::quadrature_betas(m, fi, mu0, g);
    CHECK(table_diff(a.one, q.one) < 1e-6);
    CHECK(table_diff(a.two, q.two) < 1e-6);
    CHECK(table_diff(a.inter, q.inter) < 1e-6);
  }
}

TEST_CASE("no pathway, no signal") {
  auto m = model::generate_toy_chiral(13, 1, 2, model::energy_grid_eV(1.0, 4.0, 4));
  m.ground_dipole = {};
  m.bound_states[0].dipole_from_homo = {};
  const auto b = compute_betas(m, two_color(), 1);
  for (auto v : b.two.values)
    CHECK(v == cplx(0.0));
  for (auto v : b.inter.values)
    CHECK(v == cplx(0.0));
  CHECK(table_max(b.one) > 0.0);
}

TEST_CASE("achiral model: odd Legendre terms and chiral interference vanish") {
  const auto m = model::mirror_achiralize(small_model(9));
  const auto b = compute_betas(m, two_color(), 1);
  for (std::size_t k = 0; k < 6; ++k) {
    CHECK(std::abs(b.one.at(1, k)) < 1e-13 * table_max(b.one));
    CHECK(std::abs(b.two.at(1, k)) < 1e-13 * table_max(b.two));
    CHECK(std::abs(b.two.at(3, k)) < 1e-13 * table_max(b.two));
    CHECK(std::abs(b.inter.at(2, k)) < 1e-13 * table_max(b.inter));
  }
}

TEST_CASE("input checks") {
  const auto m = small_model();
  auto fi = model_field_integrals(m, two_color());
  CHECK_THROWS_AS(compute_betas(m, fi, 2), ConfigError);
  fi.F1.pop_back();
  CHECK_THROWS_AS(beta_1ph(m, fi, 1), ConfigError);
}
