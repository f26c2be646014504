#include "doctest.h"
#include "oracles.hpp"
#include "pecd/anisotropy.hpp"
#include "pecd/error.hpp"
#include "pecd/observables.hpp"
#include "pecd/oracle.hpp"
#include "pecd/units.hpp"
#include <cmath>
#include <random>

using namespace pecd;
using namespace pecd::oracle;

namespace {

constexpr double pi = units::pi;

field::PulseTrain two_color(double scale = 1.0, double cep_shift = 0.0) {
  field::PulseTrain tr;
  tr.pulses = {{0.003 * scale, 0.26, 0.2 + cep_shift, units::fs_to_au(3.0), 0.0},
               {0.002 * scale, 0.52, 0.9 + cep_shift, units::fs_to_au(3.0), 0.0}};
  return tr;
}

//! same shape, scaled to the requested peak intensity (W/cm^2)
field::PulseTrain at_intensity(double I, double cep_shift = 0.0) {
  auto tr = two_color(1.0, 0.0);
  const double s = std::sqrt(I / field::peak_intensity(tr));
  auto out = two_color(s, cep_shift);
  return out;
}

model::MolecularModel micro() {
  return model::generate_toy_chiral(31, 2, 1, model::energy_grid_eV(1.0, 4.0, 8));
}

PropagationOptions tight() {
  PropagationOptions o;
  o.abs_tol = 1e-18;
  o.rel_tol = 1e-13;
  return o;
}

} // namespace

TEST_CASE("Euler grid weights integrate the rotation group") {
  const auto g = EulerGrid::make(6, 5, 7);
  CHECK(g.size() == 6 * 5 * 7);
  CHECK(g.total_weight() == doctest::Approx(8 * pi * pi).epsilon(1e-14));
}

TEST_CASE("lab coupling matches explicit rotation of a molecular vector") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Orientation o{pi * u(rng), 0.5 * pi * (1 + u(rng)), pi * u(rng)};
    const auto R = oracle_ref::euler(o.alpha, o.beta, o.gamma);
    const std::array<double, 3> r = {u(rng), u(rng), u(rng)};
    std::array<double, 3> lab{};
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k)
        lab[static_cast<std::size_t>(i)] += R[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] * r[static_cast<std::size_t>(k)];
    const std::array<cplx, 3> rc = {r[0], r[1], r[2]};
    for (int mu0 = -1; mu0 <= 1; ++mu0) {
      const auto c = lab_coupling(mu0, o);
      const auto e = oracle_ref::basis(mu0);
      cplx lhs = 0.0, rhs = 0.0;
      for (std::size_t i = 0; i < 3; ++i)
        lhs += std::conj(e[i]) * lab[i];
      for (int nu = -1; nu <= 1; ++nu)
        rhs += c[static_cast<std::size_t>(nu + 1)] * oracle_ref::sph_component(nu, rc);
      CHECK(std::abs(lhs - rhs) < 1e-14);
    }
  }
}

TEST_CASE("amplitudes at the identity orientation") {
  const auto m = micro();
  const auto fi = anisotropy::model_field_integrals(m, two_color());
  for (int mu0 = -1; mu0 <= 1; ++mu0) {
    const auto a = molecular_frame_amplitudes(m, fi, mu0, {});
    const double sg = (mu0 % 2) ? -1.0 : 1.0;
    for (std::size_t k = 0; k < 8; ++k)
      for (int l = 0; l <= 1; ++l)
        for (int mm = -l; mm <= l; ++mm) {
          const cplx ref = cplx(0, 1) * fi.F1[k] * sg * m.continuum_from_homo.at(k, l, mm, -mu0);
          CHECK(std::abs(a.first_at(k, l, mm) - ref) < 1e-15 * (1 + std::abs(ref)));
        }
  }
}

TEST_CASE("amplitude orders scale with the field") {
  const auto m = micro();
  const Orientation o{0.3, 0.9, -1.2};
  const auto a = molecular_frame_amplitudes(m, two_color(1.0), 1, o);
  const auto b = molecular_frame_amplitudes(m, two_color(2.0), 1, o);
  for (std::size_t i = 0; i < a.first.size(); ++i) {
    CHECK(std::abs(b.first[i] - 2.0 * a.first[i]) <= 1e-14 * std::abs(b.first[i]) + 1e-300);
    CHECK(std::abs(b.second[i] - 4.0 * a.second[i]) <= 1e-14 * std::abs(b.second[i]) + 1e-300);
  }
}

TEST_CASE("quadrature average: threaded vs serial, analytic, refinement") {
  const auto m = model::generate_toy_chiral(32, 2, 2, model::energy_grid_eV(1.0, 4.0, 4));
  const auto fi = anisotropy::model_field_integrals(m, two_color());
  const std::vector<double> theta = {0.0, 0.4, 1.3, 2.2, pi};
  const std::vector<double> phi = {0.0, 0.9, pi / 2, 4.0};
  const auto g = EulerGrid::make(10, 10, 10);
  const auto a = quadrature_average(m, fi, 1, g, theta, phi);
  const auto s = quadrature_average_serial(m, fi, 1, g, theta, phi);
  const auto b = anisotropy::compute_betas(m, fi, 1);
  double peak = 0.0, dser = 0.0, dana = 0.0;
  for (std::size_t k = 0; k < 4; ++k)
    for (std::size_t it = 0; it < theta.size(); ++it)
      for (std::size_t ip = 0; ip < phi.size(); ++ip) {
        peak = std::max(peak, a.total(k, it, ip));
        dser = std::max(dser, std::abs(a.total(k, it, ip) - s.total(k, it, ip)));
        dana = std::max(dana, std::abs(a.total(k, it, ip) -
                                       observables::momentum_distribution(b, k, theta[it], phi[ip])));
      }
  CHECK(peak > 0.0);
  CHECK(dser < 1e-12 * peak);
  CHECK(dana < 1e-9 * peak);

  const auto c = converged_average(m, fi, 1, theta, phi, 4, 32, 1e-9);
  CHECK(c.change < 1e-9);
  CHECK(c.grid.na >= 8);
  CHECK_THROWS_AS(converged_average(m, fi, 1, theta, phi, 2, 4, 1e-15), ConvergenceError);
}

TEST_CASE("achiral quadrature shows no circular dichroism") {
  const auto m = model::mirror_achiralize(model::generate_toy_chiral(33, 2, 2, model::energy_grid_eV(1.0, 4.0, 3)));
  const auto fi = anisotropy::model_field_integrals(m, two_color());
  const std::vector<double> theta = {0.3, 1.0, 2.5};
  const std::vector<double> phi = {pi / 2};
  const auto g = EulerGrid::make(10, 10, 10);
  const auto p = quadrature_average(m, fi, 1, g, theta, phi);
  const auto n = quadrature_average(m, fi, -1, g, theta, phi);
  for (std::size_t k = 0; k < 3; ++k)
    for (std::size_t it = 0; it < 3; ++it)
      CHECK(std::abs(p.total(k, it, 0) - n.total(k, it, 0)) < 1e-10 * p.total(k, it, 0));
}

TEST_CASE("propagation: zero field leaves the ground state") {
  const auto r = propagate_weak_field(micro(), two_color(0.0), 1, {});
  CHECK(r.ground == cplx(1.0));
  CHECK(r.steps == 0);
  for (auto v : r.continuum)
    CHECK(v == cplx(0.0));
}

TEST_CASE("propagation: norm conserved for a real coupling") {
  auto m = micro();
  m.ground_dipole = {0.0, 0.35, 0.0};
  const auto r = propagate_weak_field(m, at_intensity(1e10), 0, {}, tight());
  CHECK(r.max_norm <= 1.0 + 1e-8);
  CHECK(r.final_norm == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("propagation: first order and cubic residual") {
  const auto m = micro();
  const Orientation o{0.7, 1.1, -0.4};
  {
    const auto tr = at_intensity(1e9);
    const auto plus = propagate_weak_field(m, tr, 1, o, tight());
    const auto minus = propagate_weak_field(m, at_intensity(1e9, pi), 1, o, tight());
    const auto a = molecular_frame_amplitudes(m, tr, 1, o);
    double worst = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < a.first.size(); ++i) {
      const cplx odd = 0.5 * (plus.continuum[i] - minus.continuum[i]);
      worst = std::max(worst, std::abs(odd - a.first[i]));
      scale = std::max(scale, std::abs(a.first[i]));
    }
    CHECK(worst < 1e-4 * scale);
  }
  std::vector<double> lx, ly;
  for (double I : {1e8, 1e9, 1e10}) {
    const auto tr = at_intensity(I);
    const auto p = propagate_weak_field(m, tr, 1, o, tight());
    const auto a = molecular_frame_amplitudes(m, tr, 1, o);
    double r = 0.0;
    for (std::size_t i = 0; i < a.first.size(); ++i)
      r = std::max(r, std::abs(p.continuum[i] - a.first[i] - a.second[i]));
    lx.push_back(std::log(tr.pulses[0].amplitude));
    ly.push_back(std::log(r));
  }
  const double slope = (ly[2] - ly[0]) / (lx[2] - lx[0]);
  CHECK(slope == doctest::Approx(3.0).epsilon(0.2 / 3.0));
}

TEST_CASE("propagation: step underflow is reported") {
  PropagationOptions o;
  o.abs_tol = 1e-300;
  o.rel_tol = 1e-300;
  o.min_step = 1.0;
  CHECK_THROWS_AS(propagate_weak_field(micro(), two_color(), 1, {}, o), ConvergenceError);
}
