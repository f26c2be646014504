#include "doctest.h"
#include "pecd/control.hpp"
#include "pecd/error.hpp"
#include "pecd/units.hpp"
#include <cmath>

using namespace pecd;
using namespace pecd::control;

namespace {

constexpr double pi = units::pi;

field::PulseTrain two_color(double scale = 1.0) {
  field::PulseTrain tr;
  tr.pulses = {{3e-4 * scale, 0.26, 0.2, units::fs_to_au(3.0), 0.0},
               {2e-4 * scale, 0.52, 0.9, units::fs_to_au(3.0), 0.0}};
  return tr;
}

model::MolecularModel toy(std::uint64_t seed = 41) {
  return model::generate_toy_chiral(seed, 2, 2, model::energy_grid_eV(1.0, 4.0, 12));
}

ObjectiveSpec fixed_at(const model::MolecularModel &m, std::size_t k) {
  ObjectiveSpec s;
  s.mode = Mode::fixed_energy;
  s.target_energy = m.energy_grid[k];
  return s;
}

bool monotone(const OptimizerState &st) {
  for (std::size_t i = 1; i < st.history.size(); ++i)
    if (st.history[i].best < st.history[i - 1].best)
      return false;
  return true;
}

} // namespace

TEST_CASE("objectives vanish without field or chirality") {
  const auto m = toy();
  CHECK(objective_gamma(m, two_color(0.0), fixed_at(m, 4)) == 0.0);
  CHECK(objective_gamma_prime(m, two_color(0.0), {}) == 0.0);
  const auto a = model::mirror_achiralize(m);
  CHECK(objective_gamma(a, two_color(), fixed_at(a, 4)) < 1e-8);
  CHECK(objective_gamma_prime(a, two_color(), {}) < 1e-8);
}

TEST_CASE("gamma is the target row of the map; gamma prime dominates") {
  const auto m = toy();
  const double gp = objective_gamma_prime(m, two_color(), {});
  CHECK(gp > 0.0);
  for (std::size_t k = 0; k < m.energy_grid.size(); ++k) {
    const auto ev = evaluate(m, two_color(), fixed_at(m, k));
    double row = 0.0;
    for (std::size_t it = 0; it < ev.map.theta.size(); ++it)
      row = std::max(row, std::abs(ev.map.at(k, it)));
    CHECK(ev.gamma == row);
    CHECK(ev.objective == ev.gamma);
    CHECK(gp >= ev.gamma);
  }
  const auto ev = evaluate(m, two_color(), {});
  const auto e = observables::argmax_pecd(ev.map);
  CHECK(std::abs(e.value) == ev.gamma_prime);
  // a target between nodes is inserted into the evaluation grid
  ObjectiveSpec s = fixed_at(m, 3);
  s.target_energy = 0.5 * (m.energy_grid[3] + m.energy_grid[4]);
  const Evaluator between(m, s);
  CHECK(between.grid_model().energy_grid.size() == m.energy_grid.size() + 1);
  CHECK(between.grid_model().energy_grid[between.target_index()] == s.target_energy);
  s.target_energy = 10.0;
  CHECK_THROWS_AS(Evaluator(m, s), RangeError);
}

TEST_CASE("gamma prime under angular refinement") {
  const auto m = toy();
  ObjectiveSpec s;
  const double coarse = objective_gamma_prime(m, two_color(), s);
  s.eval.theta = observables::theta_grid(721);
  const double fine = objective_gamma_prime(m, two_color(), s);
  CHECK(fine >= coarse);
  CHECK(fine - coarse <= 1e-3 * fine);
}

TEST_CASE("constraints reject with value 0") {
  const auto m = toy();
  ObjectiveSpec s;
  auto strong = two_color(10.0);
  auto ev = evaluate(m, strong, s);
  CHECK(ev.peak_intensity > 1e11);
  CHECK_FALSE(ev.feasible);
  CHECK(ev.objective == 0.0);
  CHECK(ev.gamma_prime > 0.0);

  s.yield_cap = 1e-30;
  ev = evaluate(m, two_color(), s);
  CHECK_FALSE(ev.feasible);
  CHECK(ev.reason == "yield above cap");

  s = {};
  s.min_delay_gap = 10.0;
  ev = evaluate(m, two_color(), s);
  CHECK_FALSE(ev.feasible);
  auto apart = two_color();
  apart.pulses[1].delay = 20.0;
  CHECK(evaluate(m, apart, s).feasible);

  s = {};
  s.intensity_cap = -1;
  CHECK_THROWS_AS(evaluate(m, two_color(), s), ConfigError);
}

TEST_CASE("principal-axis search on a concave quadratic") {
  const std::vector<double> c = {0.2, 0.7, 0.45, 0.9};
  Problem p;
  p.dim = 4;
  p.blocks = {{0, 1}, {2, 3}};
  p.f = [&](const std::vector<double> &x) {
    double v = 1.0;
    for (std::size_t i = 0; i < 4; ++i)
      v -= (i + 1.0) * (x[i] - c[i]) * (x[i] - c[i]) + 0.3 * (i == 0) * (x[0] - c[0]) * (x[1] - c[1]);
    return std::pair<double, bool>{v, false};
  };
  OptimizerOptions o;
  o.budget = 200;
  const auto st = principal_axis_maximize(p, {0.5, 0.5, 0.5, 0.5}, o);
  CHECK(st.evaluations <= 200);
  CHECK(st.best >= 1.0 - 1e-6);
  CHECK(monotone(st));
  CHECK(st.history.size() == static_cast<std::size_t>(st.evaluations));
  const auto again = principal_axis_maximize(p, {0.5, 0.5, 0.5, 0.5}, o);
  REQUIRE(again.history.size() == st.history.size());
  for (std::size_t i = 0; i < st.history.size(); ++i)
    CHECK(again.history[i].value == st.history[i].value);
}

TEST_CASE("optimizer guards and rejection bookkeeping") {
  Problem p;
  p.dim = 2;
  p.f = [](const std::vector<double> &x) {
    const bool bad = x[0] > 0.8;
    return std::pair<double, bool>{bad ? 0.0 : 1.0 - (x[0] - 0.9) * (x[0] - 0.9) - x[1] * x[1], bad};
  };
  OptimizerOptions o;
  o.budget = 80;
  const auto st = principal_axis_maximize(p, {0.1, 0.5}, o);
  CHECK(monotone(st));
  for (const auto &h : st.history)
    if (h.rejected)
      CHECK(h.value == 0.0);
  CHECK(st.x[0] <= 0.8);
  CHECK_THROWS_AS(principal_axis_maximize(p, {0.9, 0.5}, o), ConfigError);
  o.budget = 0;
  CHECK_THROWS_AS(principal_axis_maximize(p, {0.1, 0.5}, o), ConfigError);
  o.budget = 1;
  CHECK(principal_axis_maximize(p, {0.1, 0.5}, o).evaluations == 1);
}

TEST_CASE("pulse optimization honours the caps and is reproducible") {
  const auto m = toy(42);
  auto s = multi_rempi_setup(m, m.energy_grid[5], 1, 4e-4, units::fs_to_au(5.0));
  OptimizerOptions o;
  o.budget = 60;
  const auto r = principal_axis_optimize(m, s.spec, s.train, o);
  CHECK(monotone(r.state));
  REQUIRE(r.audit.size() == r.state.history.size());
  for (std::size_t i = 0; i < r.audit.size(); ++i) {
    if (r.audit[i].feasible) {
      CHECK(r.audit[i].intensity <= 1e11);
      CHECK(r.audit[i].yield <= 0.06);
    } else {
      CHECK(r.state.history[i].value == 0.0);
    }
  }
  CHECK(r.evaluation.objective == doctest::Approx(r.state.best).epsilon(1e-12));
  for (std::size_t j = 0; j < 2; ++j)
    CHECK(r.best.pulses[j].carrier == s.train.pulses[j].carrier);
  const auto again = principal_axis_optimize(m, s.spec, s.train, o);
  for (std::size_t i = 0; i < r.state.history.size(); ++i)
    CHECK(again.state.history[i].value == r.state.history[i].value);

  auto bad = s.train;
  bad.pulses[0].amplitude = 1.0;
  s.spec.bounds.assign(2, PulseBounds{});
  s.spec.bounds[0].amplitude = {0.0, 2.0};
  CHECK_THROWS_AS(principal_axis_optimize(m, s.spec, bad, o), ConfigError);
}

TEST_CASE("train encoding round trip and locks") {
  ObjectiveSpec s;
  s.carrier_locked = {true, false};
  const auto tr = two_color();
  const TrainEncoding enc(tr, s);
  CHECK(enc.slots.size() == 9);
  CHECK(enc.blocks.size() == 5);
  const auto back = enc.decode(enc.encode(tr));
  for (std::size_t j = 0; j < 2; ++j) {
    CHECK(back.pulses[j].amplitude == doctest::Approx(tr.pulses[j].amplitude).epsilon(1e-12));
    CHECK(back.pulses[j].carrier == doctest::Approx(tr.pulses[j].carrier).epsilon(1e-12));
    CHECK(back.pulses[j].fwhm == doctest::Approx(tr.pulses[j].fwhm).epsilon(1e-12));
  }
  auto out = tr;
  out.pulses[1].cep = 5.0;
  CHECK_THROWS_AS(enc.encode(out), ConfigError);
}

TEST_CASE("multi-REMPI setup") {
  const auto m = toy();
  const double e = m.energy_grid[6];
  const auto one = multi_rempi_setup(m, e, 1);
  REQUIRE(one.train.pulses.size() == 2);
  CHECK(one.train.pulses[0].carrier + one.train.pulses[1].carrier == doctest::Approx(e + m.ip()).epsilon(1e-15));
  CHECK(one.spec.mode == Mode::fixed_energy);
  CHECK(one.spec.locked(0));
  CHECK(one.spec.locked(1));
  const auto two = multi_rempi_setup(m, e, 2);
  REQUIRE(two.train.pulses.size() == 4);
  const auto w = m.transitions();
  for (std::size_t j = 0; j < 2; ++j) {
    CHECK(two.train.pulses[j].carrier == w[j]);
    const double detuning = e + m.ip() - two.train.pulses[j].carrier - two.train.pulses[j + 2].carrier;
    CHECK(std::abs(detuning) < 1e-15);
  }
  CHECK_THROWS_AS(multi_rempi_setup(m, e, 0), ConfigError);
  CHECK_THROWS_AS(multi_rempi_setup(m, e, 3), ConfigError);
  CHECK_THROWS_AS(multi_rempi_setup_for(m, e, {5}), ConfigError);
}

TEST_CASE("delay scan") {
  model::ToyOptions to;
  to.transitions = {0.33};
  const auto m = model::generate_toy_chiral(7, 1, 2, {}, to);
  ObjectiveSpec s;
  s.eval.energies = model::energy_grid_eV(1.0, 3.0, 9);
  s.intensity_cap = 0;
  s.yield_cap = 0;
  field::PulseTrain tr;
  tr.pulses = {{5e-4, 0.33, 0.0, units::fs_to_au(4.0), 0.0}, {5e-4, 0.18, 0.0, units::fs_to_au(4.0), 0.0}};
  std::vector<double> taus = {0.0};
  for (int i = 0; i < 12; ++i)
    taus.push_back(units::fs_to_au(15.0 + 2.0 * i));
  const auto scan = delay_scan(m, tr, 0.245, taus, s);
  const auto serial = delay_scan_serial(m, tr, 0.245, taus, s);
  CHECK(scan[0].value == evaluate(m, tr, s).gamma_prime);
  double lo = 1e300, hi = 0.0;
  for (std::size_t i = 0; i < scan.size(); ++i) {
    CHECK(scan[i].value == serial[i].value);
    if (i > 0) {
      lo = std::min(lo, scan[i].value);
      hi = std::max(hi, scan[i].value);
    }
  }
  CHECK(hi - lo <= 0.01 * hi);
  CHECK_THROWS_AS(delay_scan(m, tr, 0.33, taus, s), ConfigError);
}

TEST_CASE("dominant frequency of a sampled cosine") {
  std::vector<ScanPoint> scan;
  for (int i = 0; i < 200; ++i) {
    const double t = 400.0 + 16.0 * i;
    scan.push_back({t, 3.0 + 0.4 * std::cos(0.04 * t + 0.3) + 0.05 * std::cos(0.11 * t)});
  }
  CHECK(dominant_frequency(scan) == doctest::Approx(0.04).epsilon(0.01));
  CHECK_THROWS_AS(dominant_frequency({{0, 1}, {1, 2}}), ConfigError);
}

TEST_CASE("bichromatic map symmetries") {
  const auto m = toy(43);
  field::PulseTrain templ;
  templ.pulses = {{3e-4, 0.26, 0.0, units::fs_to_au(3.0), 0.0}, {2e-4, 0.52, 0.0, units::fs_to_au(3.0), 0.0}};
  const std::vector<double> omega = {0.255, 0.262};
  const std::vector<double> dphi = {0.0, pi / 2, pi, 3 * pi / 2, 2 * pi};
  ObjectiveSpec s;
  const auto b = bichromatic_map(m, omega, dphi, templ, s);
  const auto ser = bichromatic_map_serial(m, omega, dphi, templ, s);
  CHECK(b.pecd == ser.pecd);
  CHECK(b.inter == ser.inter);
  for (std::size_t iw = 0; iw < omega.size(); ++iw) {
    const double p0 = b.pecd[b.index(iw, 0)];
    CHECK(p0 > 0.0);
    CHECK(std::abs(b.pecd[b.index(iw, 4)] - p0) <= 1e-9 * p0);
    CHECK(std::abs(b.inter[b.index(iw, 4)] - b.inter[b.index(iw, 0)]) <= 1e-9 * std::abs(b.inter[b.index(iw, 0)]));
    for (std::size_t ip = 1; ip < dphi.size(); ++ip) {
      const double o0 = b.one[b.index(iw, 0)];
      CHECK(std::abs(b.one[b.index(iw, ip)] - o0) <= 1e-9 * std::abs(o0));
    }
    for (std::size_t ip = 0; ip + 2 < dphi.size(); ++ip) {
      const double a = b.inter[b.index(iw, ip)], c = b.inter[b.index(iw, ip + 2)];
      CHECK(std::abs(a + c) <= 1e-6 * std::abs(a));
    }
  }
  field::PulseTrain three = templ;
  three.pulses.push_back(templ.pulses[0]);
  CHECK_THROWS_AS(bichromatic_map(m, omega, dphi, three, s), ConfigError);
}
