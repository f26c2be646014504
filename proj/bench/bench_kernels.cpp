// Threaded kernels against their serial reference twins.
#include "pecd/anisotropy.hpp"
#include "pecd/control.hpp"
#include "pecd/oracle.hpp"
#include "pecd/units.hpp"
#include <benchmark/benchmark.h>

using namespace pecd;

namespace {

field::PulseTrain two_color() {
  field::PulseTrain tr;
  tr.pulses = {{0.003, 0.26, 0.2, units::fs_to_au(3.0), 0.0}, {0.002, 0.52, 0.9, units::fs_to_au(3.0), 0.0}};
  return tr;
}

const model::MolecularModel &toy() {
  static const auto m = model::generate_toy_chiral(11, 4, 3, model::energy_grid_eV(1.0, 4.0, 32));
  return m;
}

void BM_field_integrals(benchmark::State &st) {
  const auto &m = toy();
  const auto tr = two_color();
  for (auto _ : st)
    benchmark::DoNotOptimize(field::field_integrals(tr, m.ip(), m.transitions(), m.energy_grid));
}

void BM_field_integrals_serial(benchmark::State &st) {
  const auto &m = toy();
  const auto tr = two_color();
  for (auto _ : st)
    benchmark::DoNotOptimize(field::field_integrals_serial(tr, m.ip(), m.transitions(), m.energy_grid));
}

//! the serial twin is a direct nested sum, so the beta pair uses a smaller model
const model::MolecularModel &small() {
  static const auto m = model::generate_toy_chiral(11, 2, 2, model::energy_grid_eV(1.0, 4.0, 8));
  return m;
}

void BM_betas(benchmark::State &st) {
  const auto &m = small();
  const auto fi = anisotropy::model_field_integrals(m, two_color());
  for (auto _ : st)
    benchmark::DoNotOptimize(anisotropy::compute_betas(m, fi, 1));
}

void BM_betas_serial(benchmark::State &st) {
  const auto &m = small();
  const auto fi = anisotropy::model_field_integrals(m, two_color());
  for (auto _ : st)
    benchmark::DoNotOptimize(anisotropy::compute_betas_serial(m, fi, 1));
}

const std::vector<double> &theta() {
  static const std::vector<double> t = {0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
  return t;
}

void BM_quadrature(benchmark::State &st) {
  const auto m = model::resample(toy(), model::energy_grid_eV(1.0, 4.0, 4));
  const auto fi = anisotropy::model_field_integrals(m, two_color());
  const auto g = oracle::EulerGrid::make(8, 8, 8);
  for (auto _ : st)
    benchmark::DoNotOptimize(oracle::quadrature_average(m, fi, 1, g, theta(), {units::pi / 2}));
}

void BM_quadrature_serial(benchmark::State &st) {
  const auto m = model::resample(toy(), model::energy_grid_eV(1.0, 4.0, 4));
  const auto fi = anisotropy::model_field_integrals(m, two_color());
  const auto g = oracle::EulerGrid::make(8, 8, 8);
  for (auto _ : st)
    benchmark::DoNotOptimize(oracle::quadrature_average_serial(m, fi, 1, g, theta(), {units::pi / 2}));
}

struct ScanCase {
  model::MolecularModel m;
  field::PulseTrain tr;
  control::ObjectiveSpec spec;
  std::vector<double> taus;
};

const ScanCase &scan_case() {
  static const ScanCase c = [] {
    ScanCase s;
    model::ToyOptions to;
    to.transitions = {0.31, 0.35};
    s.m = model::generate_toy_chiral(7, 2, 3, {}, to);
    s.tr.pulses = {{5e-4, 0.32, 0.0, units::fs_to_au(4.0), 0.0}, {5e-4, 0.18, 0.0, units::fs_to_au(4.0), 0.0}};
    s.spec.eval.energies = model::energy_grid_eV(1.0, 3.0, 9);
    s.spec.intensity_cap = 0.0;
    s.spec.yield_cap = 0.0;
    for (int i = 0; i < 24; ++i)
      s.taus.push_back(units::fs_to_au(10.0 + 0.4 * i));
    return s;
  }();
  return c;
}

void BM_delay_scan(benchmark::State &st) {
  const auto &c = scan_case();
  for (auto _ : st)
    benchmark::DoNotOptimize(control::delay_scan(c.m, c.tr, 0.245, c.taus, c.spec));
}

void BM_delay_scan_serial(benchmark::State &st) {
  const auto &c = scan_case();
  for (auto _ : st)
    benchmark::DoNotOptimize(control::delay_scan_serial(c.m, c.tr, 0.245, c.taus, c.spec));
}

} // namespace

BENCHMARK(BM_field_integrals)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_field_integrals_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_betas)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_betas_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_quadrature)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_quadrature_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_delay_scan)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_delay_scan_serial)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
