#include "pecd/control.hpp"
#include "pecd/error.hpp"
#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>

namespace pecd::control {

namespace {

constexpr double pi = std::numbers::pi;

std::vector<double> evaluation_grid(const model::MolecularModel &m, const ObjectiveSpec &spec,
                                    std::size_t &target) {
  std::vector<double> g = spec.eval.energies.empty() ? m.energy_grid : spec.eval.energies;
  std::sort(g.begin(), g.end());
  if (spec.mode == Mode::fixed_energy) {
    const double e = spec.target_energy;
    if (g.empty() || e < g.front() - 1e-12 || e > g.back() + 1e-12)
      throw RangeError("target energy outside the evaluation grid");
    auto it = std::min_element(g.begin(), g.end(),
                               [e](double a, double b) { return std::abs(a - e) < std::abs(b - e); });
    if (std::abs(*it - e) > 1e-12) {
      g.insert(std::upper_bound(g.begin(), g.end(), e), e);
      it = std::find(g.begin(), g.end(), e);
    }
    target = static_cast<std::size_t>(it - g.begin());
  }
  return g;
}

void check_spec(const ObjectiveSpec &s) {
  if (s.intensity_cap < 0 || s.yield_cap < 0 || s.min_delay_gap < 0)
    throw ConfigError("objective caps must be positive (0 disables)");
}

} // namespace

Evaluator::Evaluator(const model::MolecularModel &m, ObjectiveSpec spec) : spec_(std::move(spec)) {
  check_spec(spec_);
  const auto g = evaluation_grid(m, spec_, target_);
  model_ = (g == m.energy_grid) ? m : model::resample(m, g);
}

Evaluation Evaluator::operator()(const field::PulseTrain &train) const {
  train.validate();
  Evaluation ev;
  ev.betas = anisotropy::compute_betas(model_, train, train.mu0, spec_.eval.time);
  observables::MapOptions mo;
  mo.theta = spec_.eval.theta;
  mo.threshold = spec_.eval.threshold;
  ev.map = observables::pecd_map(ev.betas, mo);
  for (double v : ev.map.values)
    ev.gamma_prime = std::max(ev.gamma_prime, std::abs(v));
  if (spec_.mode == Mode::fixed_energy)
    for (std::size_t it = 0; it < ev.map.theta.size(); ++it)
      ev.gamma = std::max(ev.gamma, std::abs(ev.map.at(target_, it)));
  ev.peak_intensity = field::peak_intensity(train);
  ev.yield = observables::yield(ev.betas);

  if (spec_.intensity_cap > 0 && ev.peak_intensity > spec_.intensity_cap) {
    ev.feasible = false;
    ev.reason = "peak intensity above cap";
  } else if (spec_.yield_cap > 0 && ev.yield > spec_.yield_cap) {
    ev.feasible = false;
    ev.reason = "yield above cap";
  } else if (spec_.min_delay_gap > 0) {
    const auto &p = train.pulses;
    for (std::size_t i = 0; i < p.size() && ev.feasible; ++i)
      for (std::size_t j = i + 1; j < p.size(); ++j)
        if (std::abs(p[i].delay - p[j].delay) < spec_.min_delay_gap) {
          ev.feasible = false;
          ev.reason = "sub-pulses closer than the minimum delay";
          break;
        }
  }
  const double v = spec_.mode == Mode::fixed_energy ? ev.gamma : ev.gamma_prime;
  ev.objective = ev.feasible ? v : 0.0;
  return ev;
}

Evaluation evaluate(const model::MolecularModel &m, const field::PulseTrain &train,
                    const ObjectiveSpec &spec) {
  return Evaluator(m, spec)(train);
}

double objective_gamma(const model::MolecularModel &m, const field::PulseTrain &train,
                       const ObjectiveSpec &spec) {
  ObjectiveSpec s = spec;
  s.mode = Mode::fixed_energy;
  return evaluate(m, train, s).objective;
}

double objective_gamma_prime(const model::MolecularModel &m, const field::PulseTrain &train,
                             const ObjectiveSpec &spec) {
  ObjectiveSpec s = spec;
  s.mode = Mode::free_energy;
  return evaluate(m, train, s).objective;
}

// --- encoding ---------------------------------------------------------

namespace {

Bounds slot_bounds(const PulseBounds &b, int f) {
  switch (f) {
  case 0: return b.amplitude;
  case 1: return b.carrier;
  case 2: return b.cep;
  case 3: return b.fwhm;
  default: return b.delay;
  }
}

double &slot_ref(field::PulseParams &p, int f) {
  switch (f) {
  case 0: return p.amplitude;
  case 1: return p.carrier;
  case 2: return p.cep;
  case 3: return p.fwhm;
  default: return p.delay;
  }
}

} // namespace

TrainEncoding::TrainEncoding(const field::PulseTrain &t, const ObjectiveSpec &s) : templ(t), spec(s) {
  for (int f = 0; f < 5; ++f) {
    std::vector<std::size_t> block;
    for (std::size_t j = 0; j < t.pulses.size(); ++j) {
      if (f == 1 && spec.locked(j))
        continue;
      const Bounds b = slot_bounds(spec.bounds_for(j), f);
      if (!(b.hi > b.lo))
        continue;
      block.push_back(slots.size());
      slots.emplace_back(j, f);
    }
    if (!block.empty())
      blocks.push_back(block);
  }
}

std::vector<double> TrainEncoding::encode(const field::PulseTrain &t) const {
  std::vector<double> x(slots.size());
  for (std::size_t i = 0; i < slots.size(); ++i) {
    auto p = t.pulses.at(slots[i].first);
    const Bounds b = slot_bounds(spec.bounds_for(slots[i].first), slots[i].second);
    const double v = slot_ref(p, slots[i].second);
    if (v < b.lo - 1e-12 * std::abs(b.lo) || v > b.hi + 1e-12 * std::abs(b.hi))
      throw ConfigError("initial pulse parameter outside its bounds (pulse " +
                        std::to_string(slots[i].first) + ")");
    x[i] = std::clamp((v - b.lo) / (b.hi - b.lo), 0.0, 1.0);
  }
  return x;
}

field::PulseTrain TrainEncoding::decode(const std::vector<double> &x) const {
  field::PulseTrain t = templ;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const Bounds b = slot_bounds(spec.bounds_for(slots[i].first), slots[i].second);
    slot_ref(t.pulses[slots[i].first], slots[i].second) = b.lo + x[i] * (b.hi - b.lo);
  }
  return t;
}

PulseOptimization principal_axis_optimize(const model::MolecularModel &m, const ObjectiveSpec &spec,
                                          const field::PulseTrain &initial,
                                          const OptimizerOptions &opt) {
  if (opt.budget < 1)
    throw ConfigError("optimizer budget must be >= 1");
  const Evaluator eval(m, spec);
  const TrainEncoding enc(initial, spec);
  const auto x0 = enc.encode(initial);
  if (const auto ev0 = eval(enc.decode(x0)); !ev0.feasible)
    throw ConfigError("initial pulse train violates the constraints: " + ev0.reason);
  PulseOptimization out;
  Problem p;
  p.dim = x0.size();
  p.blocks = enc.blocks;
  p.f = [&](const std::vector<double> &x) {
    const auto ev = eval(enc.decode(x));
    out.audit.push_back({ev.peak_intensity, ev.yield, ev.objective, ev.feasible});
    return std::pair<double, bool>{ev.objective, !ev.feasible};
  };
  out.state = principal_axis_maximize(p, x0, opt);
  out.best = enc.decode(out.state.x);
  out.evaluation = eval(out.best);
  return out;
}

// --- experiments ------------------------------------------------------

RempiSetup multi_rempi_setup_for(const model::MolecularModel &m, double target_energy,
                                 const std::vector<std::size_t> &bound_indices, double amplitude,
                                 double fwhm) {
  if (bound_indices.empty())
    throw ConfigError("multi-REMPI setup needs at least one pathway");
  if (bound_indices.size() > m.bound_states.size())
    throw ConfigError("more REMPI pathways than bound states");
  const auto w = m.transitions();
  RempiSetup s;
  s.spec.mode = Mode::fixed_energy;
  s.spec.target_energy = target_energy;
  std::vector<field::PulseParams> exc, ion;
  for (std::size_t r : bound_indices) {
    if (r >= w.size())
      throw ConfigError("bound state index out of range");
    const double wi = target_energy + m.ip() - w[r];
    if (!(wi > 0))
      throw ConfigError("ionizing photon energy would be non-positive");
    exc.push_back({amplitude, w[r], 0.0, fwhm, 0.0});
    ion.push_back({amplitude, wi, 0.0, fwhm, 0.0});
  }
  s.train.pulses = exc;
  s.train.pulses.insert(s.train.pulses.end(), ion.begin(), ion.end());
  s.spec.carrier_locked.assign(s.train.pulses.size(), true);
  return s;
}

RempiSetup multi_rempi_setup(const model::MolecularModel &m, double target_energy, int n,
                             double amplitude, double fwhm) {
  if (n < 1)
    throw ConfigError("multi-REMPI setup needs at least one pathway");
  std::vector<std::size_t> idx;
  for (int r = 0; r < n; ++r)
    idx.push_back(static_cast<std::size_t>(r));
  return multi_rempi_setup_for(m, target_energy, idx, amplitude, fwhm);
}

namespace {

double scan_value(const Evaluation &ev, const ObjectiveSpec &s) {
  return s.mode == Mode::fixed_energy ? ev.gamma : ev.gamma_prime;
}

std::vector<ScanPoint> run_delay_scan(const model::MolecularModel &m, const field::PulseTrain &train,
                                      double cutoff, const std::vector<double> &taus,
                                      const ObjectiveSpec &spec, bool parallel) {
  const Evaluator eval(m, spec);
  std::vector<ScanPoint> out(taus.size());
  if (taus.empty())
    return out;
  // surfaces configuration errors before any threading
  (void)field::apply_spectral_delay(train, cutoff, taus[0]);
  std::exception_ptr err;
  const auto n = static_cast<std::ptrdiff_t>(taus.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      const auto u = static_cast<std::size_t>(i);
      const auto ev = eval(field::apply_spectral_delay(train, cutoff, taus[u]));
      out[u] = {taus[u], scan_value(ev, spec)};
    } catch (...) {
#pragma omp critical(pecd_scan_error)
      if (!err)
        err = std::current_exception();
    }
  }
  if (err)
    std::rethrow_exception(err);
  return out;
}

BichromaticMap run_bichromatic(const model::MolecularModel &m, const std::vector<double> &omega,
                               const std::vector<double> &dphi, const field::PulseTrain &templ,
                               const ObjectiveSpec &spec, bool parallel) {
  if (templ.pulses.size() != 2)
    throw ConfigError("bichromatic template needs exactly two sub-pulses");
  const Evaluator eval(m, spec);
  BichromaticMap b;
  b.omega = omega;
  b.dphi = dphi;
  const std::size_t n = omega.size() * dphi.size();
  b.pecd.assign(n, 0.0);
  b.one.assign(n, 0.0);
  b.two.assign(n, 0.0);
  b.inter.assign(n, 0.0);
  std::exception_ptr err;
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    try {
      const auto u = static_cast<std::size_t>(i);
      const std::size_t iw = u / dphi.size(), ip = u % dphi.size();
      field::PulseTrain t = templ;
      t.pulses[0].carrier = omega[iw];
      t.pulses[1].carrier = 2 * omega[iw];
      t.pulses[1].cep = 2 * templ.pulses[0].cep + dphi[ip];
      const auto ev = eval(t);
      b.pecd[u] = ev.gamma_prime;
      const auto &bs = ev.betas;
      double a1 = -1, a2 = -1, a3 = -1;
      for (std::size_t k = 0; k < bs.energies().size(); ++k)
        for (double th : ev.map.theta) {
          const double x = std::cos(th);
          const double p3 = 0.5 * (5 * x * x * x - 3 * x);
          const double v1 = 2 * bs.one.at(1, k).real() * x;
          const double v2 = 2 * bs.two.at(1, k).real() * x + 2 * bs.two.at(3, k).real() * p3;
          const double v3 = 6 * bs.inter.at(2, k).imag() * std::sin(2 * th);
          if (std::abs(v1) > a1) { a1 = std::abs(v1); b.one[u] = v1; }
          if (std::abs(v2) > a2) { a2 = std::abs(v2); b.two[u] = v2; }
          if (std::abs(v3) > a3) { a3 = std::abs(v3); b.inter[u] = v3; }
        }
    } catch (...) {
#pragma omp critical(pecd_scan_error)
      if (!err)
        err = std::current_exception();
    }
  }
  if (err)
    std::rethrow_exception(err);
  return b;
}

} // namespace

std::vector<ScanPoint> delay_scan(const model::MolecularModel &m, const field::PulseTrain &train,
                                  double cutoff, const std::vector<double> &taus,
                                  const ObjectiveSpec &spec) {
  return run_delay_scan(m, train, cutoff, taus, spec, true);
}

std::vector<ScanPoint> delay_scan_serial(const model::MolecularModel &m,
                                         const field::PulseTrain &train, double cutoff,
                                         const std::vector<double> &taus,
                                         const ObjectiveSpec &spec) {
  return run_delay_scan(m, train, cutoff, taus, spec, false);
}

double dominant_frequency(const std::vector<ScanPoint> &scan, int pad) {
  const std::size_t n = scan.size();
  if (n < 4)
    throw ConfigError("dominant_frequency needs at least 4 scan points");
  const double dt = scan[1].tau - scan[0].tau;
  if (!(dt > 0))
    throw ConfigError("scan delays must increase uniformly");
  double mean = 0.0;
  for (const auto &p : scan)
    mean += p.value / static_cast<double>(n);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = 0.5 - 0.5 * std::cos(2 * pi * static_cast<double>(i) / static_cast<double>(n - 1));
    y[i] = w * (scan[i].value - mean);
  }
  const std::size_t npad = n * static_cast<std::size_t>(std::max(pad, 1));
  const double dw = 2 * pi / (static_cast<double>(npad) * dt);
  double best = -1.0, wbest = 0.0;
  for (std::size_t j = 1; j <= npad / 2; ++j) {
    const double w = static_cast<double>(j) * dw;
    std::complex<double> s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      s += y[i] * std::polar(1.0, -w * dt * static_cast<double>(i));
    if (std::norm(s) > best) {
      best = std::norm(s);
      wbest = w;
    }
  }
  return wbest;
}

BichromaticMap bichromatic_map(const model::MolecularModel &m, const std::vector<double> &omega,
                               const std::vector<double> &dphi, const field::PulseTrain &templ,
                               const ObjectiveSpec &spec) {
  return run_bichromatic(m, omega, dphi, templ, spec, true);
}

BichromaticMap bichromatic_map_serial(const model::MolecularModel &m,
                                      const std::vector<double> &omega,
                                      const std::vector<double> &dphi,
                                      const field::PulseTrain &templ, const ObjectiveSpec &spec) {
  return run_bichromatic(m, omega, dphi, templ, spec, false);
}

} // namespace pecd::control
