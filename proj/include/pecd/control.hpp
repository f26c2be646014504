#pragma once
#include "pecd/anisotropy.hpp"
#include "pecd/field.hpp"
#include "pecd/model.hpp"
#include "pecd/observables.hpp"
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

//! Objectives, constraints, the principal-axis optimizer and scan experiments.
namespace pecd::control {

struct Bounds {
  double lo = 0.0, hi = 1.0;
};

//! Per-sub-pulse search box, atomic units.
struct PulseBounds {
  Bounds amplitude{0.0, 1.7e-3};
  Bounds carrier{0.05, 1.0};
  Bounds cep{-3.141592653589793, 3.141592653589793};
  Bounds fwhm{41.3, 1240.0};
  Bounds delay{-2067.0, 2067.0};
};

enum class Mode { fixed_energy, free_energy };

struct EvalOptions {
  //! evaluation energies (a.u.); empty means the model grid
  std::vector<double> energies;
  std::vector<double> theta = observables::theta_grid();
  double threshold = 1e-12;
  field::TimeGridOptions time;
};

struct ObjectiveSpec {
  Mode mode = Mode::free_energy;
  double target_energy = 0.0;
  double intensity_cap = 1e11; // W/cm^2, <= 0 disables
  double yield_cap = 0.06;     // <= 0 disables
  //! minimum |tau_i - tau_j| between sub-pulses, 0 disables
  double min_delay_gap = 0.0;
  std::vector<bool> carrier_locked;
  std::vector<PulseBounds> bounds; // one per sub-pulse, default box when short
  EvalOptions eval;
  PulseBounds bounds_for(std::size_t j) const { return j < bounds.size() ? bounds[j] : PulseBounds{}; }
  bool locked(std::size_t j) const { return j < carrier_locked.size() && carrier_locked[j]; }
};

struct Evaluation {
  anisotropy::BetaSet betas;
  observables::PECDMap map;
  double gamma = 0.0;       // max_theta |PECD(e*, theta)|, fixed-energy mode
  double gamma_prime = 0.0; // max over the whole map
  double peak_intensity = 0.0;
  double yield = 0.0;
  bool feasible = true;
  std::string reason;
  //! the value the optimizer sees: gamma or gamma_prime, 0 when infeasible
  double objective = 0.0;
};

//! Caches the evaluation-grid model so repeated evaluations only redo
//! field integrals and betas.
class Evaluator {
public:
  Evaluator(const model::MolecularModel &m, ObjectiveSpec spec);
  Evaluation operator()(const field::PulseTrain &train) const;
  const model::MolecularModel &grid_model() const { return model_; }
  const ObjectiveSpec &spec() const { return spec_; }
  std::size_t target_index() const { return target_; }

private:
  model::MolecularModel model_;
  ObjectiveSpec spec_;
  std::size_t target_ = 0;
};

Evaluation evaluate(const model::MolecularModel &m, const field::PulseTrain &train,
                    const ObjectiveSpec &spec);
//! Fixed-energy objective; rejected candidates score 0.
double objective_gamma(const model::MolecularModel &m, const field::PulseTrain &train,
                       const ObjectiveSpec &spec);
double objective_gamma_prime(const model::MolecularModel &m, const field::PulseTrain &train,
                             const ObjectiveSpec &spec);

// --- optimizer --------------------------------------------------------

struct OptimizerOptions {
  int budget = 2000;
  double rel_tol = 1e-4;
  std::uint64_t seed = 1;
  int max_cycles = 50;
  //! stop when a cycle gains less than rel_tol |best| + abs_tol
  double abs_tol = 1e-15;
  //! Brent bits of the line search abscissa
  int line_bits = 24;
  int line_iterations = 40;
};

struct HistoryEntry {
  int evaluation = 0;
  double value = 0.0;
  double best = 0.0;
  bool rejected = false;
};

struct OptimizerState {
  std::vector<double> x;    // best point, unit cube
  std::vector<std::vector<double>> directions;
  double best = 0.0;
  int evaluations = 0;
  int cycles = 0;
  std::vector<HistoryEntry> history;
};

//! Unit-cube maximization problem split into parameter blocks.
struct Problem {
  std::size_t dim = 0;
  std::vector<std::vector<std::size_t>> blocks;
  //! value and rejection flag
  std::function<std::pair<double, bool>(const std::vector<double> &)> f;
};

//! Sequential principal-axis search: each block gets conjugate-direction
//! line maximizations whose direction set is re-oriented on the principal
//! axes of the accepted steps; directions reset every block cycle.
OptimizerState principal_axis_maximize(const Problem &p, const std::vector<double> &x0,
                                       const OptimizerOptions &opt = {});

//! Map between trains and the unit cube, honoring carrier locks.
struct TrainEncoding {
  field::PulseTrain templ;
  ObjectiveSpec spec;
  std::vector<std::pair<std::size_t, int>> slots; // (pulse, field 0..4)
  std::vector<std::vector<std::size_t>> blocks;
  TrainEncoding(const field::PulseTrain &t, const ObjectiveSpec &s);
  std::vector<double> encode(const field::PulseTrain &t) const;
  field::PulseTrain decode(const std::vector<double> &x) const;
};

//! Constraint audit of one optimizer evaluation.
struct Audit {
  double intensity = 0.0, yield = 0.0, objective = 0.0;
  bool feasible = true;
};

struct PulseOptimization {
  field::PulseTrain best;
  Evaluation evaluation;
  OptimizerState state;
  std::vector<Audit> audit; // one per history entry
};

PulseOptimization principal_axis_optimize(const model::MolecularModel &m, const ObjectiveSpec &spec,
                                          const field::PulseTrain &initial,
                                          const OptimizerOptions &opt = {});

// --- experiments ------------------------------------------------------

struct RempiSetup {
  ObjectiveSpec spec;
  field::PulseTrain train;
};
//! Excitation pulses at w_r0 and ionization partners at e* + IP - w_r0 for
//! the listed bound states, all carriers locked.
RempiSetup multi_rempi_setup_for(const model::MolecularModel &m, double target_energy,
                                 const std::vector<std::size_t> &bound_indices,
                             double amplitude = 5e-4, double fwhm = 165.0);
//! First n bound states.
RempiSetup multi_rempi_setup(const model::MolecularModel &m, double target_energy, int n,
                             double amplitude = 5e-4, double fwhm = 165.0);

struct ScanPoint {
  double tau = 0.0;
  double value = 0.0; // gamma_prime or gamma per the spec mode, constraints not applied
};
std::vector<ScanPoint> delay_scan(const model::MolecularModel &m, const field::PulseTrain &train,
                                  double cutoff, const std::vector<double> &taus,
                                  const ObjectiveSpec &spec);
std::vector<ScanPoint> delay_scan_serial(const model::MolecularModel &m,
                                         const field::PulseTrain &train, double cutoff,
                                         const std::vector<double> &taus,
                                         const ObjectiveSpec &spec);

//! Angular frequency of the strongest non-DC component of a uniformly
//! sampled scan (Hann window, zero padding x pad).
double dominant_frequency(const std::vector<ScanPoint> &scan, int pad = 16);

struct BichromaticMap {
  std::vector<double> omega, dphi;
  //! [iw][ip]; pecd in percent, pathway panels are signed contributions
  //! to sigma(+) - sigma(-) at their own argmax, raw distribution units
  std::vector<double> pecd, one, two, inter;
  std::size_t index(std::size_t iw, std::size_t ip) const { return iw * dphi.size() + ip; }
};
//! Template sub-pulse 0 is the fundamental, 1 the second harmonic; carriers
//! are set to (w, 2w) and the harmonic CEP to 2 cep_0 + dphi.
BichromaticMap bichromatic_map(const model::MolecularModel &m, const std::vector<double> &omega,
                               const std::vector<double> &dphi, const field::PulseTrain &templ,
                               const ObjectiveSpec &spec);
BichromaticMap bichromatic_map_serial(const model::MolecularModel &m,
                                      const std::vector<double> &omega,
                                      const std::vector<double> &dphi,
                                      const field::PulseTrain &templ, const ObjectiveSpec &spec);

} // namespace pecd::control
