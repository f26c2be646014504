#pragma once
#include <complex>
#include <utility>
#include <vector>

//! Sum-of-Gaussians pulse trains and the time integrals built from them.
namespace pecd::field {

using cplx = std::complex<double>;

//! One sub-pulse, atomic units throughout.
struct PulseParams {
  double amplitude = 0.0;
  double carrier = 0.0;
  double cep = 0.0;
  double fwhm = 1.0;
  double delay = 0.0;
  double sigma() const;
};

struct PulseTrain {
  std::vector<PulseParams> pulses;
  int mu0 = 1;
  //! throws ConfigError on amplitude < 0, fwhm <= 0 or |mu0| > 1
  void validate() const;
};

double evaluate_field(const PulseTrain &train, double t);
//! Complex-carrier form sum_j eps_j env_j(t) exp(i(w_j (t-tau_j) + phi_j)).
cplx analytic_signal(const PulseTrain &train, double t);
//! Closed-form integral of exp(i w t) E(t) over the real line.
cplx spectrum(const PulseTrain &train, double w);

//! Uniform samples covering the train, step <= (2 pi / w_max) / 40.
std::vector<double> sample_times(const PulseTrain &train, double span_sigmas = 8.0);
//! kappa * max_t |E(t)|^2 on sample_times(), W/cm^2.
double peak_intensity(const PulseTrain &train);

struct TimeGridOptions {
  double span_sigmas = 8.0;
  int nodes_per_panel = 12;
  int panels_per_period = 4;
  double decay_tol = 1e-12;
};

//! Composite Gauss-Legendre panels with a per-panel spectral integration
//! matrix, so both definite and running integrals are high order.
class TimeQuadrature {
public:
  TimeQuadrature(double t0, double t1, double omega_max, const TimeGridOptions &opt);

  const std::vector<double> &nodes() const { return t_; }
  const std::vector<double> &weights() const { return w_; }
  int panels() const { return n_panels_; }
  int per_panel() const { return p_; }
  double panel_length() const { return h_; }
  double start() const { return t0_; }

  cplx integrate(const std::vector<cplx> &f) const;
  //! Running integral from the window start up to every node.
  std::vector<cplx> cumulative(const std::vector<cplx> &g) const;
  //! exp(i d t_n) at every node, by per-panel phasor recurrence.
  std::vector<cplx> phases(double d) const;

private:
  double t0_, h_;
  int n_panels_, p_;
  std::vector<double> x_, wx_; // reference nodes on [-1,1]
  std::vector<double> S_;      // p x p running-integral matrix
  std::vector<double> t_, w_;
};

//! Window [min(tau - span sigma), max(tau + span sigma)]; throws
//! ConvergenceError when the envelope has not decayed at its edges.
std::pair<double, double> integration_window(const PulseTrain &train,
                                             const TimeGridOptions &opt);

cplx one_photon_integral(const PulseTrain &train, double delta,
                         const TimeGridOptions &opt = {});
cplx two_photon_integral(const PulseTrain &train, double d_final, double d_inter,
                         const TimeGridOptions &opt = {});

//! F1 at delta = eps_k + ip and zeta per branch. Branch 0 is the
//! permanent-dipole branch (intermediate detuning 0), branch r+1 uses the
//! transition energy w_r0 = transitions[r].
struct FieldIntegrals {
  std::vector<double> energies;
  double ip = 0.0;
  std::vector<double> transitions;
  std::vector<cplx> F1;
  std::vector<std::vector<cplx>> zeta;
  std::size_t branches() const { return zeta.size(); }
};

FieldIntegrals field_integrals(const PulseTrain &train, double ip,
                               const std::vector<double> &transitions,
                               const std::vector<double> &energies,
                               const TimeGridOptions &opt = {});
//! Same quantities, direct node sums with no phasor recurrence and no
//! threading; kept as the reference for the parallel kernel.
FieldIntegrals field_integrals_serial(const PulseTrain &train, double ip,
                                      const std::vector<double> &transitions,
                                      const std::vector<double> &energies,
                                      const TimeGridOptions &opt = {});

//! Shift sub-pulses with carrier > cutoff by -tau (positive tau: the
//! high-frequency group arrives first).
PulseTrain apply_spectral_delay(const PulseTrain &train, double cutoff, double tau,
                                double overlap_tol = 1e-6);

struct WignerMap {
  std::vector<double> t, w;
  std::vector<double> values; // row-major [it][iw]
  double at(std::size_t it, std::size_t iw) const { return values[it * w.size() + iw]; }
};
WignerMap wigner_time_frequency(const PulseTrain &train, const std::vector<double> &t,
                                const std::vector<double> &w);

} // namespace pecd::field
