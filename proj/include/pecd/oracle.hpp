#pragma once
#include "pecd/anisotropy.hpp"
#include "pecd/field.hpp"
#include "pecd/model.hpp"
#include <array>
#include <vector>

//! Ground-truth engines: brute-force orientation quadrature and weak-field
//! propagation of the coupled amplitude equations.
namespace pecd::oracle {

using cplx = std::complex<double>;

struct Orientation {
  double alpha = 0.0, beta = 0.0, gamma = 0.0;
};

//! Trapezoid in alpha and gamma, Gauss-Legendre in cos(beta).
struct EulerGrid {
  int na = 16, nb = 16, ng = 16;
  std::vector<double> alpha, wa, beta, wb, gamma, wg;
  static EulerGrid make(int na, int nb, int ng);
  std::size_t size() const { return alpha.size() * beta.size() * gamma.size(); }
  double total_weight() const;
};

//! c_nu(R) with e*_{mu0} . r_lab = sum_nu c_nu r_nu (molecular components),
//! from explicit Wigner-D evaluation.
std::array<cplx, 3> lab_coupling(int mu0, const Orientation &o);

//! First- and second-order channel amplitudes at one orientation,
//! [k][channel] each.
struct AmplitudeSet {
  std::vector<double> energies;
  int lmax = 0;
  std::vector<cplx> first, second;
  std::size_t channels() const { return static_cast<std::size_t>(model::channel_count(lmax)); }
  cplx first_at(std::size_t k, int l, int m) const { return first[k * channels() + static_cast<std::size_t>(model::channel(l, m))]; }
  cplx second_at(std::size_t k, int l, int m) const { return second[k * channels() + static_cast<std::size_t>(model::channel(l, m))]; }
};

AmplitudeSet molecular_frame_amplitudes(const model::MolecularModel &m,
                                        const field::FieldIntegrals &fi, int mu0,
                                        const Orientation &o);
AmplitudeSet molecular_frame_amplitudes(const model::MolecularModel &m,
                                        const field::PulseTrain &train, int mu0,
                                        const Orientation &o);

//! Orientation integrals (not averages) of |f1|^2, |f2|^2 and f1 f2* at lab
//! directions (theta_i, phi_j), f = sum_lm a_lm Y_lm(R^-1 k). Layout
//! [k][it][ip].
struct LabDistribution {
  std::vector<double> energies, theta, phi;
  std::vector<double> one, two;
  std::vector<cplx> cross;
  std::size_t index(std::size_t k, std::size_t it, std::size_t ip) const {
    return (k * theta.size() + it) * phi.size() + ip;
  }
  double total(std::size_t k, std::size_t it, std::size_t ip) const {
    const std::size_t i = index(k, it, ip);
    return one[i] + two[i] + 2.0 * cross[i].real();
  }
};

LabDistribution quadrature_average(const model::MolecularModel &m, const field::FieldIntegrals &fi,
                                   int mu0, const EulerGrid &g, const std::vector<double> &theta,
                                   const std::vector<double> &phi);
//! Same sums, one thread, orientation-by-orientation accumulation.
LabDistribution quadrature_average_serial(const model::MolecularModel &m,
                                          const field::FieldIntegrals &fi, int mu0,
                                          const EulerGrid &g, const std::vector<double> &theta,
                                          const std::vector<double> &phi);

//! Doubles the Euler grid from `start` until the largest change relative
//! to the peak falls below tol; ConvergenceError past max_nodes per axis.
struct ConvergedAverage {
  LabDistribution dist;
  EulerGrid grid;
  double change = 0.0;
};
ConvergedAverage converged_average(const model::MolecularModel &m, const field::FieldIntegrals &fi,
                                   int mu0, const std::vector<double> &theta,
                                   const std::vector<double> &phi, int start = 8,
                                   int max_nodes = 64, double tol = 1e-9);

//! Anisotropy parameters obtained by projecting the quadrature distribution
//! on P^M_L(cos t) exp(i M p) over a Gauss-Legendre x trapezoid sphere grid.
anisotropy::BetaSet quadrature_betas(const model::MolecularModel &m,
                                     const field::FieldIntegrals &fi, int mu0,
                                     const EulerGrid &g);

// --- weak-field propagation -------------------------------------------

struct PropagationOptions {
  double abs_tol = 1e-14;
  double rel_tol = 1e-12;
  double span_sigmas = 8.0;
  double min_step = 1e-6;
};

//! Amplitudes at the end of the pulse. Continuum entries are divided by
//! sqrt(w_k) (trapezoid bin weight) so they compare with channel amplitudes.
struct PropagationResult {
  cplx ground;
  std::vector<cplx> bound;
  std::vector<double> energies;
  int lmax = 0;
  std::vector<cplx> continuum; // [k][channel]
  double max_norm = 0.0;
  double final_norm = 0.0;
  std::size_t steps = 0;
};

//! Integrates d/dt a_p = i E(t) sum_q V_pq exp(i(E_p - E_q) t) a_q from
//! the ground state with adaptive Dormand-Prince steps.
PropagationResult propagate_weak_field(const model::MolecularModel &m,
                                       const field::PulseTrain &train, int mu0,
                                       const Orientation &o, const PropagationOptions &opt = {});

} // namespace pecd::oracle
