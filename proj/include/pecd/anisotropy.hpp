#pragma once
#include "pecd/field.hpp"
#include "pecd/model.hpp"
#include <complex>
#include <vector>

//! Orientation-averaged anisotropy parameters of the three pathways.
/*!
  The lab-frame distribution for polarization mu0 is

    sigma(e, t, p) = sum_L b1_{L,0} P_L + sum_L b2_{L,0} P_L
                   + 2 sum_L Re[bint_{L,mu0} exp(i mu0 p)] P^{mu0}_L

  with sigma the orientation integral (not average) of |alpha|^2, so the
  normalization constant is kOrientationMeasure = 8 pi^2.
*/
namespace pecd::anisotropy {

using cplx = std::complex<double>;

constexpr double kOrientationMeasure = 8.0 * 3.14159265358979323846 * 3.14159265358979323846;

enum class Pathway { one_photon, two_photon, interference };
const char *pathway_name(Pathway p);

struct BetaTable {
  Pathway pathway = Pathway::one_photon;
  int mu0 = 1;
  int M = 0;
  int Lmin = 0, Lmax = 0;
  std::vector<double> energies;
  std::vector<cplx> values; // [(L - Lmin) * energies + k]
  //! set for the mu0 = 0 interference channel
  bool nonstandard = false;

  bool has(int L) const { return L >= Lmin && L <= Lmax; }
  //! Structurally absent (L, M) entries are exactly zero.
  cplx at(int L, std::size_t k) const;
  cplx at(int L, int M, std::size_t k) const;
  cplx &ref(int L, std::size_t k) { return values[static_cast<std::size_t>(L - Lmin) * energies.size() + k]; }
};

struct BetaSet {
  int mu0 = 1;
  BetaTable one, two, inter;
  const std::vector<double> &energies() const { return one.energies; }
};

//! Zero table with the structural (L, M) range of the pathway.
BetaTable make_beta_table(Pathway p, int mu0, const std::vector<double> &energies);

//! (2Q+1) 3j(1,1,Q; mu,mu',-mu-mu') 3j(1,1,Q; mu0,mu0,-2mu0)
double g_coefficient(int Q, int mu, int mup, int mu0);

//! Field integrals on the model grid for this train.
field::FieldIntegrals model_field_integrals(const model::MolecularModel &m,
                                            const field::PulseTrain &train,
                                            const field::TimeGridOptions &opt = {});

BetaTable beta_1ph(const model::MolecularModel &m, const field::FieldIntegrals &fi, int mu0);
BetaTable beta_2ph(const model::MolecularModel &m, const field::FieldIntegrals &fi, int mu0);
BetaTable beta_int(const model::MolecularModel &m, const field::FieldIntegrals &fi, int mu0);

BetaTable beta_1ph(const model::MolecularModel &m, const field::PulseTrain &train, int mu0);
BetaTable beta_2ph(const model::MolecularModel &m, const field::PulseTrain &train, int mu0);
BetaTable beta_int(const model::MolecularModel &m, const field::PulseTrain &train, int mu0);

//! All three tables from one set of field integrals.
BetaSet compute_betas(const model::MolecularModel &m, const field::FieldIntegrals &fi, int mu0);
BetaSet compute_betas(const model::MolecularModel &m, const field::PulseTrain &train, int mu0,
                      const field::TimeGridOptions &opt = {});

//! Direct nested sums over every photon component, partial wave and
//! rotation rank, no precomputed coupling lists and no threading.
BetaSet compute_betas_serial(const model::MolecularModel &m, const field::FieldIntegrals &fi,
                             int mu0);

//! Expansion weights of the molecular-frame amplitudes,
//! a_lm(R) = sum_{Q,s} W_{Q,s}(lm) D^{Q*}_{lambda,s}(R),
//! lambda = -mu0 (first order) or -2 mu0 (second order). Layout
//! [channel][rank block], rank block = Q*Q + Q + s.
struct AmplitudeWeights {
  int lambda = 0;
  int Qmax = 0;
  std::vector<cplx> w;
};
AmplitudeWeights first_order_weights(const model::MolecularModel &m, const field::FieldIntegrals &fi,
                                     std::size_t k, int mu0);
AmplitudeWeights second_order_weights(const model::MolecularModel &m,
                                      const model::TwoPhotonTensor &t,
                                      const field::FieldIntegrals &fi, std::size_t k, int mu0);

} // namespace pecd::anisotropy
