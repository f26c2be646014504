#pragma once
#include "pecd/anisotropy.hpp"
#include <vector>

//! Distributions, PECD maps, normalization and hemisphere averages.
namespace pecd::observables {

using anisotropy::BetaSet;

//! Lab-frame distribution at energy index k.
double momentum_distribution(const BetaSet &b, std::size_t k, double theta, double phi);
//! Same, linear in energy between grid nodes; RangeError outside the grid.
double momentum_distribution(const BetaSet &b, double energy, double theta, double phi);

//! Uniform theta grid over [0, pi], n points (181 gives 1 degree steps).
std::vector<double> theta_grid(int n = 181);

//! Peak of the mu0 = +1 distribution over (energy grid x theta grid, phi = pi/2).
double normalization(const BetaSet &plus, const std::vector<double> &theta = theta_grid());

//! PECD(e, t) = c1 P_1 + c3 P_3 + cint sin 2t, percent of the normalization.
struct PECDMap {
  std::vector<double> energies, theta;
  std::vector<double> values; // [k][it]
  std::vector<double> c1, c3, cint;
  double norm = 0.0;
  double at(std::size_t k, std::size_t it) const { return values[k * theta.size() + it]; }
  //! evaluated at any angle from the stored coefficients
  double eval(std::size_t k, double theta) const;
};

struct MapOptions {
  std::vector<double> theta = theta_grid();
  double threshold = 1e-12;
  //! normalization from an external value (> 0) instead of the map's own
  double norm_override = 0.0;
};

PECDMap pecd_map(const BetaSet &plus, const MapOptions &opt = {});

//! Interference-only part of the map (percent).
double interference_part(const PECDMap &m, std::size_t k, double theta);

//! rho_f = int_0^{pi/2} PECD sin t dt (Gauss-Legendre), rho_b over [pi/2, pi].
std::vector<double> hemisphere_average(const PECDMap &m, bool forward = true, int nodes = 32);

struct Extremum {
  std::size_t k = 0, it = 0;
  double energy = 0.0, theta = 0.0, value = 0.0;
};
//! Largest |PECD|; ties go to the smallest theta, then the smallest energy.
Extremum argmax_pecd(const PECDMap &m);

//! Orientation-averaged ionization probability,
//! (1/8pi^2) int de int dOmega sigma = (4pi/8pi^2) int (b1_00 + b2_00) de.
double yield(const BetaSet &b);

} // namespace pecd::observables
