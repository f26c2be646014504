#pragma once
#include <array>
#include <complex>
#include <cstdint>
#include <vector>

//! Molecular inputs: orbital energies and partial-wave dipole tables.
/*!
  Spherical components are indexed mu + 1, mu in {-1, 0, +1}, with
  r_mu = e_mu . r and e_{+1} = -(x + i y)/sqrt2, e_{-1} = (x - i y)/sqrt2.
  Partial-wave channels (l, m) are packed as l*l + l + m.
*/
namespace pecd::model {

using cplx = std::complex<double>;
using Vec3c = std::array<cplx, 3>;

inline int channel(int l, int m) { return l * l + l + m; }
inline int channel_count(int lmax) { return (lmax + 1) * (lmax + 1); }

//! Complex table over (energy node, channel, mu).
class ChannelTable {
public:
  ChannelTable() = default;
  ChannelTable(std::size_t n_energy, int lmax);

  int lmax() const { return lmax_; }
  std::size_t energies() const { return n_energy_; }
  cplx &at(std::size_t k, int l, int m, int mu) { return v_[index(k, l, m, mu)]; }
  const cplx &at(std::size_t k, int l, int m, int mu) const { return v_[index(k, l, m, mu)]; }
  //! raw row for energy k: channel-major, mu fastest
  const cplx *row(std::size_t k) const { return v_.data() + k * row_size(); }
  cplx *row(std::size_t k) { return v_.data() + k * row_size(); }
  std::size_t row_size() const { return static_cast<std::size_t>(channel_count(lmax_)) * 3; }
  bool operator==(const ChannelTable &) const = default;

private:
  std::size_t index(std::size_t k, int l, int m, int mu) const {
    return k * row_size() + static_cast<std::size_t>(channel(l, m)) * 3 +
           static_cast<std::size_t>(mu + 1);
  }
  std::size_t n_energy_ = 0;
  int lmax_ = 0;
  std::vector<cplx> v_;
};

struct BoundState {
  double energy = 0.0;
  Vec3c dipole_from_homo{};
  bool operator==(const BoundState &) const = default;
};

struct MolecularModel {
  double homo_energy = 0.0;
  Vec3c ground_dipole{};
  std::vector<BoundState> bound_states;
  std::vector<double> energy_grid;
  int lmax = 0;
  ChannelTable continuum_from_homo;
  std::vector<ChannelTable> continuum_from_bound;

  double ip() const { return -homo_energy; }
  //! w_r0 = eps_r - eps_i0 per bound state
  std::vector<double> transitions() const;
  //! throws SchemaError naming the offending field
  void validate() const;
  bool operator==(const MolecularModel &) const = default;
};

//! T^b_{nu nu'}(k, l, m), nu the ionizing photon, nu' the exciting one.
//! Branch 0 is the permanent-dipole branch, branch r+1 goes through bound r.
class TwoPhotonTensor {
public:
  TwoPhotonTensor(std::size_t branches, std::size_t n_energy, int lmax);
  std::size_t branches() const { return branches_; }
  int lmax() const { return lmax_; }
  cplx &at(std::size_t b, std::size_t k, int l, int m, int nu, int nup) {
    return v_[index(b, k, l, m, nu, nup)];
  }
  const cplx &at(std::size_t b, std::size_t k, int l, int m, int nu, int nup) const {
    return v_[index(b, k, l, m, nu, nup)];
  }

private:
  std::size_t index(std::size_t b, std::size_t k, int l, int m, int nu, int nup) const {
    const std::size_t nc = static_cast<std::size_t>(channel_count(lmax_));
    return ((b * n_energy_ + k) * nc + static_cast<std::size_t>(channel(l, m))) * 9 +
           static_cast<std::size_t>(3 * (nu + 1) + nup + 1);
  }
  std::size_t branches_, n_energy_;
  int lmax_;
  std::vector<cplx> v_;
};

TwoPhotonTensor build_two_photon_tensor(const MolecularModel &m);

//! Channel values at one energy, linear in energy between nodes.
struct DipoleSample {
  std::vector<cplx> from_homo;               // channel-major, mu fastest
  std::vector<std::vector<cplx>> from_bound; // per bound state
};
DipoleSample interpolate_dipoles(const MolecularModel &m, double energy);

//! Same model on a new energy grid (tables interpolated linearly).
MolecularModel resample(const MolecularModel &m, const std::vector<double> &grid);

struct ToyOptions {
  //! explicit w_r0 values; drawn in [0.20, 0.34] when empty
  std::vector<double> transitions;
  double ground_dipole_scale = 0.4;
  double bound_dipole_scale = 0.8;
};

//! Uniform grid of n nodes over [lo_eV, hi_eV], returned in a.u.
std::vector<double> energy_grid_eV(double lo_eV, double hi_eV, int n);

//! Deterministic pseudo-random model with generic (chiral) dipole tables.
MolecularModel generate_toy_chiral(std::uint64_t seed, int n_bound = 4, int lmax = 3,
                                   const std::vector<double> &grid = {},
                                   const ToyOptions &opt = {});

//! Symmetrize every dipole table under the y -> -y reflection:
//! X^mu_{lm} -> [X^mu_{lm} + (-1)^{m+mu} X^{-mu}_{l,-m}] / 2 and
//! d^mu -> [d^mu + (-1)^mu d^{-mu}] / 2.
MolecularModel mirror_achiralize(const MolecularModel &m);

//! Reflection-symmetric tables (up to rounding)?
bool is_reflection_symmetric(const MolecularModel &m, double tol = 1e-14);

} // namespace pecd::model
