#include "pecd/model.hpp"
#include "pecd/error.hpp"
#include "pecd/units.hpp"
#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace pecd::model {

ChannelTable::ChannelTable(std::size_t n_energy, int lmax)
    : n_energy_(n_energy), lmax_(lmax),
      v_(n_energy * static_cast<std::size_t>(channel_count(lmax)) * 3, cplx(0.0)) {}

std::vector<double> MolecularModel::transitions() const {
  std::vector<double> w;
  for (const auto &b : bound_states)
    w.push_back(b.energy - homo_energy);
  return w;
}

namespace {

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

void check_table(const ChannelTable &t, std::size_t n, int lmax, const std::string &path) {
  if (t.energies() != n)
    throw SchemaError(path, "table has " + std::to_string(t.energies()) + " energy rows, grid has " +
                                std::to_string(n));
  if (t.lmax() != lmax)
    throw SchemaError(path, "table lmax " + std::to_string(t.lmax()) + " differs from model lmax");
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < t.row_size(); ++i)
      if (!finite(t.row(k)[i]))
        throw SchemaError(path + "/" + std::to_string(k), "non-finite dipole value");
}

} // namespace

void MolecularModel::validate() const {
  if (!(homo_energy < 0.0))
    throw SchemaError("/homo_energy", "must be negative (bound HOMO)");
  if (lmax < 0)
    throw SchemaError("/lmax", "must be >= 0");
  if (energy_grid.empty())
    throw SchemaError("/energy_grid", "empty");
  for (std::size_t k = 0; k < energy_grid.size(); ++k) {
    if (!std::isfinite(energy_grid[k]) || energy_grid[k] <= 0.0)
      throw SchemaError("/energy_grid/" + std::to_string(k), "photoelectron energy must be > 0");
    if (k > 0 && !(energy_grid[k] > energy_grid[k - 1]))
      throw SchemaError("/energy_grid/" + std::to_string(k), "grid not strictly increasing");
  }
  for (int mu = 0; mu < 3; ++mu)
    if (!finite(ground_dipole[mu]))
      throw SchemaError("/ground_dipole", "non-finite component");
  for (std::size_t r = 0; r < bound_states.size(); ++r) {
    const auto &b = bound_states[r];
    const std::string p = "/bound_states/" + std::to_string(r);
    if (!(b.energy < 0.0))
      throw SchemaError(p + "/energy", "bound state must lie below the ionization threshold");
    if (!(b.energy > homo_energy))
      throw SchemaError(p + "/energy", "bound state must lie above the HOMO");
    for (int mu = 0; mu < 3; ++mu)
      if (!finite(b.dipole_from_homo[mu]))
        throw SchemaError(p + "/dipole_from_homo", "non-finite component");
  }
  check_table(continuum_from_homo, energy_grid.size(), lmax, "/continuum_from_homo");
  if (continuum_from_bound.size() != bound_states.size())
    throw SchemaError("/continuum_from_bound", "expected one table per bound state");
  for (std::size_t r = 0; r < continuum_from_bound.size(); ++r)
    check_table(continuum_from_bound[r], energy_grid.size(), lmax,
                "/continuum_from_bound/" + std::to_string(r));
}

TwoPhotonTensor::TwoPhotonTensor(std::size_t branches, std::size_t n_energy, int lmax)
    : branches_(branches), n_energy_(n_energy), lmax_(lmax),
      v_(branches * n_energy * static_cast<std::size_t>(channel_count(lmax)) * 9, cplx(0.0)) {}

TwoPhotonTensor build_two_photon_tensor(const MolecularModel &m) {
  const std::size_t nk = m.energy_grid.size();
  TwoPhotonTensor t(m.bound_states.size() + 1, nk, m.lmax);
  for (std::size_t k = 0; k < nk; ++k)
    for (int l = 0; l <= m.lmax; ++l)
      for (int mm = -l; mm <= l; ++mm)
        for (int nu = -1; nu <= 1; ++nu)
          for (int nup = -1; nup <= 1; ++nup) {
            t.at(0, k, l, mm, nu, nup) =
                m.continuum_from_homo.at(k, l, mm, nu) * m.ground_dipole[nup + 1];
            for (std::size_t r = 0; r < m.bound_states.size(); ++r)
              t.at(r + 1, k, l, mm, nu, nup) = m.continuum_from_bound[r].at(k, l, mm, nu) *
                                               m.bound_states[r].dipole_from_homo[nup + 1];
          }
  return t;
}

namespace {

// bracketing node and weight of the upper node
std::pair<std::size_t, double> locate(const std::vector<double> &g, double e) {
  if (g.empty() || !(e >= g.front()) || !(e <= g.back()))
    throw RangeError("energy " + std::to_string(e) + " a.u. outside the model grid [" +
                     (g.empty() ? std::string("empty") :
                                  std::to_string(g.front()) + ", " + std::to_string(g.back())) +
                     "]");
  if (g.size() == 1)
    return {0, 0.0};
  auto it = std::upper_bound(g.begin(), g.end(), e);
  std::size_t hi = static_cast<std::size_t>(it - g.begin());
  if (hi >= g.size())
    hi = g.size() - 1;
  const std::size_t lo = hi - 1;
  return {lo, (e - g[lo]) / (g[hi] - g[lo])};
}

std::vector<cplx> interp_row(const ChannelTable &t, std::size_t lo, double w) {
  std::vector<cplx> out(t.row_size());
  const cplx *a = t.row(lo);
  if (w == 0.0) {
    std::copy(a, a + t.row_size(), out.begin());
    return out;
  }
  const cplx *b = t.row(lo + 1);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = (1.0 - w) * a[i] + w * b[i];
  return out;
}

} // namespace

DipoleSample interpolate_dipoles(const MolecularModel &m, double energy) {
  const auto [lo, w] = locate(m.energy_grid, energy);
  DipoleSample s;
  s.from_homo = interp_row(m.continuum_from_homo, lo, w);
  for (const auto &t : m.continuum_from_bound)
    s.from_bound.push_back(interp_row(t, lo, w));
  return s;
}

MolecularModel resample(const MolecularModel &m, const std::vector<double> &grid) {
  MolecularModel out = m;
  out.energy_grid = grid;
  out.continuum_from_homo = ChannelTable(grid.size(), m.lmax);
  out.continuum_from_bound.assign(m.bound_states.size(), ChannelTable(grid.size(), m.lmax));
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto s = interpolate_dipoles(m, grid[k]);
    std::copy(s.from_homo.begin(), s.from_homo.end(), out.continuum_from_homo.row(k));
    for (std::size_t r = 0; r < s.from_bound.size(); ++r)
      std::copy(s.from_bound[r].begin(), s.from_bound[r].end(), out.continuum_from_bound[r].row(k));
  }
  return out;
}

std::vector<double> energy_grid_eV(double lo_eV, double hi_eV, int n) {
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    g[static_cast<std::size_t>(i)] =
        units::eV_to_au(n == 1 ? lo_eV : lo_eV + (hi_eV - lo_eV) * i / (n - 1));
  return g;
}

namespace {

class Draw {
public:
  explicit Draw(std::uint64_t seed) : rng_(seed) {}
  //! uniform in [0,1) from the top 53 bits
  double u() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  double sym() { return 2.0 * u() - 1.0; }
  cplx c() {
    const double re = sym();
    return {re, sym()};
  }

private:
  std::mt19937_64 rng_;
};

void fill_smooth(Draw &d, ChannelTable &t, const std::vector<double> &grid) {
  const double mid = 0.5 * (grid.front() + grid.back());
  const double half = std::max(0.5 * (grid.back() - grid.front()), 1e-12);
  for (int l = 0; l <= t.lmax(); ++l)
    for (int m = -l; m <= l; ++m)
      for (int mu = -1; mu <= 1; ++mu) {
        const cplx c0 = d.c(), c1 = d.c(), c2 = d.c();
        const double s = 0.5 / (1.0 + l);
        for (std::size_t k = 0; k < grid.size(); ++k) {
          const double x = (grid[k] - mid) / half;
          t.at(k, l, m, mu) = s * (c0 + c1 * x + c2 * x * x);
        }
      }
}

} // namespace

MolecularModel generate_toy_chiral(std::uint64_t seed, int n_bound, int lmax,
                                   const std::vector<double> &grid, const ToyOptions &opt) {
  if (n_bound < 1 || lmax < 1)
    throw ConfigError("toy model needs n_bound >= 1 and lmax >= 1");
  if (!opt.transitions.empty() && opt.transitions.size() != static_cast<std::size_t>(n_bound))
    throw ConfigError("explicit transitions must list one energy per bound state");
  Draw d(seed);
  MolecularModel m;
  m.homo_energy = -0.4366;
  m.lmax = lmax;
  m.energy_grid = grid.empty() ? energy_grid_eV(1.0, 15.0, 32) : grid;

  const double r2 = std::sqrt(0.5);
  const double x = opt.ground_dipole_scale * d.sym(), y = opt.ground_dipole_scale * d.sym(),
               z = opt.ground_dipole_scale * d.sym();
  m.ground_dipole = {cplx(r2 * x, -r2 * y), cplx(z), cplx(-r2 * x, -r2 * y)};

  for (int r = 0; r < n_bound; ++r) {
    BoundState b;
    const double w = 0.20 + 0.14 * d.u();
    b.energy = m.homo_energy + (opt.transitions.empty() ? w : opt.transitions[static_cast<std::size_t>(r)]);
    for (int mu = 0; mu < 3; ++mu)
      b.dipole_from_homo[mu] = opt.bound_dipole_scale * d.c();
    m.bound_states.push_back(b);
  }
  m.continuum_from_homo = ChannelTable(m.energy_grid.size(), lmax);
  fill_smooth(d, m.continuum_from_homo, m.energy_grid);
  for (int r = 0; r < n_bound; ++r) {
    ChannelTable t(m.energy_grid.size(), lmax);
    fill_smooth(d, t, m.energy_grid);
    m.continuum_from_bound.push_back(std::move(t));
  }
  m.validate();
  return m;
}

namespace {

double parity(int n) { return (n % 2 == 0) ? 1.0 : -1.0; }

Vec3c reflect(const Vec3c &v) {
  Vec3c o;
  for (int mu = -1; mu <= 1; ++mu)
    o[mu + 1] = 0.5 * (v[mu + 1] + parity(mu + 2) * v[-mu + 1]);
  return o;
}

ChannelTable reflect(const ChannelTable &t) {
  ChannelTable o(t.energies(), t.lmax());
  for (std::size_t k = 0; k < t.energies(); ++k)
    for (int l = 0; l <= t.lmax(); ++l)
      for (int m = -l; m <= l; ++m)
        for (int mu = -1; mu <= 1; ++mu)
          o.at(k, l, m, mu) = 0.5 * (t.at(k, l, m, mu) + parity(m + mu + 4) * t.at(k, l, -m, -mu));
  return o;
}

} // namespace

MolecularModel mirror_achiralize(const MolecularModel &m) {
  MolecularModel o = m;
  o.ground_dipole = reflect(m.ground_dipole);
  for (auto &b : o.bound_states)
    b.dipole_from_homo = reflect(b.dipole_from_homo);
  o.continuum_from_homo = reflect(m.continuum_from_homo);
  for (auto &t : o.continuum_from_bound)
    t = reflect(t);
  return o;
}

bool is_reflection_symmetric(const MolecularModel &m, double tol) {
  const MolecularModel r = mirror_achiralize(m);
  auto close = [tol](cplx a, cplx b) { return std::abs(a - b) <= tol * (1.0 + std::abs(a)); };
  for (int mu = 0; mu < 3; ++mu)
    if (!close(r.ground_dipole[mu], m.ground_dipole[mu]))
      return false;
  for (std::size_t i = 0; i < m.bound_states.size(); ++i)
    for (int mu = 0; mu < 3; ++mu)
      if (!close(r.bound_states[i].dipole_from_homo[mu], m.bound_states[i].dipole_from_homo[mu]))
        return false;
  auto same = [&](const ChannelTable &a, const ChannelTable &b) {
    for (std::size_t k = 0; k < a.energies(); ++k)
      for (std::size_t i = 0; i < a.row_size(); ++i)
        if (!close(a.row(k)[i], b.row(k)[i]))
          return false;
    return true;
  };
  if (!same(r.continuum_from_homo, m.continuum_from_homo))
    return false;
  for (std::size_t i = 0; i < m.continuum_from_bound.size(); ++i)
    if (!same(r.continuum_from_bound[i], m.continuum_from_bound[i]))
      return false;
  return true;
}

} // namespace pecd::model
