#include "pecd/oracle.hpp"
#include "pecd/angular.hpp"
#include "pecd/error.hpp"
#include <algorithm>
#include <cmath>
#include <numbers>

namespace pecd::oracle {

using model::channel;
using model::channel_count;

namespace {

constexpr double pi = std::numbers::pi;
double parity(int n) { return (n % 2 == 0) ? 1.0 : -1.0; }

using Mat3 = std::array<std::array<double, 3>, 3>;

Mat3 rotation(const Orientation &o) {
  const double ca = std::cos(o.alpha), sa = std::sin(o.alpha);
  const double cb = std::cos(o.beta), sb = std::sin(o.beta);
  const double cg = std::cos(o.gamma), sg = std::sin(o.gamma);
  // Rz(a) Ry(b) Rz(g)
  return {{{ca * cb * cg - sa * sg, -ca * cb * sg - sa * cg, ca * sb},
           {sa * cb * cg + ca * sg, -sa * cb * sg + ca * cg, sa * sb},
           {-sb * cg, sb * sg, cb}}};
}

// Y_lm at the molecular-frame image R^T k of every lab node, [node][channel]
std::vector<cplx> rotated_harmonics(const Mat3 &R, int lmax, const std::vector<double> &theta,
                                    const std::vector<double> &phi) {
  const std::size_t nc = static_cast<std::size_t>(channel_count(lmax));
  std::vector<cplx> Y(theta.size() * phi.size() * nc);
  for (std::size_t it = 0; it < theta.size(); ++it)
    for (std::size_t ip = 0; ip < phi.size(); ++ip) {
      const double k[3] = {std::sin(theta[it]) * std::cos(phi[ip]),
                           std::sin(theta[it]) * std::sin(phi[ip]), std::cos(theta[it])};
      double v[3] = {0, 0, 0};
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          v[i] += R[j][i] * k[j];
      const double th = std::acos(std::clamp(v[2], -1.0, 1.0));
      const double ph = std::atan2(v[1], v[0]);
      cplx *y = &Y[(it * phi.size() + ip) * nc];
      for (int l = 0; l <= lmax; ++l)
        for (int m = -l; m <= l; ++m)
          y[channel(l, m)] = angular::spherical_harmonic(l, m, th, ph);
    }
  return Y;
}

struct Accum {
  std::vector<double> one, two;
  std::vector<cplx> cross;
  explicit Accum(std::size_t n) : one(n, 0.0), two(n, 0.0), cross(n, 0.0) {}
  void add(const Accum &o) {
    for (std::size_t i = 0; i < one.size(); ++i) {
      one[i] += o.one[i];
      two[i] += o.two[i];
      cross[i] += o.cross[i];
    }
  }
};

void accumulate_orientation(const model::MolecularModel &m, const field::FieldIntegrals &fi, int mu0,
                            const Orientation &o, double weight, const std::vector<double> &theta,
                            const std::vector<double> &phi, Accum &acc) {
  const AmplitudeSet a = molecular_frame_amplitudes(m, fi, mu0, o);
  const auto Y = rotated_harmonics(rotation(o), m.lmax, theta, phi);
  const std::size_t nc = a.channels(), nn = theta.size() * phi.size();
  for (std::size_t k = 0; k < a.energies.size(); ++k)
    for (std::size_t n = 0; n < nn; ++n) {
      cplx f1 = 0.0, f2 = 0.0;
      const cplx *y = &Y[n * nc];
      for (std::size_t c = 0; c < nc; ++c) {
        f1 += a.first[k * nc + c] * y[c];
        f2 += a.second[k * nc + c] * y[c];
      }
      const std::size_t i = k * nn + n;
      acc.one[i] += weight * std::norm(f1);
      acc.two[i] += weight * std::norm(f2);
      acc.cross[i] += weight * f1 * std::conj(f2);
    }
}

LabDistribution finish(const model::MolecularModel &m, const std::vector<double> &theta,
                       const std::vector<double> &phi, Accum &&acc) {
  LabDistribution d;
  d.energies = m.energy_grid;
  d.theta = theta;
  d.phi = phi;
  d.one = std::move(acc.one);
  d.two = std::move(acc.two);
  d.cross = std::move(acc.cross);
  return d;
}

} // namespace

EulerGrid EulerGrid::make(int na, int nb, int ng) {
  if (na < 1 || nb < 1 || ng < 1)
    throw ConfigError("Euler grid needs at least one node per axis");
  EulerGrid g;
  g.na = na, g.nb = nb, g.ng = ng;
  for (int i = 0; i < na; ++i) {
    g.alpha.push_back(2 * pi * i / na);
    g.wa.push_back(2 * pi / na);
  }
  for (int i = 0; i < ng; ++i) {
    g.gamma.push_back(2 * pi * i / ng);
    g.wg.push_back(2 * pi / ng);
  }
  std::vector<double> x, w;
  angular::gauss_legendre(nb, x, w);
  for (int i = 0; i < nb; ++i) {
    g.beta.push_back(std::acos(x[static_cast<std::size_t>(i)]));
    g.wb.push_back(w[static_cast<std::size_t>(i)]);
  }
  return g;
}

double EulerGrid::total_weight() const {
  double a = 0, b = 0, c = 0;
  for (double x : wa)
    a += x;
  for (double x : wb)
    b += x;
  for (double x : wg)
    c += x;
  return a * b * c;
}

std::array<cplx, 3> lab_coupling(int mu0, const Orientation &o) {
  std::array<cplx, 3> c;
  for (int nu = -1; nu <= 1; ++nu)
    c[nu + 1] = parity(mu0 + 2) * std::conj(angular::wigner_D(1, -mu0, nu, o.alpha, o.beta, o.gamma));
  return c;
}

AmplitudeSet molecular_frame_amplitudes(const model::MolecularModel &m,
                                        const field::FieldIntegrals &fi, int mu0,
                                        const Orientation &o) {
  AmplitudeSet a;
  a.energies = m.energy_grid;
  a.lmax = m.lmax;
  const std::size_t nc = a.channels(), nk = m.energy_grid.size();
  a.first.assign(nk * nc, 0.0);
  a.second.assign(nk * nc, 0.0);
  const auto c = lab_coupling(mu0, o);
  const cplx I(0.0, 1.0);
  for (std::size_t k = 0; k < nk; ++k)
    for (int l = 0; l <= m.lmax; ++l)
      for (int mm = -l; mm <= l; ++mm) {
        cplx v1 = 0.0, v2 = 0.0;
        for (int nu = -1; nu <= 1; ++nu) {
          const cplx mk = m.continuum_from_homo.at(k, l, mm, nu);
          v1 += c[nu + 1] * mk;
          for (int nup = -1; nup <= 1; ++nup) {
            const cplx cc = c[nu + 1] * c[nup + 1];
            v2 -= fi.zeta[0][k] * cc * mk * m.ground_dipole[nup + 1];
            for (std::size_t r = 0; r < m.bound_states.size(); ++r)
              v2 -= fi.zeta[r + 1][k] * cc * m.continuum_from_bound[r].at(k, l, mm, nu) *
                    m.bound_states[r].dipole_from_homo[nup + 1];
          }
        }
        const std::size_t i = k * nc + static_cast<std::size_t>(channel(l, mm));
        a.first[i] = I * fi.F1[k] * v1;
        a.second[i] = v2;
      }
  return a;
}

AmplitudeSet molecular_frame_amplitudes(const model::MolecularModel &m,
                                        const field::PulseTrain &train, int mu0,
                                        const Orientation &o) {
  return molecular_frame_amplitudes(m, anisotropy::model_field_integrals(m, train), mu0, o);
}

LabDistribution quadrature_average(const model::MolecularModel &m, const field::FieldIntegrals &fi,
                                   int mu0, const EulerGrid &g, const std::vector<double> &theta,
                                   const std::vector<double> &phi) {
  const std::size_t n = m.energy_grid.size() * theta.size() * phi.size();
  const std::size_t no = g.size();
  Accum total(n);
#pragma omp parallel
  {
    Accum local(n);
#pragma omp for schedule(dynamic)
    for (std::size_t q = 0; q < no; ++q) {
      const std::size_t ia = q / (g.beta.size() * g.gamma.size());
      const std::size_t ib = (q / g.gamma.size()) % g.beta.size();
      const std::size_t ig = q % g.gamma.size();
      accumulate_orientation(m, fi, mu0, {g.alpha[ia], g.beta[ib], g.gamma[ig]},
                             g.wa[ia] * g.wb[ib] * g.wg[ig], theta, phi, local);
    }
#pragma omp critical
    total.add(local);
  }
  return finish(m, theta, phi, std::move(total));
}

LabDistribution quadrature_average_serial(const model::MolecularModel &m,
                                          const field::FieldIntegrals &fi, int mu0,
                                          const EulerGrid &g, const std::vector<double> &theta,
                                          const std::vector<double> &phi) {
  Accum acc(m.energy_grid.size() * theta.size() * phi.size());
  for (std::size_t ia = 0; ia < g.alpha.size(); ++ia)
    for (std::size_t ib = 0; ib < g.beta.size(); ++ib)
      for (std::size_t ig = 0; ig < g.gamma.size(); ++ig)
        accumulate_orientation(m, fi, mu0, {g.alpha[ia], g.beta[ib], g.gamma[ig]},
                               g.wa[ia] * g.wb[ib] * g.wg[ig], theta, phi, acc);
  return finish(m, theta, phi, std::move(acc));
}

ConvergedAverage converged_average(const model::MolecularModel &m, const field::FieldIntegrals &fi,
                                   int mu0, const std::vector<double> &theta,
                                   const std::vector<double> &phi, int start, int max_nodes,
                                   double tol) {
  int n = start;
  EulerGrid g = EulerGrid::make(n, n, n);
  LabDistribution prev = quadrature_average(m, fi, mu0, g, theta, phi);
  double change = 0.0;
  while (2 * n <= max_nodes) {
    n *= 2;
    EulerGrid gn = EulerGrid::make(n, n, n);
    LabDistribution next = quadrature_average(m, fi, mu0, gn, theta, phi);
    double peak = 0.0, diff = 0.0;
    for (std::size_t i = 0; i < next.one.size(); ++i) {
      const double a = next.one[i] + next.two[i] + 2 * next.cross[i].real();
      const double b = prev.one[i] + prev.two[i] + 2 * prev.cross[i].real();
      peak = std::max(peak, std::abs(a));
      diff = std::max(diff, std::abs(a - b));
    }
    change = peak > 0 ? diff / peak : 0.0;
    prev = std::move(next);
    g = std::move(gn);
    if (change < tol)
      return {std::move(prev), std::move(g), change};
  }
  throw ConvergenceError("orientation quadrature not converged at " + std::to_string(n) +
                         " nodes per axis (relative change " + std::to_string(change) + ")");
}

anisotropy::BetaSet quadrature_betas(const model::MolecularModel &m,
                                     const field::FieldIntegrals &fi, int mu0,
                                     const EulerGrid &g) {
  // |f|^2 is band-limited to 2 lmax; the projection adds at most 4
  const int nt = m.lmax + 6, np = 4 * m.lmax + 12;
  std::vector<double> x, wx;
  angular::gauss_legendre(nt, x, wx);
  std::vector<double> theta, phi;
  for (double xi : x)
    theta.push_back(std::acos(xi));
  for (int j = 0; j < np; ++j)
    phi.push_back(2 * pi * j / np);
  const LabDistribution d = quadrature_average(m, fi, mu0, g, theta, phi);

  anisotropy::BetaSet out;
  out.mu0 = mu0;
  out.one = anisotropy::make_beta_table(anisotropy::Pathway::one_photon, mu0, m.energy_grid);
  out.two = anisotropy::make_beta_table(anisotropy::Pathway::two_photon, mu0, m.energy_grid);
  out.inter = anisotropy::make_beta_table(anisotropy::Pathway::interference, mu0, m.energy_grid);
  auto project = [&](anisotropy::BetaTable &t, auto value) {
    for (std::size_t k = 0; k < d.energies.size(); ++k)
      for (int L = t.Lmin; L <= t.Lmax; ++L) {
        const int M = t.M;
        cplx s = 0.0;
        for (std::size_t it = 0; it < theta.size(); ++it) {
          const double p = angular::assoc_legendre(L, M, x[it]);
          for (std::size_t ip = 0; ip < phi.size(); ++ip)
            s += wx[it] * (2 * pi / np) * value(d.index(k, it, ip)) * p *
                 std::polar(1.0, -M * phi[ip]);
        }
        const double norm = 4 * pi / (2 * L + 1) * angular::factorial(L + M) /
                            angular::factorial(L - M);
        t.ref(L, k) = s / norm;
      }
  };
  project(out.one, [&](std::size_t i) { return cplx(d.one[i]); });
  project(out.two, [&](std::size_t i) { return cplx(d.two[i]); });
  project(out.inter, [&](std::size_t i) { return d.cross[i]; });
  return out;
}

} // namespace pecd::oracle
