#include "pecd/anisotropy.hpp"
#include "pecd/angular.hpp"
#include "pecd/error.hpp"
#include <cmath>

namespace pecd::anisotropy {

using angular::w3j;
using model::channel;
using model::channel_count;

namespace {

double parity(int n) { return (n % 2 == 0) ? 1.0 : -1.0; }
int rank_block(int Q, int s) { return Q * Q + Q + s; }

//! Weight of W^a_i W^b*_j in beta_{L, la - lb}; i = (l, m, Q1, s1), j = (lp, mp, Q2, s2).
double coupling(int l, int m, int Q1, int s1, int lp, int mp, int Q2, int s2, int L, int la,
                int lb) {
  const int M = la - lb;
  if (m - mp != s1 - s2 || std::abs(M) > L)
    return 0.0;
  const double a = w3j(l, lp, L, 0, 0, 0);
  if (a == 0.0)
    return 0.0;
  const double b = w3j(Q1, Q2, L, -la, lb, M);
  if (b == 0.0)
    return 0.0;
  const double c = w3j(l, lp, L, m, -mp, mp - m);
  if (c == 0.0)
    return 0.0;
  const double d = w3j(Q1, Q2, L, -s1, s2, m - mp);
  return parity(m + la - s1 + 8) * angular::zeta_prefactor(l, lp, L, M) * a * b * c * d;
}

struct Term {
  int i, j, L;
  double value;
};

std::vector<Term> coupling_list(int lmax, int Qa, int la, int Qb, int lb, int Lmin, int Lmax) {
  std::vector<Term> out;
  const int nqa = (Qa + 1) * (Qa + 1), nqb = (Qb + 1) * (Qb + 1);
  for (int l = 0; l <= lmax; ++l)
    for (int m = -l; m <= l; ++m)
      for (int Q1 = 0; Q1 <= Qa; ++Q1)
        for (int s1 = -Q1; s1 <= Q1; ++s1)
          for (int lp = 0; lp <= lmax; ++lp)
            for (int mp = -lp; mp <= lp; ++mp)
              for (int Q2 = 0; Q2 <= Qb; ++Q2) {
                const int s2 = s1 - m + mp;
                if (std::abs(s2) > Q2)
                  continue;
                for (int L = Lmin; L <= Lmax; ++L) {
                  const double v = coupling(l, m, Q1, s1, lp, mp, Q2, s2, L, la, lb);
                  if (v != 0.0)
                    out.push_back({channel(l, m) * nqa + rank_block(Q1, s1),
                                   channel(lp, mp) * nqb + rank_block(Q2, s2), L, v});
                }
              }
  return out;
}

} // namespace

BetaTable make_beta_table(Pathway p, int mu0, const std::vector<double> &energies) {
  BetaTable t;
  t.pathway = p;
  t.mu0 = mu0;
  t.energies = energies;
  switch (p) {
  case Pathway::one_photon:
    t.Lmin = 0, t.Lmax = 2, t.M = 0;
    break;
  case Pathway::two_photon:
    t.Lmin = 0, t.Lmax = 4, t.M = 0;
    break;
  case Pathway::interference:
    t.M = mu0;
    t.Lmin = (mu0 == 0) ? 0 : 1;
    t.Lmax = 3;
    t.nonstandard = (mu0 == 0);
    break;
  }
  t.values.assign(static_cast<std::size_t>(t.Lmax - t.Lmin + 1) * energies.size(), cplx(0.0));
  return t;
}

namespace {

void check_inputs(const model::MolecularModel &m, const field::FieldIntegrals &fi, int mu0) {
  if (mu0 < -1 || mu0 > 1)
    throw ConfigError("mu0 must be -1, 0 or +1");
  if (fi.energies.size() != m.energy_grid.size() || fi.branches() != m.bound_states.size() + 1)
    throw ConfigError("field integrals do not match the model grid / bound states");
  bool ok = fi.F1.size() == fi.energies.size();
  for (const auto &z : fi.zeta)
    ok = ok && z.size() == fi.energies.size();
  if (!ok)
    throw ConfigError("field integral tables are shorter than the energy grid");
}

// beta^{ab} on every energy: 8 pi^2 sum W^a_i conj(W^b_j) A_L(i, j)
void contract(BetaTable &t, const std::vector<Term> &terms, const std::vector<AmplitudeWeights> &wa,
              const std::vector<AmplitudeWeights> &wb) {
  const std::size_t nk = t.energies.size();
#pragma omp parallel for schedule(static)
  for (std::size_t k = 0; k < nk; ++k) {
    std::vector<cplx> acc(static_cast<std::size_t>(t.Lmax - t.Lmin + 1), 0.0);
    const auto &a = wa[k].w;
    const auto &b = wb[k].w;
    for (const auto &term : terms)
      acc[static_cast<std::size_t>(term.L - t.Lmin)] +=
          term.value * a[static_cast<std::size_t>(term.i)] * std::conj(b[static_cast<std::size_t>(term.j)]);
    for (int L = t.Lmin; L <= t.Lmax; ++L)
      t.ref(L, k) = kOrientationMeasure * acc[static_cast<std::size_t>(L - t.Lmin)];
  }
}

std::vector<AmplitudeWeights> all_first(const model::MolecularModel &m,
                                        const field::FieldIntegrals &fi, int mu0) {
  std::vector<AmplitudeWeights> w(m.energy_grid.size());
#pragma omp parallel for schedule(static)
  for (std::size_t k = 0; k < w.size(); ++k)
    w[k] = first_order_weights(m, fi, k, mu0);
  return w;
}

std::vector<AmplitudeWeights> all_second(const model::MolecularModel &m,
                                         const model::TwoPhotonTensor &T,
                                         const field::FieldIntegrals &fi, int mu0) {
  std::vector<AmplitudeWeights> w(m.energy_grid.size());
#pragma omp parallel for schedule(static)
  for (std::size_t k = 0; k < w.size(); ++k)
    w[k] = second_order_weights(m, T, fi, k, mu0);
  return w;
}

} // namespace

const char *pathway_name(Pathway p) {
  switch (p) {
  case Pathway::one_photon:
    return "1ph";
  case Pathway::two_photon:
    return "2ph";
  case Pathway::interference:
    return "int";
  }
  return "?";
}

cplx BetaTable::at(int L, std::size_t k) const {
  if (!has(L))
    return 0.0;
  return values[static_cast<std::size_t>(L - Lmin) * energies.size() + k];
}

cplx BetaTable::at(int L, int Mq, std::size_t k) const { return Mq == M ? at(L, k) : cplx(0.0); }

double g_coefficient(int Q, int mu, int mup, int mu0) {
  return (2 * Q + 1) * w3j(1, 1, Q, mu, mup, -mu - mup) * w3j(1, 1, Q, mu0, mu0, -2 * mu0);
}

field::FieldIntegrals model_field_integrals(const model::MolecularModel &m,
                                            const field::PulseTrain &train,
                                            const field::TimeGridOptions &opt) {
  return field::field_integrals(train, m.ip(), m.transitions(), m.energy_grid, opt);
}

AmplitudeWeights first_order_weights(const model::MolecularModel &m, const field::FieldIntegrals &fi,
                                     std::size_t k, int mu0) {
  AmplitudeWeights W;
  W.lambda = -mu0;
  W.Qmax = 1;
  const int nc = channel_count(m.lmax);
  W.w.assign(static_cast<std::size_t>(nc) * 4, 0.0);
  const cplx pre = cplx(0.0, 1.0) * fi.F1[k] * parity(mu0 + 2);
  for (int l = 0; l <= m.lmax; ++l)
    for (int mm = -l; mm <= l; ++mm)
      for (int nu = -1; nu <= 1; ++nu)
        W.w[static_cast<std::size_t>(channel(l, mm) * 4 + rank_block(1, nu))] =
            pre * m.continuum_from_homo.at(k, l, mm, nu);
  return W;
}

AmplitudeWeights second_order_weights(const model::MolecularModel &m,
                                      const model::TwoPhotonTensor &T,
                                      const field::FieldIntegrals &fi, std::size_t k, int mu0) {
  AmplitudeWeights W;
  W.lambda = -2 * mu0;
  W.Qmax = 2;
  const int nc = channel_count(m.lmax);
  W.w.assign(static_cast<std::size_t>(nc) * 9, 0.0);
  double g[3][3][3];
  for (int Q = 0; Q <= 2; ++Q)
    for (int nu = -1; nu <= 1; ++nu)
      for (int nup = -1; nup <= 1; ++nup)
        g[Q][nu + 1][nup + 1] = g_coefficient(Q, nu, nup, mu0);
  for (std::size_t b = 0; b < T.branches(); ++b) {
    const cplx z = fi.zeta[b][k];
    if (z == cplx(0.0))
      continue;
    for (int l = 0; l <= m.lmax; ++l)
      for (int mm = -l; mm <= l; ++mm)
        for (int nu = -1; nu <= 1; ++nu)
          for (int nup = -1; nup <= 1; ++nup) {
            const cplx t = T.at(b, k, l, mm, nu, nup);
            const int s = nu + nup;
            for (int Q = std::abs(s); Q <= 2; ++Q) {
              const double gq = g[Q][nu + 1][nup + 1];
              if (gq == 0.0)
                continue;
              W.w[static_cast<std::size_t>(channel(l, mm) * 9 + rank_block(Q, s))] -=
                  z * parity(Q + s + 4) * gq * t;
            }
          }
  }
  return W;
}

BetaTable beta_1ph(const model::MolecularModel &m, const field::FieldIntegrals &fi, int mu0) {
  check_inputs(m, fi, mu0);
  BetaTable t = make_beta_table(Pathway::one_photon, mu0, m.energy_grid);
  const auto w = all_first(m, fi, mu0);
  contract(t, coupling_list(m.lmax, 1, -mu0, 1, -mu0, t.Lmin, t.Lmax), w, w);
  return t;
}

BetaTable beta_2ph(const model::MolecularModel &m, const field::FieldIntegrals &fi, int mu0) {
  check_inputs(m, fi, mu0);
  BetaTable t = make_beta_table(Pathway::two_photon, mu0, m.energy_grid);
  const auto T = model::build_two_photon_tensor(m);
  const auto w = all_second(m, T, fi, mu0);
  contract(t, coupling_list(m.lmax, 2, -2 * mu0, 2, -2 * mu0, t.Lmin, t.Lmax), w, w);
  return t;
}

BetaTable beta_int(const model::MolecularModel &m, const field::FieldIntegrals &fi, int mu0) {
  check_inputs(m, fi, mu0);
  BetaTable t = make_beta_table(Pathway::interference, mu0, m.energy_grid);
  const auto T = model::build_two_photon_tensor(m);
  const auto w1 = all_first(m, fi, mu0);
  const auto w2 = all_second(m, T, fi, mu0);
  contract(t, coupling_list(m.lmax, 1, -mu0, 2, -2 * mu0, t.Lmin, t.Lmax), w1, w2);
  return t;
}

BetaTable beta_1ph(const model::MolecularModel &m, const field::PulseTrain &train, int mu0) {
  return beta_1ph(m, model_field_integrals(m, train), mu0);
}
BetaTable beta_2ph(const model::MolecularModel &m, const field::PulseTrain &train, int mu0) {
  return beta_2ph(m, model_field_integrals(m, train), mu0);
}
BetaTable beta_int(const model::MolecularModel &m, const field::PulseTrain &train, int mu0) {
  return beta_int(m, model_field_integrals(m, train), mu0);
}

BetaSet compute_betas(const model::MolecularModel &m, const field::FieldIntegrals &fi, int mu0) {
  check_inputs(m, fi, mu0);
  BetaSet s;
  s.mu0 = mu0;
  s.one = make_beta_table(Pathway::one_photon, mu0, m.energy_grid);
  s.two = make_beta_table(Pathway::two_photon, mu0, m.energy_grid);
  s.inter = make_beta_table(Pathway::interference, mu0, m.energy_grid);
  const auto T = model::build_two_photon_tensor(m);
  const auto w1 = all_first(m, fi, mu0);
  const auto w2 = all_second(m, T, fi, mu0);
  contract(s.one, coupling_list(m.lmax, 1, -mu0, 1, -mu0, 0, 2), w1, w1);
  contract(s.two, coupling_list(m.lmax, 2, -2 * mu0, 2, -2 * mu0, 0, 4), w2, w2);
  contract(s.inter, coupling_list(m.lmax, 1, -mu0, 2, -2 * mu0, s.inter.Lmin, 3), w1, w2);
  return s;
}

BetaSet compute_betas(const model::MolecularModel &m, const field::PulseTrain &train, int mu0,
                      const field::TimeGridOptions &opt) {
  return compute_betas(m, model_field_integrals(m, train, opt), mu0);
}

BetaSet compute_betas_serial(const model::MolecularModel &m, const field::FieldIntegrals &fi,
                             int mu0) {
  check_inputs(m, fi, mu0);
  BetaSet out;
  out.mu0 = mu0;
  out.one = make_beta_table(Pathway::one_photon, mu0, m.energy_grid);
  out.two = make_beta_table(Pathway::two_photon, mu0, m.energy_grid);
  out.inter = make_beta_table(Pathway::interference, mu0, m.energy_grid);
  const cplx I(0.0, 1.0);
  const double ph0 = parity(mu0 + 2);
  const int la = -mu0, lb = -2 * mu0;
  const std::size_t nb = m.bound_states.size() + 1;
  const auto &M1 = m.continuum_from_homo;

  // second-order molecular tensor element for branch b
  auto T = [&](std::size_t b, std::size_t k, int l, int mm, int nu, int nup) -> cplx {
    if (b == 0)
      return M1.at(k, l, mm, nu) * m.ground_dipole[nup + 1];
    return m.continuum_from_bound[b - 1].at(k, l, mm, nu) *
           m.bound_states[b - 1].dipole_from_homo[nup + 1];
  };

  for (std::size_t k = 0; k < m.energy_grid.size(); ++k) {
    const cplx F = fi.F1[k];
    for (int L = 0; L <= 4; ++L) {
      cplx s1 = 0.0, s2 = 0.0, si = 0.0;
      for (int l = 0; l <= m.lmax; ++l)
        for (int mm = -l; mm <= l; ++mm)
          for (int lp = 0; lp <= m.lmax; ++lp)
            for (int mp = -lp; mp <= lp; ++mp) {
              // one photon x one photon
              for (int nu = -1; nu <= 1; ++nu)
                for (int mu = -1; mu <= 1; ++mu) {
                  const double A = coupling(l, mm, 1, nu, lp, mp, 1, mu, L, la, la);
                  if (A == 0.0)
                    continue;
                  const cplx a = I * F * ph0 * M1.at(k, l, mm, nu);
                  const cplx b = I * F * ph0 * M1.at(k, lp, mp, mu);
                  s1 += A * a * std::conj(b);
                }
              // two photon x two photon
              for (int Q1 = 0; Q1 <= 2; ++Q1)
                for (int Q2 = 0; Q2 <= 2; ++Q2)
                  for (int nu = -1; nu <= 1; ++nu)
                    for (int nup = -1; nup <= 1; ++nup)
                      for (int mu = -1; mu <= 1; ++mu)
                        for (int mup = -1; mup <= 1; ++mup) {
                          const int sa = nu + nup, sb = mu + mup;
                          if (std::abs(sa) > Q1 || std::abs(sb) > Q2)
                            continue;
                          const double ga = g_coefficient(Q1, nu, nup, mu0);
                          const double gb = g_coefficient(Q2, mu, mup, mu0);
                          if (ga == 0.0 || gb == 0.0)
                            continue;
                          const double A = coupling(l, mm, Q1, sa, lp, mp, Q2, sb, L, lb, lb);
                          if (A == 0.0)
                            continue;
                          for (std::size_t r = 0; r < nb; ++r)
                            for (std::size_t rp = 0; rp < nb; ++rp) {
                              const cplx a = -fi.zeta[r][k] * parity(Q1 + sa + 4) * ga *
                                             T(r, k, l, mm, nu, nup);
                              const cplx b = -fi.zeta[rp][k] * parity(Q2 + sb + 4) * gb *
                                             T(rp, k, lp, mp, mu, mup);
                              s2 += A * a * std::conj(b);
                            }
                        }
              // one photon x two photon
              for (int nu = -1; nu <= 1; ++nu)
                for (int Q2 = 0; Q2 <= 2; ++Q2)
                  for (int mu = -1; mu <= 1; ++mu)
                    for (int mup = -1; mup <= 1; ++mup) {
                      const int sb = mu + mup;
                      if (std::abs(sb) > Q2)
                        continue;
                      const double gb = g_coefficient(Q2, mu, mup, mu0);
                      if (gb == 0.0)
                        continue;
                      const double A = coupling(l, mm, 1, nu, lp, mp, Q2, sb, L, la, lb);
                      if (A == 0.0)
                        continue;
                      const cplx a = I * F * ph0 * M1.at(k, l, mm, nu);
                      for (std::size_t rp = 0; rp < nb; ++rp) {
                        const cplx b = -fi.zeta[rp][k] * parity(Q2 + sb + 4) * gb *
                                       T(rp, k, lp, mp, mu, mup);
                        si += A * a * std::conj(b);
                      }
                    }
            }
      if (out.one.has(L))
        out.one.ref(L, k) = kOrientationMeasure * s1;
      if (out.two.has(L))
        out.two.ref(L, k) = kOrientationMeasure * s2;
      if (out.inter.has(L))
        out.inter.ref(L, k) = kOrientationMeasure * si;
    }
  }
  return out;
}

} // namespace pecd::anisotropy
