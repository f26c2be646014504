#include "pecd/verify.hpp"
#include "pecd/angular.hpp"
#include "pecd/anisotropy.hpp"
#include "pecd/error.hpp"
#include "pecd/io.hpp"
#include "pecd/observables.hpp"
#include "pecd/units.hpp"
#include <algorithm>
#include <chrono>
#include <cmath>
#include <json.hpp>

namespace pecd::verify {

using anisotropy::BetaSet;
using anisotropy::BetaTable;
using cplx = std::complex<double>;

bool Report::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check &c) { return c.pass; });
}

namespace {

constexpr double pi = units::pi;

class Timer {
public:
  Timer() : t0_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

private:
  std::chrono::steady_clock::time_point t0_;
};

void add(Report &r, std::string name, double value, double tol) {
  r.checks.push_back({std::move(name), value, tol, std::isfinite(value) && value <= tol});
}

double table_max(const BetaTable &t) {
  double m = 0.0;
  for (auto v : t.values)
    m = std::max(m, std::abs(v));
  return m;
}

//! max |a - b| relative to the largest |b|; 0 when both vanish
double table_diff(const BetaTable &a, const BetaTable &b) {
  if (a.Lmin != b.Lmin || a.Lmax != b.Lmax || a.values.size() != b.values.size())
    return std::numeric_limits<double>::infinity();
  double d = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i)
    d = std::max(d, std::abs(a.values[i] - b.values[i]));
  const double s = table_max(b);
  return s > 0.0 ? d / s : d;
}

std::string mu_tag(int mu0) { return mu0 > 0 ? "+1" : (mu0 < 0 ? "-1" : "0"); }

field::PulseTrain scaled(field::PulseTrain t, double f, double cep_shift = 0.0) {
  for (auto &p : t.pulses) {
    p.amplitude *= f;
    p.cep += cep_shift;
  }
  return t;
}

} // namespace

Report angular_suite(int jmax, int lmax) {
  Timer clock;
  Report r{"angular", {}, 0.0};

  // sum_{m1 m2} 3j(j1 j2 j3; m1 m2 m3) 3j(j1 j2 j3'; m1 m2 m3) = delta / (2 j3 + 1)
  const int J = 2 * jmax;
  double worst = 0.0;
  for (int J1 = 0; J1 <= J; ++J1)
    for (int J2 = 0; J2 <= J; ++J2) {
      const int lo = std::abs(J1 - J2), hi = J1 + J2;
      const int n = (hi - lo) / 2 + 1;
      for (int M3 = -hi; M3 <= hi; M3 += 2) {
        std::vector<double> S(static_cast<std::size_t>(n * n), 0.0), v(static_cast<std::size_t>(n));
        for (int M1 = -J1; M1 <= J1; M1 += 2) {
          const int M2 = -M1 - M3;
          if (std::abs(M2) > J2)
            continue;
          for (int i = 0; i < n; ++i)
            v[static_cast<std::size_t>(i)] = angular::wigner3j({J1, J2, lo + 2 * i, M1, M2, M3});
          for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
              S[static_cast<std::size_t>(i * n + j)] += v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(j)];
        }
        for (int i = 0; i < n; ++i) {
          const int J3 = lo + 2 * i;
          if (std::abs(M3) > J3)
            continue;
          for (int j = 0; j < n; ++j) {
            if (std::abs(M3) > lo + 2 * j)
              continue;
            const double expect = i == j ? 1.0 / (J3 + 1) : 0.0;
            worst = std::max(worst, std::abs(S[static_cast<std::size_t>(i * n + j)] - expect));
          }
        }
      }
    }
  add(r, "3j orthogonality j<=" + std::to_string(jmax), worst, 1e-12);

  // triple integral vs 16^3 Euler quadrature (exact for these ranks)
  const int nq = 16;
  std::vector<double> x, w;
  angular::gauss_legendre(nq, x, w);
  const std::size_t npts = static_cast<std::size_t>(nq * nq * nq);
  auto slot = [lmax](int l, int m, int mp) {
    std::size_t s = 0;
    for (int q = 0; q < l; ++q)
      s += static_cast<std::size_t>((2 * q + 1) * (2 * q + 1));
    return s + static_cast<std::size_t>((m + l) * (2 * l + 1) + mp + l);
  };
  std::vector<cplx> D(slot(lmax + 1, -(lmax + 1), -(lmax + 1)) * npts);
  std::vector<double> weight(npts);
  for (int l = 0; l <= lmax; ++l)
    for (int m = -l; m <= l; ++m)
      for (int mp = -l; mp <= l; ++mp) {
        cplx *row = D.data() + slot(l, m, mp) * npts;
        std::size_t p = 0;
        for (int ia = 0; ia < nq; ++ia)
          for (int ib = 0; ib < nq; ++ib)
            for (int ig = 0; ig < nq; ++ig, ++p) {
              const double al = 2 * pi * ia / nq, ga = 2 * pi * ig / nq, be = std::acos(x[static_cast<std::size_t>(ib)]);
              row[p] = angular::wigner_D(l, m, mp, al, be, ga);
              weight[p] = (2 * pi / nq) * (2 * pi / nq) * w[static_cast<std::size_t>(ib)] / (8 * pi * pi);
            }
      }
  double tworst = 0.0;
  for (int l1 = 0; l1 <= lmax; ++l1)
    for (int l2 = 0; l2 <= lmax; ++l2)
      for (int l3 = 0; l3 <= lmax; ++l3)
        for (int m1 = -l1; m1 <= l1; ++m1)
          for (int m2 = -l2; m2 <= l2; ++m2)
            for (int m1p = -l1; m1p <= l1; ++m1p)
              for (int m2p = -l2; m2p <= l2; ++m2p) {
                const int m3p = -m1p - m2p;
                const int m3 = -m1 - m2;
                if (std::abs(m3p) > l3 || std::abs(m3) > l3)
                  continue;
                const double a = angular::euler_triple_integral({{{l1, m1, m1p}, {l2, m2, m2p}, {l3, m3, m3p}}});
                const cplx *d1 = D.data() + slot(l1, m1, m1p) * npts;
                const cplx *d2 = D.data() + slot(l2, m2, m2p) * npts;
                const cplx *d3 = D.data() + slot(l3, m3, m3p) * npts;
                cplx q = 0.0;
                for (std::size_t p = 0; p < npts; ++p)
                  q += weight[p] * d1[p] * d2[p] * d3[p];
                tworst = std::max(tworst, std::abs(a - q));
              }
  add(r, "Euler triple integral vs quadrature l<=" + std::to_string(lmax), tworst, 1e-10);
  r.seconds = clock.seconds();
  return r;
}

Report betas_suite(const model::MolecularModel &m, const field::PulseTrain &train, int euler_nodes) {
  Timer clock;
  Report r{"betas", {}, 0.0};
  const auto fi = anisotropy::model_field_integrals(m, train);
  const auto g = oracle::EulerGrid::make(euler_nodes, euler_nodes, euler_nodes);
  for (int mu0 : {1, -1, 0}) {
    const auto a = anisotropy::compute_betas(m, fi, mu0);
    const auto q = oracle::quadrature_betas(m, fi, mu0, g);
    const auto s = anisotropy::compute_betas_serial(m, fi, mu0);
    const std::string tag = " mu0=" + mu_tag(mu0);
    add(r, "beta1ph vs quadrature" + tag, table_diff(a.one, q.one), 1e-6);
    add(r, "beta2ph vs quadrature" + tag, table_diff(a.two, q.two), 1e-6);
    add(r, "beta_int vs quadrature" + tag, table_diff(a.inter, q.inter), 1e-6);
    const double ds = std::max({table_diff(a.one, s.one), table_diff(a.two, s.two), table_diff(a.inter, s.inter)});
    add(r, "threaded vs serial" + tag, ds, 1e-12);
  }
  r.seconds = clock.seconds();
  return r;
}

Report symmetry_suite(const model::MolecularModel &m, const field::PulseTrain &train) {
  Timer clock;
  Report r{"symmetry", {}, 0.0};
  const auto fi = anisotropy::model_field_integrals(m, train);
  const auto p = anisotropy::compute_betas(m, fi, 1);
  const auto n = anisotropy::compute_betas(m, fi, -1);
  const std::size_t ne = m.energy_grid.size();

  auto parity = [&](const BetaTable &plus) {
    BetaTable e = plus;
    for (int L = plus.Lmin; L <= plus.Lmax; ++L)
      for (std::size_t k = 0; k < ne; ++k)
        e.ref(L, k) = (L % 2 ? -1.0 : 1.0) * plus.at(L, k);
    return e;
  };
  add(r, "beta1ph reversal (-1)^L", table_diff(n.one, parity(p.one)), 1e-10);
  add(r, "beta2ph reversal (-1)^L", table_diff(n.two, parity(p.two)), 1e-10);

  BetaTable e = p.inter;
  e.M = -1;
  for (int L = p.inter.Lmin; L <= p.inter.Lmax; ++L)
    for (std::size_t k = 0; k < ne; ++k)
      e.ref(L, k) = ((L + 1) % 2 ? -1.0 : 1.0) * angular::factorial(L + 1) / angular::factorial(L - 1) *
                    p.inter.at(L, k);
  add(r, "beta_int reversal (-1)^(1+L) (L+1)!/(L-1)!", table_diff(n.inter, e), 1e-10);

  // structural ranges: value 0 when every rule holds; linear polarization
  // carries the nonstandard interference table starting at L = 0
  double bad = 0.0;
  for (int mu0 : {1, 0, -1}) {
    const auto &b = mu0 == 1 ? p : (mu0 == -1 ? n : anisotropy::compute_betas(m, fi, 0));
    bad += (b.one.M != 0) + (b.two.M != 0) + (b.inter.M != mu0);
    bad += (b.one.Lmin != 0) + (b.one.Lmax != 2) + (b.two.Lmin != 0) + (b.two.Lmax != 4);
    bad += (b.inter.Lmin != (mu0 == 0 ? 0 : 1)) + (b.inter.Lmax != 3) + (b.inter.nonstandard != (mu0 == 0));
    for (std::size_t k = 0; k < ne; ++k) {
      bad += b.one.at(3, 0, k) != cplx(0.0);
      bad += b.one.at(1, 1, k) != cplx(0.0);
      bad += b.two.at(5, 0, k) != cplx(0.0);
      bad += b.inter.at(4, mu0, k) != cplx(0.0);
      if (mu0 != 0)
        bad += (b.inter.at(0, mu0, k) != cplx(0.0)) + (b.inter.at(2, 0, k) != cplx(0.0));
    }
  }
  add(r, "structural L/M violations", bad, 0.0);
  r.seconds = clock.seconds();
  return r;
}

Report scaling_suite(const model::MolecularModel &m, const field::PulseTrain &train) {
  Timer clock;
  Report r{"scaling", {}, 0.0};
  for (int mu0 : {1, 0}) {
    const auto a = anisotropy::compute_betas(m, train, mu0);
    const auto b = anisotropy::compute_betas(m, scaled(train, 2.0), mu0);
    auto times = [](BetaTable t, double f) {
      for (auto &v : t.values)
        v *= f;
      return t;
    };
    const std::string tag = " mu0=" + mu_tag(mu0);
    add(r, "beta1ph ~ eps^2" + tag, table_diff(b.one, times(a.one, 4.0)), 1e-12);
    add(r, "beta2ph ~ eps^4" + tag, table_diff(b.two, times(a.two, 16.0)), 1e-12);
    add(r, "beta_int ~ eps^3" + tag, table_diff(b.inter, times(a.inter, 8.0)), 1e-12);
  }
  r.seconds = clock.seconds();
  return r;
}

Report chirality_suite(const model::MolecularModel &m, const field::PulseTrain &train) {
  Timer clock;
  Report r{"chirality", {}, 0.0};
  const auto a = model::mirror_achiralize(m);
  const auto fi = anisotropy::model_field_integrals(a, train);
  const auto p = anisotropy::compute_betas(a, fi, 1);
  const auto n = anisotropy::compute_betas(a, fi, -1);
  const auto theta = observables::theta_grid();
  double diff = 0.0, peak_p = 0.0, peak_n = 0.0;
  for (std::size_t k = 0; k < a.energy_grid.size(); ++k)
    for (double t : theta) {
      const double ip = observables::momentum_distribution(p, k, t, pi / 2);
      const double in = observables::momentum_distribution(n, k, t, pi / 2);
      diff = std::max(diff, std::abs(ip - in));
      peak_p = std::max(peak_p, ip);
      peak_n = std::max(peak_n, in);
    }
  add(r, "achiral |I(+)-I(-)| / peak I(+)", peak_p > 0 ? diff / peak_p : diff, 1e-10);
  add(r, "achiral |I(-)-I(+)| / peak I(-)", peak_n > 0 ? diff / peak_n : diff, 1e-10);
  observables::MapOptions mo;
  mo.threshold = 0.0;
  const auto map = observables::pecd_map(p, mo);
  double worst = 0.0;
  for (double v : map.values)
    worst = std::max(worst, std::abs(v));
  add(r, "achiral |PECD| / 100%", worst / 100.0, 1e-10);
  r.seconds = clock.seconds();
  return r;
}

Report observables_suite(const model::MolecularModel &m, const field::PulseTrain &train) {
  Timer clock;
  Report r{"observables", {}, 0.0};
  const auto fi = anisotropy::model_field_integrals(m, train);
  const auto p = anisotropy::compute_betas(m, fi, 1);
  const auto n = anisotropy::compute_betas(m, fi, -1);
  const auto map = observables::pecd_map(p);
  double worst = 0.0;
  for (std::size_t k = 0; k < map.energies.size(); ++k)
    for (std::size_t it = 0; it < map.theta.size(); ++it) {
      if (map.norm <= 0.0)
        break;
      const double t = map.theta[it];
      const double d = 100.0 *
                       (observables::momentum_distribution(p, k, t, pi / 2) -
                        observables::momentum_distribution(n, k, t, pi / 2)) /
                       map.norm;
      worst = std::max(worst, std::abs(d - map.at(k, it)));
    }
  add(r, "PECD map vs explicit subtraction (percent)", worst, 1e-10);
  const auto rf = observables::hemisphere_average(map, true);
  const auto rb = observables::hemisphere_average(map, false);
  double anti = 0.0;
  for (std::size_t k = 0; k < rf.size(); ++k)
    anti = std::max(anti, std::abs(rf[k] + rb[k]));
  add(r, "rho_b + rho_f", anti, 1e-12);
  double zeros = 0.0;
  for (std::size_t k = 0; k < map.energies.size(); ++k)
    for (double t : {0.0, pi / 2, pi})
      zeros = std::max(zeros, std::abs(observables::interference_part(map, k, t)));
  add(r, "interference at theta = 0, pi/2, pi", zeros, 0.0);
  r.seconds = clock.seconds();
  return r;
}

Report propagation_suite(const model::MolecularModel &m, const field::PulseTrain &train,
                         const PropagationSetup &s) {
  Timer clock;
  Report r{"propagation", {}, 0.0};
  const double I0 = field::peak_intensity(train);
  if (!(I0 > 0.0))
    throw ConfigError("propagation suite needs a nonzero field");
  auto at = [&](double I, double shift = 0.0) { return scaled(train, std::sqrt(I / I0), shift); };
  const int mu0 = train.mu0;

  {
    const auto tr = at(s.first_order_intensity);
    const auto plus = oracle::propagate_weak_field(m, tr, mu0, s.orientation, s.options);
    const auto minus = oracle::propagate_weak_field(m, at(s.first_order_intensity, pi), mu0, s.orientation, s.options);
    const auto a = oracle::molecular_frame_amplitudes(m, tr, mu0, s.orientation);
    double worst = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < a.first.size(); ++i) {
      const cplx odd = 0.5 * (plus.continuum[i] - minus.continuum[i]);
      worst = std::max(worst, std::abs(odd - a.first[i]));
      scale = std::max(scale, std::abs(a.first[i]));
    }
    add(r, "first order at " + io::fmt(s.first_order_intensity) + " W/cm2 (relative)",
        scale > 0 ? worst / scale : worst, 1e-4);
  }

  // least-squares slope of log residual vs log amplitude
  std::vector<double> lx, ly;
  for (double I : s.intensities) {
    const auto tr = at(I);
    const auto p = oracle::propagate_weak_field(m, tr, mu0, s.orientation, s.options);
    const auto a = oracle::molecular_frame_amplitudes(m, tr, mu0, s.orientation);
    double res = 0.0;
    for (std::size_t i = 0; i < a.first.size(); ++i)
      res = std::max(res, std::abs(p.continuum[i] - a.first[i] - a.second[i]));
    lx.push_back(0.5 * std::log(I));
    ly.push_back(std::log(res));
  }
  const double n = static_cast<double>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  add(r, "|residual slope - 3| (slope " + io::fmt(slope) + ")", std::abs(slope - 3.0), 0.2);
  r.seconds = clock.seconds();
  return r;
}

std::vector<std::string> suite_names() {
  return {"angular", "betas", "symmetry", "scaling", "chirality", "observables", "propagation"};
}

std::vector<Report> run(const std::string &name, const model::MolecularModel &m,
                        const field::PulseTrain &train) {
  std::vector<Report> out;
  const bool all = name == "all";
  if (all || name == "angular")
    out.push_back(angular_suite());
  if (all || name == "betas")
    out.push_back(betas_suite(m, train));
  if (all || name == "symmetry")
    out.push_back(symmetry_suite(m, train));
  if (all || name == "scaling")
    out.push_back(scaling_suite(m, train));
  if (all || name == "chirality")
    out.push_back(chirality_suite(m, train));
  if (all || name == "observables")
    out.push_back(observables_suite(m, train));
  if (all || name == "propagation")
    out.push_back(propagation_suite(m, train));
  if (out.empty())
    throw ConfigError("unknown verify suite '" + name + "'");
  return out;
}

std::string report_text(const std::vector<Report> &reports) {
  std::string s;
  for (const auto &r : reports) {
    for (const auto &c : r.checks) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.3e <= %.1e", c.value, c.tol);
      s += std::string(c.pass ? "PASS " : "FAIL ") + r.suite + ": " + c.name + "  " + buf + "\n";
    }
  }
  return s;
}

std::string report_json(const std::vector<Report> &reports) {
  nlohmann::json root = nlohmann::json::array();
  for (const auto &r : reports) {
    nlohmann::json checks = nlohmann::json::array();
    for (const auto &c : r.checks)
      checks.push_back({{"name", c.name}, {"value", std::stod(io::fmt(c.value))}, {"tol", c.tol}, {"pass", c.pass}});
    root.push_back({{"suite", r.suite}, {"pass", r.pass()}, {"checks", checks}});
  }
  return root.dump(1) + "\n";
}

} // namespace pecd::verify
