#include "pecd/field.hpp"
#include "pecd/angular.hpp"
#include "pecd/error.hpp"
#include "pecd/units.hpp"
#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <limits>

namespace pecd::field {

namespace {

constexpr double pi = units::pi;

bool is_zero(const PulseTrain &train) {
  for (const auto &p : train.pulses)
    if (p.amplitude != 0.0)
      return false;
  return true;
}

double max_carrier(const PulseTrain &train) {
  double w = 0.0;
  for (const auto &p : train.pulses)
    w = std::max(w, std::abs(p.carrier));
  return w;
}

double min_sigma(const PulseTrain &train) {
  double s = std::numeric_limits<double>::infinity();
  for (const auto &p : train.pulses)
    s = std::min(s, p.sigma());
  return s;
}

double legendre(int n, double x) {
  if (n == 0)
    return 1.0;
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

} // namespace

double PulseParams::sigma() const { return fwhm / (2.0 * std::sqrt(2.0 * std::log(2.0))); }

void PulseTrain::validate() const {
  if (mu0 < -1 || mu0 > 1)
    throw ConfigError("polarization mu0 must be -1, 0 or +1");
  for (std::size_t j = 0; j < pulses.size(); ++j) {
    const auto &p = pulses[j];
    if (!(p.amplitude >= 0.0))
      throw ConfigError("pulse " + std::to_string(j) + ": amplitude < 0");
    if (!(p.fwhm > 0.0))
      throw ConfigError("pulse " + std::to_string(j) + ": fwhm <= 0");
    if (!std::isfinite(p.carrier) || !std::isfinite(p.cep) || !std::isfinite(p.delay))
      throw ConfigError("pulse " + std::to_string(j) + ": non-finite parameter");
  }
}

double evaluate_field(const PulseTrain &train, double t) {
  double e = 0.0;
  for (const auto &p : train.pulses) {
    const double s = t - p.delay, sg = p.sigma();
    e += p.amplitude * std::exp(-s * s / (2 * sg * sg)) * std::cos(p.carrier * s + p.cep);
  }
  return e;
}

cplx analytic_signal(const PulseTrain &train, double t) {
  cplx e = 0.0;
  for (const auto &p : train.pulses) {
    const double s = t - p.delay, sg = p.sigma();
    e += std::polar(p.amplitude * std::exp(-s * s / (2 * sg * sg)), p.carrier * s + p.cep);
  }
  return e;
}

cplx spectrum(const PulseTrain &train, double w) {
  cplx out = 0.0;
  for (const auto &p : train.pulses) {
    const double sg = p.sigma();
    const double a = p.amplitude * sg * std::sqrt(2 * pi) / 2;
    const double up = (w + p.carrier) * sg, dn = (w - p.carrier) * sg;
    out += std::polar(a, w * p.delay) *
           (std::polar(std::exp(-up * up / 2), p.cep) + std::polar(std::exp(-dn * dn / 2), -p.cep));
  }
  return out;
}

std::vector<double> sample_times(const PulseTrain &train, double span_sigmas) {
  if (train.pulses.empty())
    return {};
  double t0 = std::numeric_limits<double>::infinity(), t1 = -t0;
  for (const auto &p : train.pulses) {
    t0 = std::min(t0, p.delay - span_sigmas * p.sigma());
    t1 = std::max(t1, p.delay + span_sigmas * p.sigma());
  }
  const double wmax = max_carrier(train);
  double step = min_sigma(train) / 10;
  if (wmax > 0)
    step = std::min(step, 2 * pi / wmax / 40);
  const auto n = static_cast<std::size_t>(std::ceil((t1 - t0) / step)) + 1;
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i)
    t[i] = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(n - 1);
  return t;
}

double peak_intensity(const PulseTrain &train) {
  const auto ts = sample_times(train);
  if (ts.size() < 3)
    return 0.0;
  std::size_t best = 1;
  for (std::size_t i = 1; i + 1 < ts.size(); ++i)
    if (std::abs(evaluate_field(train, ts[i])) > std::abs(evaluate_field(train, ts[best])))
      best = i;
  auto neg = [&](double t) { return -std::abs(evaluate_field(train, t)); };
  const auto r = boost::math::tools::brent_find_minima(neg, ts[best - 1], ts[best + 1], 52);
  return units::intensity_from_field(-r.second);
}

TimeQuadrature::TimeQuadrature(double t0, double t1, double omega_max,
                               const TimeGridOptions &opt)
    : t0_(t0), p_(opt.nodes_per_panel) {
  if (!(t1 > t0) || !(omega_max > 0))
    throw DomainError("TimeQuadrature: empty window or non-positive frequency bound");
  const double hmax = 2 * pi / omega_max / opt.panels_per_period;
  n_panels_ = std::max(1, static_cast<int>(std::ceil((t1 - t0) / hmax)));
  h_ = (t1 - t0) / n_panels_;
  angular::gauss_legendre(p_, x_, wx_);
  const auto p = static_cast<std::size_t>(p_);
  S_.assign(p * p, 0.0);
  for (std::size_t j = 0; j < p; ++j)
    for (int n = 0; n < p_; ++n) {
      const double c = wx_[j] * legendre(n, x_[j]) * (2 * n + 1) / 2.0;
      for (std::size_t k = 0; k < p; ++k) {
        const double xk = x_[k];
        const double in = (n == 0) ? xk + 1.0
                                   : (legendre(n + 1, xk) - legendre(n - 1, xk)) / (2 * n + 1);
        S_[k * p + j] += c * in;
      }
    }
  t_.resize(p * static_cast<std::size_t>(n_panels_));
  w_.resize(t_.size());
  for (int q = 0; q < n_panels_; ++q)
    for (std::size_t k = 0; k < p; ++k) {
      const std::size_t i = static_cast<std::size_t>(q) * p + k;
      t_[i] = t0_ + h_ * (q + 0.5 * (x_[k] + 1.0));
      w_[i] = 0.5 * h_ * wx_[k];
    }
}

cplx TimeQuadrature::integrate(const std::vector<cplx> &f) const {
  cplx s = 0.0;
  for (std::size_t i = 0; i < t_.size(); ++i)
    s += w_[i] * f[i];
  return s;
}

std::vector<cplx> TimeQuadrature::cumulative(const std::vector<cplx> &g) const {
  const auto p = static_cast<std::size_t>(p_);
  std::vector<cplx> out(g.size());
  cplx start = 0.0;
  for (int q = 0; q < n_panels_; ++q) {
    const std::size_t base = static_cast<std::size_t>(q) * p;
    cplx panel = 0.0;
    for (std::size_t k = 0; k < p; ++k) {
      cplx s = 0.0;
      for (std::size_t j = 0; j < p; ++j)
        s += S_[k * p + j] * g[base + j];
      out[base + k] = start + 0.5 * h_ * s;
      panel += wx_[k] * g[base + k];
    }
    start += 0.5 * h_ * panel;
  }
  return out;
}

std::vector<cplx> TimeQuadrature::phases(double d) const {
  const auto p = static_cast<std::size_t>(p_);
  std::vector<cplx> out(t_.size());
  const cplx step = std::polar(1.0, d * h_);
  for (std::size_t k = 0; k < p; ++k) {
    cplx ph = std::polar(1.0, d * t_[k]);
    for (int q = 0; q < n_panels_; ++q) {
      out[static_cast<std::size_t>(q) * p + k] = ph;
      ph *= step;
    }
  }
  return out;
}

std::pair<double, double> integration_window(const PulseTrain &train, const TimeGridOptions &opt) {
  if (std::exp(-opt.span_sigmas * opt.span_sigmas / 2) > opt.decay_tol)
    throw ConvergenceError("field envelope not decayed within the integration window (span " +
                           std::to_string(opt.span_sigmas) + " sigma)");
  double t0 = std::numeric_limits<double>::infinity(), t1 = -t0;
  for (const auto &p : train.pulses) {
    t0 = std::min(t0, p.delay - opt.span_sigmas * p.sigma());
    t1 = std::max(t1, p.delay + opt.span_sigmas * p.sigma());
  }
  return {t0, t1};
}

cplx one_photon_integral(const PulseTrain &train, double delta, const TimeGridOptions &opt) {
  if (is_zero(train))
    return 0.0;
  const auto [t0, t1] = integration_window(train, opt);
  const double om = std::abs(delta) + max_carrier(train) + 8.0 / min_sigma(train);
  const TimeQuadrature q(t0, t1, om, opt);
  std::vector<cplx> f(q.nodes().size());
  const auto ph = q.phases(delta);
  for (std::size_t i = 0; i < f.size(); ++i)
    f[i] = ph[i] * evaluate_field(train, q.nodes()[i]);
  return q.integrate(f);
}

cplx two_photon_integral(const PulseTrain &train, double d_final, double d_inter,
                         const TimeGridOptions &opt) {
  if (!std::isfinite(d_final) || !std::isfinite(d_inter))
    throw DomainError("two_photon_integral: non-finite detuning");
  if (is_zero(train))
    return 0.0;
  const auto [t0, t1] = integration_window(train, opt);
  const double om =
      std::abs(d_final) + std::abs(d_inter) + 2 * max_carrier(train) + 8.0 / min_sigma(train);
  const TimeQuadrature q(t0, t1, om, opt);
  const std::size_t n = q.nodes().size();
  std::vector<cplx> g(n), f(n);
  const auto pi_ = q.phases(d_inter);
  const auto pf = q.phases(d_final);
  std::vector<double> e(n);
  for (std::size_t i = 0; i < n; ++i) {
    e[i] = evaluate_field(train, q.nodes()[i]);
    g[i] = pi_[i] * e[i];
  }
  const auto I = q.cumulative(g);
  for (std::size_t i = 0; i < n; ++i)
    f[i] = pf[i] * e[i] * I[i];
  return q.integrate(f);
}

namespace {

struct Prepared {
  std::vector<double> e;                // field at nodes
  std::vector<std::vector<cplx>> G;    // per branch: w_n e^{-i w_b t} E I_b
};

FieldIntegrals empty_integrals(double ip, const std::vector<double> &transitions,
                               const std::vector<double> &energies) {
  FieldIntegrals fi;
  fi.energies = energies;
  fi.ip = ip;
  fi.transitions = transitions;
  fi.F1.assign(energies.size(), 0.0);
  fi.zeta.assign(transitions.size() + 1, std::vector<cplx>(energies.size(), 0.0));
  return fi;
}

TimeQuadrature make_quadrature(const PulseTrain &train, double ip,
                               const std::vector<double> &transitions,
                               const std::vector<double> &energies, const TimeGridOptions &opt) {
  const auto [t0, t1] = integration_window(train, opt);
  double dmax = 0.0, wr = 0.0;
  for (double e : energies)
    dmax = std::max(dmax, std::abs(e + ip));
  for (double w : transitions)
    wr = std::max(wr, std::abs(w));
  const double om = dmax + 2 * wr + 2 * max_carrier(train) + 8.0 / min_sigma(train);
  return TimeQuadrature(t0, t1, om, opt);
}

Prepared prepare(const PulseTrain &train, const TimeQuadrature &q,
                 const std::vector<double> &transitions) {
  Prepared pr;
  const std::size_t n = q.nodes().size();
  pr.e.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    pr.e[i] = evaluate_field(train, q.nodes()[i]);
  for (std::size_t b = 0; b <= transitions.size(); ++b) {
    const double wb = (b == 0) ? 0.0 : transitions[b - 1];
    std::vector<cplx> g(n);
    const auto ph = q.phases(wb);
    for (std::size_t i = 0; i < n; ++i)
      g[i] = ph[i] * pr.e[i];
    const auto I = q.cumulative(g);
    std::vector<cplx> G(n);
    for (std::size_t i = 0; i < n; ++i)
      G[i] = q.weights()[i] * std::conj(ph[i]) * pr.e[i] * I[i];
    pr.G.push_back(std::move(G));
  }
  return pr;
}

} // namespace

FieldIntegrals field_integrals(const PulseTrain &train, double ip,
                               const std::vector<double> &transitions,
                               const std::vector<double> &energies, const TimeGridOptions &opt) {
  FieldIntegrals fi = empty_integrals(ip, transitions, energies);
  if (is_zero(train) || energies.empty())
    return fi;
  const TimeQuadrature q = make_quadrature(train, ip, transitions, energies, opt);
  const Prepared pr = prepare(train, q, transitions);
  const std::size_t n = q.nodes().size();
  const std::size_t nb = pr.G.size();
  const auto &w = q.weights();
#pragma omp parallel for schedule(dynamic)
  for (std::size_t k = 0; k < energies.size(); ++k) {
    const auto ph = q.phases(energies[k] + ip);
    cplx f1 = 0.0;
    std::vector<cplx> z(nb, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      f1 += w[i] * pr.e[i] * ph[i];
      for (std::size_t b = 0; b < nb; ++b)
        z[b] += pr.G[b][i] * ph[i];
    }
    fi.F1[k] = f1;
    for (std::size_t b = 0; b < nb; ++b)
      fi.zeta[b][k] = z[b];
  }
  return fi;
}

FieldIntegrals field_integrals_serial(const PulseTrain &train, double ip,
                                      const std::vector<double> &transitions,
                                      const std::vector<double> &energies,
                                      const TimeGridOptions &opt) {
  FieldIntegrals fi = empty_integrals(ip, transitions, energies);
  if (is_zero(train) || energies.empty())
    return fi;
  const TimeQuadrature q = make_quadrature(train, ip, transitions, energies, opt);
  const std::size_t n = q.nodes().size();
  std::vector<double> e(n);
  for (std::size_t i = 0; i < n; ++i)
    e[i] = evaluate_field(train, q.nodes()[i]);
  for (std::size_t b = 0; b <= transitions.size(); ++b) {
    const double wb = (b == 0) ? 0.0 : transitions[b - 1];
    std::vector<cplx> g(n);
    for (std::size_t i = 0; i < n; ++i)
      g[i] = std::polar(e[i], wb * q.nodes()[i]);
    const auto I = q.cumulative(g);
    for (std::size_t k = 0; k < energies.size(); ++k) {
      const double df = energies[k] + ip - wb;
      cplx s = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        s += q.weights()[i] * std::polar(e[i], df * q.nodes()[i]) * I[i];
      fi.zeta[b][k] = s;
    }
  }
  for (std::size_t k = 0; k < energies.size(); ++k) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      s += q.weights()[i] * std::polar(e[i], (energies[k] + ip) * q.nodes()[i]);
    fi.F1[k] = s;
  }
  return fi;
}

PulseTrain apply_spectral_delay(const PulseTrain &train, double cutoff, double tau,
                                double overlap_tol) {
  int hi = 0, lo = 0;
  for (std::size_t j = 0; j < train.pulses.size(); ++j) {
    const auto &p = train.pulses[j];
    (p.carrier > cutoff ? hi : lo)++;
    const double tail = 0.5 * std::erfc(std::abs(cutoff - p.carrier) * p.sigma());
    if (tail > overlap_tol)
      throw ConfigError("cutoff lies inside the spectral support of pulse " + std::to_string(j) +
                        " (lobe weight beyond cutoff " + std::to_string(tail) + ")");
  }
  if (hi == 0 || lo == 0)
    throw ConfigError("cutoff does not split the train into two nonempty groups");
  PulseTrain out = train;
  for (auto &p : out.pulses)
    if (p.carrier > cutoff)
      p.delay -= tau;
  return out;
}

WignerMap wigner_time_frequency(const PulseTrain &train, const std::vector<double> &t,
                                const std::vector<double> &w) {
  WignerMap m;
  m.t = t;
  m.w = w;
  m.values.assign(t.size() * w.size(), 0.0);
  if (train.pulses.empty() || t.empty() || w.empty())
    return m;
  const auto st = sample_times(train);
  const double span = st.back() - st.front();
  double wabs = 0.0;
  for (double x : w)
    wabs = std::max(wabs, std::abs(x));
  const double h = std::min(min_sigma(train) / 4, pi / (2 * (max_carrier(train) + wabs) + 1e-300));
  const auto ns = static_cast<std::size_t>(std::ceil(2 * span / h)) + 1;
#pragma omp parallel for schedule(dynamic)
  for (std::size_t it = 0; it < t.size(); ++it) {
    std::vector<cplx> K(ns);
    for (std::size_t s = 0; s < ns; ++s) {
      const double sv = h * static_cast<double>(s);
      K[s] = analytic_signal(train, t[it] + sv / 2) * std::conj(analytic_signal(train, t[it] - sv / 2));
    }
    for (std::size_t iw = 0; iw < w.size(); ++iw) {
      cplx acc = 0.5 * K[0];
      const cplx step = std::polar(1.0, -w[iw] * h);
      cplx ph = step;
      for (std::size_t s = 1; s < ns; ++s) {
        acc += K[s] * ph;
        ph *= step;
      }
      m.values[it * w.size() + iw] = 2.0 * h * acc.real();
    }
  }
  return m;
}

} // namespace pecd::field
