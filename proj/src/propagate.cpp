#include "pecd/error.hpp"
#include "pecd/oracle.hpp"
#include <boost/numeric/odeint.hpp>
#include <cmath>

namespace pecd::oracle {

namespace {

//! Interaction-picture couplings of the discretized manifold.
struct Manifold {
  std::size_t na = 0, nc = 0, nk = 0;
  cplx v00;
  std::vector<cplx> va0;   // [a]
  std::vector<cplx> vk0;   // [k*nc + c]
  std::vector<cplx> vka;   // [(a*nk + k)*nc + c]
  std::vector<double> ea;  // bound energies above the HOMO
  std::vector<double> ek;  // continuum energies above the HOMO
};

std::vector<double> trapezoid_weights(const std::vector<double> &g) {
  std::vector<double> w(g.size(), 0.0);
  if (g.size() == 1) {
    w[0] = 1.0;
    return w;
  }
  for (std::size_t i = 0; i + 1 < g.size(); ++i) {
    const double h = 0.5 * (g[i + 1] - g[i]);
    w[i] += h;
    w[i + 1] += h;
  }
  return w;
}

Manifold build(const model::MolecularModel &m, int mu0, const Orientation &o) {
  Manifold s;
  const auto c = lab_coupling(mu0, o);
  auto project = [&](const model::Vec3c &d) {
    return c[0] * d[0] + c[1] * d[1] + c[2] * d[2];
  };
  s.na = m.bound_states.size();
  s.nc = static_cast<std::size_t>(model::channel_count(m.lmax));
  s.nk = m.energy_grid.size();
  s.v00 = project(m.ground_dipole);
  for (const auto &b : m.bound_states) {
    s.va0.push_back(project(b.dipole_from_homo));
    s.ea.push_back(b.energy - m.homo_energy);
  }
  const auto w = trapezoid_weights(m.energy_grid);
  for (std::size_t k = 0; k < s.nk; ++k)
    s.ek.push_back(m.energy_grid[k] + m.ip());
  s.vk0.assign(s.nk * s.nc, 0.0);
  s.vka.assign(s.na * s.nk * s.nc, 0.0);
  for (std::size_t k = 0; k < s.nk; ++k) {
    const double sw = std::sqrt(w[k]);
    for (int l = 0; l <= m.lmax; ++l)
      for (int mm = -l; mm <= l; ++mm) {
        const std::size_t ch = static_cast<std::size_t>(model::channel(l, mm));
        cplx v = 0.0;
        for (int nu = -1; nu <= 1; ++nu)
          v += c[nu + 1] * m.continuum_from_homo.at(k, l, mm, nu);
        s.vk0[k * s.nc + ch] = sw * v;
        for (std::size_t a = 0; a < s.na; ++a) {
          cplx u = 0.0;
          for (int nu = -1; nu <= 1; ++nu)
            u += c[nu + 1] * m.continuum_from_bound[a].at(k, l, mm, nu);
          s.vka[(a * s.nk + k) * s.nc + ch] = sw * u;
        }
      }
  }
  return s;
}

using State = std::vector<cplx>;

} // namespace

PropagationResult propagate_weak_field(const model::MolecularModel &m,
                                       const field::PulseTrain &train, int mu0,
                                       const Orientation &o, const PropagationOptions &opt) {
  namespace ode = boost::numeric::odeint;
  const Manifold s = build(m, mu0, o);
  const std::size_t n = 1 + s.na + s.nk * s.nc;
  State y(n, 0.0);
  y[0] = 1.0;

  PropagationResult res;
  res.energies = m.energy_grid;
  res.lmax = m.lmax;
  res.max_norm = 1.0;

  const bool zero = [&] {
    for (const auto &p : train.pulses)
      if (p.amplitude != 0.0)
        return false;
    return true;
  }();

  if (!zero) {
    field::TimeGridOptions wopt;
    wopt.span_sigmas = opt.span_sigmas;
    const auto [t0, t1] = field::integration_window(train, wopt);
    const cplx I(0.0, 1.0);
    std::vector<cplx> pa(s.na), pk(s.nk);
    auto rhs = [&](const State &x, State &dx, double t) {
      const double e = field::evaluate_field(train, t);
      for (std::size_t a = 0; a < s.na; ++a)
        pa[a] = std::polar(1.0, s.ea[a] * t);
      for (std::size_t k = 0; k < s.nk; ++k)
        pk[k] = std::polar(1.0, s.ek[k] * t);
      const cplx ie = I * e;
      cplx d0 = s.v00 * x[0];
      for (std::size_t a = 0; a < s.na; ++a) {
        const cplx xa = x[1 + a];
        cplx da = s.va0[a] * pa[a] * x[0];
        d0 += std::conj(s.va0[a] * pa[a]) * xa;
        for (std::size_t k = 0; k < s.nk; ++k) {
          const cplx ph = pk[k] * std::conj(pa[a]);
          for (std::size_t c = 0; c < s.nc; ++c) {
            const std::size_t ic = k * s.nc + c;
            const cplx v = s.vka[(a * s.nk + k) * s.nc + c] * ph;
            da += std::conj(v) * x[1 + s.na + ic];
          }
        }
        dx[1 + a] = ie * da;
      }
      for (std::size_t k = 0; k < s.nk; ++k)
        for (std::size_t c = 0; c < s.nc; ++c) {
          const std::size_t ic = k * s.nc + c;
          const cplx v0 = s.vk0[ic] * pk[k];
          cplx dk = v0 * x[0];
          d0 += std::conj(v0) * x[1 + s.na + ic];
          for (std::size_t a = 0; a < s.na; ++a)
            dk += s.vka[(a * s.nk + k) * s.nc + c] * pk[k] * std::conj(pa[a]) * x[1 + a];
          dx[1 + s.na + ic] = ie * dk;
        }
      dx[0] = ie * d0;
    };

    auto stepper = ode::make_controlled(opt.abs_tol, opt.rel_tol, ode::runge_kutta_dopri5<State>());
    double t = t0;
    double dt = 0.05;
    while (t < t1) {
      if (t + dt > t1)
        dt = t1 - t;
      const auto r = stepper.try_step(rhs, y, t, dt);
      if (r == ode::success) {
        ++res.steps;
        double nrm = 0.0;
        for (const auto &v : y)
          nrm += std::norm(v);
        res.max_norm = std::max(res.max_norm, nrm);
      } else if (dt < opt.min_step) {
        throw ConvergenceError("propagation step size underflow at t = " + std::to_string(t) +
                               " (stiff coupling or field too strong)");
      }
    }
  }
  res.ground = y[0];
  res.bound.assign(y.begin() + 1, y.begin() + 1 + static_cast<std::ptrdiff_t>(s.na));
  const auto w = trapezoid_weights(m.energy_grid);
  res.continuum.resize(s.nk * s.nc);
  for (std::size_t k = 0; k < s.nk; ++k)
    for (std::size_t c = 0; c < s.nc; ++c)
      res.continuum[k * s.nc + c] = y[1 + s.na + k * s.nc + c] / std::sqrt(w[k]);
  res.final_norm = 0.0;
  for (const auto &v : y)
    res.final_norm += std::norm(v);
  return res;
}

} // namespace pecd::oracle
