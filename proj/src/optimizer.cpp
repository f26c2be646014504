#include "pecd/control.hpp"
#include "pecd/error.hpp"
#include <Eigen/SVD>
#include <boost/math/tools/minima.hpp>
#include <algorithm>
#include <cmath>
#include <random>

namespace pecd::control {

namespace {

struct BudgetExhausted {};

class Search {
public:
  Search(const Problem &p, const OptimizerOptions &opt, OptimizerState &st) : p_(p), opt_(opt), st_(st) {}

  double eval(const std::vector<double> &x) {
    if (st_.evaluations >= opt_.budget)
      throw BudgetExhausted{};
    const auto [v0, rejected] = p_.f(x);
    const double v = rejected ? 0.0 : v0;
    ++st_.evaluations;
    if (st_.history.empty() || v > st_.best) {
      st_.best = v;
      st_.x = x;
    }
    st_.history.push_back({st_.evaluations, v, st_.best, rejected});
    return v;
  }

  //! Maximize along d (block coordinates) from the current best point;
  //! returns the signed step actually taken.
  double line(const std::vector<std::size_t> &block, const Eigen::VectorXd &d) {
    const std::vector<double> x0 = st_.x;
    double tlo = -1e300, thi = 1e300;
    for (std::size_t i = 0; i < block.size(); ++i) {
      const double di = d[static_cast<Eigen::Index>(i)];
      if (std::abs(di) < 1e-14)
        continue;
      const double a = (0.0 - x0[block[i]]) / di, b = (1.0 - x0[block[i]]) / di;
      tlo = std::max(tlo, std::min(a, b));
      thi = std::min(thi, std::max(a, b));
    }
    if (!(thi - tlo > 1e-12))
      return 0.0;
    auto at = [&](double t) {
      std::vector<double> x = x0;
      for (std::size_t i = 0; i < block.size(); ++i)
        x[block[i]] = std::clamp(x0[block[i]] + t * d[static_cast<Eigen::Index>(i)], 0.0, 1.0);
      return x;
    };
    std::uintmax_t iters = static_cast<std::uintmax_t>(opt_.line_iterations);
    boost::math::tools::brent_find_minima([&](double t) { return -eval(at(t)); }, tlo, thi,
                                          opt_.line_bits, iters);
    double step = 0.0;
    for (std::size_t i = 0; i < block.size(); ++i)
      step += (st_.x[block[i]] - x0[block[i]]) * d[static_cast<Eigen::Index>(i)];
    return step;
  }

private:
  const Problem &p_;
  const OptimizerOptions &opt_;
  OptimizerState &st_;
};

bool small_gain(double gain, double best, const OptimizerOptions &opt) {
  return gain <= opt.rel_tol * std::abs(best) + opt.abs_tol;
}

} // namespace

OptimizerState principal_axis_maximize(const Problem &p, const std::vector<double> &x0,
                                       const OptimizerOptions &opt) {
  if (opt.budget < 1)
    throw ConfigError("optimizer budget must be >= 1");
  if (x0.size() != p.dim || !p.f)
    throw ConfigError("optimizer problem and start point disagree");
  auto blocks = p.blocks;
  if (blocks.empty() && p.dim > 0) {
    blocks.emplace_back();
    for (std::size_t i = 0; i < p.dim; ++i)
      blocks.back().push_back(i);
  }
  for (const auto &b : blocks)
    for (std::size_t i : b)
      if (i >= p.dim)
        throw ConfigError("optimizer block index out of range");

  OptimizerState st;
  Search s(p, opt, st);
  std::vector<double> x = x0;
  for (auto &v : x)
    v = std::clamp(v, 0.0, 1.0);
  s.eval(x);
  if (st.history.front().rejected)
    throw ConfigError("initial pulse train violates the constraints");

  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> normal;
  try {
    for (st.cycles = 0; st.cycles < opt.max_cycles; ++st.cycles) {
      const double cycle_start = st.best;
      st.directions.clear();
      for (const auto &block : blocks) {
        const auto n = static_cast<Eigen::Index>(block.size());
        Eigen::MatrixXd dirs = Eigen::MatrixXd::Identity(n, n);
        for (int sweep = 0; sweep < 4 * static_cast<int>(n) + 4; ++sweep) {
          const double sweep_start = st.best;
          std::vector<double> xs(block.size());
          for (std::size_t i = 0; i < block.size(); ++i)
            xs[i] = st.x[block[i]];
          Eigen::MatrixXd scaled(n, n + 1);
          for (Eigen::Index i = 0; i < n; ++i)
            scaled.col(i) = dirs.col(i) * s.line(block, dirs.col(i));
          Eigen::VectorXd net(n);
          for (Eigen::Index i = 0; i < n; ++i)
            net[i] = st.x[block[static_cast<std::size_t>(i)]] - xs[static_cast<std::size_t>(i)];
          scaled.col(n).setZero();
          if (net.norm() > 1e-12) {
            const Eigen::VectorXd u = net.normalized();
            scaled.col(n) = u * s.line(block, u);
          }
          if (scaled.norm() < 1e-12) {
            // stalled: probe one seeded random direction before giving up
            Eigen::VectorXd r(n);
            for (Eigen::Index i = 0; i < n; ++i)
              r[i] = normal(rng);
            if (std::abs(s.line(block, r.normalized())) < 1e-12)
              break;
          } else {
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(scaled, Eigen::ComputeFullU);
            dirs = svd.matrixU();
          }
          if (small_gain(st.best - sweep_start, st.best, opt))
            break;
        }
        for (Eigen::Index j = 0; j < n; ++j) {
          std::vector<double> d(p.dim, 0.0);
          for (Eigen::Index i = 0; i < n; ++i)
            d[block[static_cast<std::size_t>(i)]] = dirs(i, j);
          st.directions.push_back(d);
        }
      }
      if (small_gain(st.best - cycle_start, st.best, opt)) {
        ++st.cycles;
        break;
      }
    }
  } catch (const BudgetExhausted &) {
  }
  return st;
}

} // namespace pecd::control
