#include "coolopt/mma.hpp"

#include <cmath>

#include "coolopt/errors.hpp"

namespace coolopt {

Eigen::VectorXd mma_step(MmaState& state, const Eigen::VectorXd& x, double /*J*/,
                         const Eigen::VectorXd& grad, const Eigen::VectorXd& lb,
                         const Eigen::VectorXd& ub) {
  const long n = x.size();
  if (grad.size() != n || lb.size() != n || ub.size() != n)
    throw SolverError("mma_step: inconsistent vector lengths");
  if (!grad.allFinite()) throw SolverError("mma_step: non-finite gradient");

  const Eigen::VectorXd range = ub - lb;
  if (state.iter < 2) {
    state.low = x - state.asym_init * range;
    state.upp = x + state.asym_init * range;
  } else {
    for (long i = 0; i < n; ++i) {
      const double s = (x[i] - state.x_prev[i]) * (state.x_prev[i] - state.x_prev2[i]);
      const double f = s > 0.0 ? state.asym_grow : (s < 0.0 ? state.asym_shrink : 1.0);
      state.low[i] = x[i] - f * (state.x_prev[i] - state.low[i]);
      state.upp[i] = x[i] + f * (state.upp[i] - state.x_prev[i]);
    }
  }
  for (long i = 0; i < n; ++i) {
    state.low[i] = std::max(state.low[i], x[i] - 10.0 * range[i]);
    state.low[i] = std::min(state.low[i], x[i] - 0.01 * range[i]);
    state.upp[i] = std::min(state.upp[i], x[i] + 10.0 * range[i]);
    state.upp[i] = std::max(state.upp[i], x[i] + 0.01 * range[i]);
  }

  constexpr double raa = 1e-9;
  Eigen::VectorXd x_new(n);
  for (long i = 0; i < n; ++i) {
    const double gp = std::max(grad[i], 0.0);
    const double gm = std::max(-grad[i], 0.0);
    const double du = state.upp[i] - x[i];
    const double dl = x[i] - state.low[i];
    const double p = du * du * (gp + 0.001 * gm + raa);
    const double q = dl * dl * (gm + 0.001 * gp + raa);
    // Stationary point of p/(upp-x) + q/(x-low) on (low, upp).
    const double sp = std::sqrt(p);
    const double sq = std::sqrt(q);
    double xi = (state.low[i] * sp + state.upp[i] * sq) / (sp + sq);

    const double move = state.move_fraction * range[i];
    const double lo = std::max({lb[i], state.low[i] + 0.1 * dl, x[i] - move});
    const double hi = std::min({ub[i], state.upp[i] - 0.1 * du, x[i] + move});
    x_new[i] = std::min(std::max(xi, lo), hi);
  }

  state.x_prev2 = (state.iter < 1) ? x : state.x_prev;
  state.x_prev = x;
  ++state.iter;
  return x_new;
}

bool converged(const Eigen::VectorXd& x_new, const Eigen::VectorXd& x_old,
               const ConvergenceCriteria& criteria) {
  if (x_new.size() != x_old.size())
    throw SolverError("converged: vector length mismatch");
  if (x_new.size() == 0) return true;
  return (x_new - x_old).cwiseAbs().maxCoeff() < criteria.tol_dx;
}

}  // namespace coolopt
