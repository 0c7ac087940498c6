#pragma once

#include <Eigen/Dense>

namespace coolopt {

/// Method of Moving Asymptotes for bound-constrained minimization. With no
/// global constraints the separable subproblem has a closed-form coordinate
/// minimizer, so no inner dual iteration is needed.
struct MmaState {
  Eigen::VectorXd x_prev, x_prev2;
  Eigen::VectorXd low, upp;
  int iter = 0;

  double move_fraction = 0.1;   // move limit as a fraction of (ub - lb)
  double asym_init = 0.5;
  double asym_shrink = 0.7;     // oscillating history
  double asym_grow = 1.2;       // monotone history
};

struct ConvergenceCriteria {
  double tol_dx = 1e-3;  // max-norm change in scaled units
  int max_iters = 200;
};

/// One MMA update around x with gradient `grad`. Asymptotes adapt from the
/// two previous iterates; the result respects bounds, move limits and the
/// asymptote margins. Throws SolverError on non-finite gradients.
Eigen::VectorXd mma_step(MmaState& state, const Eigen::VectorXd& x, double J,
                         const Eigen::VectorXd& grad, const Eigen::VectorXd& lb,
                         const Eigen::VectorXd& ub);

/// Stopping rule: max_i |x_new - x_old| < tol_dx.
bool converged(const Eigen::VectorXd& x_new, const Eigen::VectorXd& x_old,
               const ConvergenceCriteria& criteria);

}  // namespace coolopt
