#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <vector>

#include "coolopt/cache.hpp"
#include "coolopt/mesh.hpp"

namespace coolopt {

/// Boundary data for the stationary flow problem. Inlet and outlet are open
/// boundaries with prescribed normal traction -p and zero tangential
/// velocity; everything else is no-slip. The pressure Dirichlet slot exists
/// for manufactured-solution runs that pin the constant mode.
struct FlowBc {
  FieldDirichlet ux, uy, p;
  double p_inlet = 0.0;
  double p_outlet = 0.0;
};

/// No-slip walls, tangential-velocity constraints on inlet/outlet edges,
/// traction magnitudes from p_in. Matches the cooling-plate setup.
FlowBc make_channel_flow_bc(const StructuredMesh& mesh, double p_in);

/// Stacked full nodal vector [ux; uy; p] including Dirichlet values.
struct FlowState {
  Eigen::VectorXd U;

  double ux(int node, int n_nodes) const { return U[node]; }
  double uy(int node, int n_nodes) const { return U[n_nodes + node]; }
  double p(int node, int n_nodes) const { return U[2 * n_nodes + node]; }
};

struct FlowSolverSettings {
  double newton_tol = 1e-9;          // relative residual
  int max_newton = 40;
  int max_line_search = 9;           // halvings per Newton step
  std::vector<double> ramp_continuation = {0.25, 0.5, 1.0};
  double supg_eps_u = 1e-12;         // smoothing of |u| in tau
};

struct FlowSolveReport {
  bool converged = false;
  int newton_iters = 0;              // total across continuation levels
  int continuation_levels = 1;
  std::vector<double> residual_history;
};

/// Optional body force at quadrature points (n_elems x 4), used by the
/// manufactured-solution harness.
struct FlowForcing {
  Eigen::ArrayXXd fx, fy;
};

DofMap make_flow_dof_map(const StructuredMesh& mesh, const FlowBc& bc);

/// Residual (and optionally the exact Jacobian) of the stabilized discrete
/// system at state U, reduced to free dofs. The Jacobian linearizes every
/// term the residual evaluates, including tau(u) and the Brinkman reaction.
void assemble_flow(const StructuredMesh& mesh, const QuadratureCache& cache,
                   const DofMap& dofs, const FlowBc& bc,
                   const Eigen::VectorXd& U_full, const FlowForcing* forcing,
                   Parallel policy, Eigen::VectorXd* residual,
                   Eigen::SparseMatrix<double>* jacobian);

/// Newton iteration with backtracking line search; falls back to inlet
/// pressure continuation when the direct attempt stalls. Throws SolverError
/// if no attempt converges (report still filled).
FlowState solve_flow(const StructuredMesh& mesh, const QuadratureCache& cache,
                     const DofMap& dofs, const FlowBc& bc,
                     const FlowSolverSettings& settings,
                     const FlowForcing* forcing = nullptr,
                     Parallel policy = Parallel::openmp,
                     FlowSolveReport* report = nullptr);

/// Volumetric rate per unit depth through the tagged boundary segment,
/// positive outward.
double flow_rate(const StructuredMesh& mesh, const FlowState& state, EdgeTag tag);

/// Accumulates lambda^T dR_flow/dgamma_q for every quadrature point into an
/// (n_elems x 4) array. `lambda` is a reduced vector on the flow dofs.
Eigen::ArrayXXd flow_dR_dgamma_lambda(const StructuredMesh& mesh,
                                      const QuadratureCache& cache,
                                      const DofMap& dofs,
                                      const Eigen::VectorXd& U_full,
                                      const FlowForcing* forcing,
                                      const Eigen::VectorXd& lambda,
                                      Parallel policy = Parallel::openmp);

}  // namespace coolopt
