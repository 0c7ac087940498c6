#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "coolopt/cache.hpp"
#include "coolopt/flow.hpp"
#include "coolopt/mesh.hpp"

namespace coolopt {

/// Inlet temperature Dirichlet on the upper layer; everything else natural
/// (adiabatic walls, zero diffusive flux at the outlet). The lower layer has
/// natural conditions everywhere in production; the Dirichlet slots allow
/// manufactured-solution runs.
struct ThermalBc {
  FieldDirichlet Tt, Tb;
  double T_in = 303.0;
  /// Reproduces the printed sign of the substrate interlayer term instead of
  /// the energy-consistent one.
  bool paper_literal_sign = false;
};

ThermalBc make_channel_thermal_bc(const StructuredMesh& mesh, double T_in);

/// Stacked full nodal vector [T_t; T_b].
struct ThermalState {
  Eigen::VectorXd T;

  double Tt(int node, int n_nodes) const { return T[node]; }
  double Tb(int node, int n_nodes) const { return T[n_nodes + node]; }
};

struct ThermalForcing {
  Eigen::ArrayXXd ft, fb;  // n_elems x 4 sources at quadrature points
};

DofMap make_thermal_dof_map(const StructuredMesh& mesh, const ThermalBc& bc);

/// Assembles the monolithic linear system K T_free = F for the coupled
/// two-layer energy equations with SUPG on the advective upper layer.
void assemble_thermal(const StructuredMesh& mesh, const QuadratureCache& cache,
                      const DofMap& dofs, const ThermalBc& bc,
                      const FlowState& flow, const ThermalForcing* forcing,
                      Parallel policy, Eigen::SparseMatrix<double>& K,
                      Eigen::VectorXd& F);

/// Direct sparse solve of the coupled system. Detects the decoupled
/// substrate null space (no interlayer exchange, pure Neumann data) and
/// throws SolverError instead of returning garbage.
ThermalState solve_thermal(const StructuredMesh& mesh, const QuadratureCache& cache,
                           const DofMap& dofs, const ThermalBc& bc,
                           const FlowState& flow,
                           const ThermalForcing* forcing = nullptr,
                           Parallel policy = Parallel::openmp);

/// lambda^T dR_thermal/dgamma_q per quadrature point, (n_elems x 4).
Eigen::ArrayXXd thermal_dR_dgamma_lambda(const StructuredMesh& mesh,
                                         const QuadratureCache& cache,
                                         const DofMap& dofs, const ThermalBc& bc,
                                         const FlowState& flow,
                                         const ThermalState& thermal,
                                         const ThermalForcing* forcing,
                                         const Eigen::VectorXd& lambda,
                                         Parallel policy = Parallel::openmp);

/// Accumulates -(dR_thermal/dU)^T lambda into a reduced flow-dof vector:
/// the right-hand side of the flow adjoint.
Eigen::VectorXd thermal_dR_dU_lambda(const StructuredMesh& mesh,
                                     const QuadratureCache& cache,
                                     const DofMap& thermal_dofs,
                                     const DofMap& flow_dofs, const ThermalBc& bc,
                                     const FlowState& flow,
                                     const ThermalState& thermal,
                                     const ThermalForcing* forcing,
                                     const Eigen::VectorXd& lambda,
                                     Parallel policy = Parallel::openmp);

/// Net advected enthalpy outflux of the upper layer through the open
/// boundary, measured against the reference temperature T_ref:
///   c_adv * rho * cp * 2*Ht_f * sum over open edges of (u.n)(T_t - T_ref).
double advected_enthalpy_outflux(const StructuredMesh& mesh,
                                 const QuadratureCache& cache,
                                 const FlowState& flow, const ThermalState& thermal,
                                 double T_ref);

}  // namespace coolopt
