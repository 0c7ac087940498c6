#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "coolopt/cache.hpp"
#include "coolopt/flow.hpp"
#include "coolopt/geometry.hpp"
#include "coolopt/thermal.hpp"

namespace coolopt {

struct ObjectiveConfig {
  double p_exponent = 10.0;
  double domain_area = 0.0;  // 0: use Lx*Ly
};

/// p-mean of the substrate temperature over the domain, evaluated by element
/// quadrature. Overflow-safe for large p (the integrand is normalized by the
/// field maximum before exponentiation).
double p_mean(const StructuredMesh& mesh, const QuadTable& quad,
              const Eigen::VectorXd& Tb_nodal, const ObjectiveConfig& cfg);

/// Same functional on raw quadrature-point values (n_elems x 4); the nodal
/// overload interpolates and forwards here.
double p_mean_qp(const StructuredMesh& mesh, const QuadTable& quad,
                 const Eigen::ArrayXXd& T_qp, const ObjectiveConfig& cfg);

/// dJ/dTb as a nodal vector.
Eigen::VectorXd p_mean_dT(const StructuredMesh& mesh, const QuadTable& quad,
                          const Eigen::VectorXd& Tb_nodal, const ObjectiveConfig& cfg);

struct GradientReport {
  Eigen::VectorXd gradient;  // per scaled design variable (or per element)
  double thermal_adjoint_residual = 0.0;
  double flow_adjoint_residual = 0.0;
};

/// Everything the adjoint needs from one converged forward evaluation.
struct AdjointInputs {
  const StructuredMesh* mesh = nullptr;
  const QuadratureCache* cache = nullptr;
  const DofMap* flow_dofs = nullptr;
  const DofMap* thermal_dofs = nullptr;
  const FlowBc* flow_bc = nullptr;
  const ThermalBc* thermal_bc = nullptr;
  const FlowState* flow = nullptr;
  const ThermalState* thermal = nullptr;
  const FlowForcing* flow_forcing = nullptr;
  const ThermalForcing* thermal_forcing = nullptr;
  Parallel policy = Parallel::openmp;
};

/// Reverse-order discrete adjoint: thermal adjoint, then flow adjoint, then
/// the explicit design terms lambda^T dR/dgamma at every quadrature point.
/// Returns the per-quadrature-point sensitivity array (n_elems x 4) and
/// fills the adjoint residual diagnostics.
Eigen::ArrayXXd adjoint_sensitivity_qp(const AdjointInputs& in,
                                       const ObjectiveConfig& cfg,
                                       GradientReport* report);

/// Chains the quadrature sensitivities through the analytic MMC gamma
/// gradients onto the scaled design vector.
GradientReport adjoint_gradient_mmc(const AdjointInputs& in,
                                    const ObjectiveConfig& cfg,
                                    const ComponentSet& set, ComponentMask mask,
                                    const DesignVector& design);

/// Density-baseline variant: one gradient entry per element.
GradientReport adjoint_gradient_density(const AdjointInputs& in,
                                        const ObjectiveConfig& cfg);

struct FdEntry {
  int index = 0;
  double value = 0.0;
  bool ok = true;  // false when a perturbed solve failed
};

/// Central finite differences with full re-solves per perturbation. The
/// evaluator maps a scaled design vector to J and may throw SolverError;
/// failed entries are flagged, never fabricated.
std::vector<FdEntry> fd_gradient_oracle(
    const std::function<double(const Eigen::VectorXd&)>& evaluate_J,
    const Eigen::VectorXd& x0, const std::vector<int>& indices, double step);

}  // namespace coolopt
