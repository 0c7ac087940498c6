#include "coolopt/objective.hpp"

#include <Eigen/SparseLU>
#include <cmath>
#include <stdexcept>

namespace coolopt {

namespace {

Eigen::ArrayXXd interpolate_qp(const StructuredMesh& mesh, const QuadTable& quad,
                               const Eigen::VectorXd& nodal) {
  Eigen::ArrayXXd out(mesh.n_elems(), QuadTable::nq);
  for (int e = 0; e < mesh.n_elems(); ++e) {
    const auto nodes = mesh.elem_nodes(e);
    for (int q = 0; q < QuadTable::nq; ++q) {
      double v = 0.0;
      for (int a = 0; a < 4; ++a) v += quad.N[q][a] * nodal[nodes[a]];
      out(e, q) = v;
    }
  }
  return out;
}

double domain_measure(const StructuredMesh& mesh, const ObjectiveConfig& cfg) {
  return cfg.domain_area > 0.0 ? cfg.domain_area : mesh.Lx * mesh.Ly;
}

}  // namespace

double p_mean_qp(const StructuredMesh& mesh, const QuadTable& quad,
                 const Eigen::ArrayXXd& T_qp, const ObjectiveConfig& cfg) {
  if (cfg.p_exponent < 1.0) throw std::domain_error("p_mean: exponent must be >= 1");
  const double t_max = T_qp.maxCoeff();
  if (T_qp.minCoeff() <= 0.0)
    throw std::domain_error("p_mean: temperature field must be positive (Kelvin)");
  const double p = cfg.p_exponent;
  double acc = 0.0;
  for (int e = 0; e < T_qp.rows(); ++e)
    for (int q = 0; q < QuadTable::nq; ++q)
      acc += quad.wdetJ * std::pow(T_qp(e, q) / t_max, p);
  acc /= domain_measure(mesh, cfg);
  return t_max * std::pow(acc, 1.0 / p);
}

double p_mean(const StructuredMesh& mesh, const QuadTable& quad,
              const Eigen::VectorXd& Tb_nodal, const ObjectiveConfig& cfg) {
  return p_mean_qp(mesh, quad, interpolate_qp(mesh, quad, Tb_nodal), cfg);
}

Eigen::VectorXd p_mean_dT(const StructuredMesh& mesh, const QuadTable& quad,
                          const Eigen::VectorXd& Tb_nodal, const ObjectiveConfig& cfg) {
  const Eigen::ArrayXXd T_qp = interpolate_qp(mesh, quad, Tb_nodal);
  const double J = p_mean_qp(mesh, quad, T_qp, cfg);
  const double p = cfg.p_exponent;
  const double inv_measure = 1.0 / domain_measure(mesh, cfg);
  Eigen::VectorXd dJ = Eigen::VectorXd::Zero(Tb_nodal.size());
  for (int e = 0; e < mesh.n_elems(); ++e) {
    const auto nodes = mesh.elem_nodes(e);
    for (int q = 0; q < QuadTable::nq; ++q) {
      // dJ/dT_q = w/|Omega| * (T_q/J)^(p-1); the ratio stays O(1).
      const double g = quad.wdetJ * inv_measure * std::pow(T_qp(e, q) / J, p - 1.0);
      for (int a = 0; a < 4; ++a) dJ[nodes[a]] += g * quad.N[q][a];
    }
  }
  return dJ;
}

Eigen::ArrayXXd adjoint_sensitivity_qp(const AdjointInputs& in,
                                       const ObjectiveConfig& cfg,
                                       GradientReport* report) {
  const StructuredMesh& mesh = *in.mesh;
  const QuadratureCache& cache = *in.cache;
  const int nn = mesh.n_nodes();

  // Thermal adjoint: K^T lambda_T = -dJ/dT (J depends on T_b only).
  Eigen::SparseMatrix<double> K;
  Eigen::VectorXd F_unused;
  assemble_thermal(mesh, cache, *in.thermal_dofs, *in.thermal_bc, *in.flow,
                   in.thermal_forcing, in.policy, K, F_unused);
  const Eigen::VectorXd dJdTb =
      p_mean_dT(mesh, cache.quad, in.thermal->T.segment(nn, nn), cfg);
  Eigen::VectorXd rhs_T = Eigen::VectorXd::Zero(in.thermal_dofs->n_free());
  for (int n = 0; n < nn; ++n) {
    const int row = in.thermal_dofs->reduced[nn + n];
    if (row >= 0) rhs_T[row] = -dJdTb[n];
  }
  Eigen::SparseMatrix<double> Kt = K.transpose();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_t;
  lu_t.compute(Kt);
  if (lu_t.info() != Eigen::Success)
    throw SolverError("thermal adjoint factorization failed");
  Eigen::VectorXd lambda_T = lu_t.solve(rhs_T);
  if (report) report->thermal_adjoint_residual = (Kt * lambda_T - rhs_T).norm();

  // Flow adjoint: J_f^T lambda_U = -(dR_t/dU)^T lambda_T.
  Eigen::VectorXd rhs_U = thermal_dR_dU_lambda(
      mesh, cache, *in.thermal_dofs, *in.flow_dofs, *in.thermal_bc, *in.flow,
      *in.thermal, in.thermal_forcing, lambda_T, in.policy);
  Eigen::SparseMatrix<double> Jf;
  assemble_flow(mesh, cache, *in.flow_dofs, *in.flow_bc, in.flow->U,
                in.flow_forcing, in.policy, nullptr, &Jf);
  Eigen::SparseMatrix<double> Jft = Jf.transpose();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_f;
  lu_f.compute(Jft);
  if (lu_f.info() != Eigen::Success)
    throw SolverError("flow adjoint factorization failed");
  Eigen::VectorXd lambda_U = lu_f.solve(rhs_U);
  if (report) report->flow_adjoint_residual = (Jft * lambda_U - rhs_U).norm();

  // Explicit design terms from both residuals.
  Eigen::ArrayXXd sens =
      flow_dR_dgamma_lambda(mesh, cache, *in.flow_dofs, in.flow->U,
                            in.flow_forcing, lambda_U, in.policy);
  sens += thermal_dR_dgamma_lambda(mesh, cache, *in.thermal_dofs, *in.thermal_bc,
                                   *in.flow, *in.thermal, in.thermal_forcing,
                                   lambda_T, in.policy);
  return sens;
}

GradientReport adjoint_gradient_mmc(const AdjointInputs& in,
                                    const ObjectiveConfig& cfg,
                                    const ComponentSet& set, ComponentMask mask,
                                    const DesignVector& design) {
  GradientReport rep;
  const Eigen::ArrayXXd sens = adjoint_sensitivity_qp(in, cfg, &rep);
  const StructuredMesh& mesh = *in.mesh;
  const QuadTable& quad = in.cache->quad;
  const long nvar = design.values.size();
  rep.gradient = Eigen::VectorXd::Zero(nvar);
  Eigen::VectorXd dgamma(nvar);
  for (int e = 0; e < mesh.n_elems(); ++e) {
    const double x0 = mesh.elem_x0(e);
    const double y0 = mesh.elem_y0(e);
    for (int q = 0; q < QuadTable::nq; ++q) {
      gamma_gradient_at(set, x0 + quad.qx_off[q], y0 + quad.qy_off[q], mask,
                        design, dgamma);
      rep.gradient += sens(e, q) * dgamma;
    }
  }
  return rep;
}

GradientReport adjoint_gradient_density(const AdjointInputs& in,
                                        const ObjectiveConfig& cfg) {
  GradientReport rep;
  const Eigen::ArrayXXd sens = adjoint_sensitivity_qp(in, cfg, &rep);
  rep.gradient = sens.rowwise().sum().matrix();
  return rep;
}

std::vector<FdEntry> fd_gradient_oracle(
    const std::function<double(const Eigen::VectorXd&)>& evaluate_J,
    const Eigen::VectorXd& x0, const std::vector<int>& indices, double step) {
  std::vector<FdEntry> out;
  out.reserve(indices.size());
  for (int idx : indices) {
    FdEntry entry;
    entry.index = idx;
    Eigen::VectorXd xp = x0, xm = x0;
    xp[idx] += step;
    xm[idx] -= step;
    try {
      const double jp = evaluate_J(xp);
      const double jm = evaluate_J(xm);
      entry.value = (jp - jm) / (2.0 * step);
    } catch (const SolverError&) {
      entry.ok = false;
      entry.value = std::numeric_limits<double>::quiet_NaN();
    }
    out.push_back(entry);
  }
  return out;
}

}  // namespace coolopt
