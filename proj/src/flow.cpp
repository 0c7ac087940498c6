#include "coolopt/flow.hpp"

#include <Eigen/SparseLU>
#include <cmath>
#include <sstream>

#include "coolopt/dual.hpp"
#include "coolopt/material.hpp"

namespace coolopt {

namespace {

// Local dof layout per element: [ux(4), uy(4), p(4)].
constexpr int kLoc = 12;

struct KernelParams {
  double rho, mu, c_mom;
  double alpha_f, alpha_s, q_f;
  double h_elem;
  double eps_u;
};

// Stabilized momentum + continuity residual of one element. Written against
// a generic scalar so the same code yields values (double), the exact state
// Jacobian (Dual<12>) and design derivatives (Dual<4> on gamma).
template <class T>
void flow_element_residual(const QuadTable& quad, const T ux[4], const T uy[4],
                           const T p[4], const T gamma_q[4],
                           const KernelParams& kp, const double* fx_q,
                           const double* fy_q, T r[kLoc]) {
  for (int i = 0; i < kLoc; ++i) r[i] = T(0.0);

  // Brinkman coefficient per quadrature point.
  T alpha_q[4];
  T alpha_mean(0.0);
  for (int q = 0; q < 4; ++q) {
    alpha_q[q] = ramp_interp(gamma_q[q], kp.alpha_f, kp.alpha_s, kp.q_f);
    alpha_mean += 0.25 * alpha_q[q];
  }

  // Element tau from centroid velocity (bilinear: mean of the corner values).
  T uc1 = 0.25 * (ux[0] + ux[1] + ux[2] + ux[3]);
  T uc2 = 0.25 * (uy[0] + uy[1] + uy[2] + uy[3]);
  T unorm = sqrt(uc1 * uc1 + uc2 * uc2 + kp.eps_u * kp.eps_u);
  const double h = kp.h_elem;
  T tau_inv = 4.0 * kp.mu / (kp.rho * h * h) + 2.0 * unorm / h + alpha_mean / kp.rho;
  T tau = 1.0 / (tau_inv * kp.rho);

  const double cm_rho = kp.c_mom * kp.rho;
  for (int q = 0; q < 4; ++q) {
    const double* N = quad.N[q];
    const double* dNx = quad.dNdx[q];
    const double* dNy = quad.dNdy[q];
    const double w = quad.wdetJ;

    T u1(0.0), u2(0.0), pv(0.0);
    T ux_x(0.0), ux_y(0.0), uy_x(0.0), uy_y(0.0), p_x(0.0), p_y(0.0);
    for (int a = 0; a < 4; ++a) {
      u1 += N[a] * ux[a];
      u2 += N[a] * uy[a];
      pv += N[a] * p[a];
      ux_x += dNx[a] * ux[a];
      ux_y += dNy[a] * ux[a];
      uy_x += dNx[a] * uy[a];
      uy_y += dNy[a] * uy[a];
      p_x += dNx[a] * p[a];
      p_y += dNy[a] * p[a];
    }
    const T& alpha = alpha_q[q];
    T conv_x = u1 * ux_x + u2 * ux_y;
    T conv_y = u1 * uy_x + u2 * uy_y;
    T divu = ux_x + uy_y;
    const double fx = fx_q ? fx_q[q] : 0.0;
    const double fy = fy_q ? fy_q[q] : 0.0;

    // Strong momentum residual (second derivatives vanish for bilinear
    // elements up to the mixed term, which is dropped).
    T rx = cm_rho * conv_x + p_x + alpha * u1 - fx;
    T ry = cm_rho * conv_y + p_y + alpha * u2 - fy;

    for (int a = 0; a < 4; ++a) {
      T adv_test = cm_rho * (u1 * dNx[a] + u2 * dNy[a]);
      r[a] += w * (cm_rho * conv_x * N[a] +
                   kp.mu * (2.0 * ux_x * dNx[a] + (ux_y + uy_x) * dNy[a]) -
                   pv * dNx[a] + alpha * u1 * N[a] - fx * N[a] +
                   tau * adv_test * rx);
      r[4 + a] += w * (cm_rho * conv_y * N[a] +
                       kp.mu * ((ux_y + uy_x) * dNx[a] + 2.0 * uy_y * dNy[a]) -
                       pv * dNy[a] + alpha * u2 * N[a] - fy * N[a] +
                       tau * adv_test * ry);
      r[8 + a] += w * (divu * N[a] + tau * (dNx[a] * rx + dNy[a] * ry));
    }
  }
}

KernelParams make_kernel_params(const StructuredMesh& mesh,
                                const QuadratureCache& cache, double eps_u) {
  KernelParams kp;
  kp.rho = cache.props.rho;
  kp.mu = cache.props.mu;
  kp.c_mom = TwoLayerConstants::c_mom;
  kp.alpha_f = cache.ramp.alpha_f;
  kp.alpha_s = cache.ramp.alpha_s;
  kp.q_f = cache.ramp.q_f;
  kp.h_elem = std::sqrt(mesh.hx * mesh.hy);
  kp.eps_u = eps_u;
  return kp;
}

struct FlowBlock {
  std::array<int, kLoc> full{};
  Eigen::Matrix<double, kLoc, kLoc> J;
  Eigen::Matrix<double, kLoc, 1> r;
};

void gather_flow_locals(const StructuredMesh& mesh, const Eigen::VectorXd& U,
                        int e, std::array<int, kLoc>& full, double ux[4],
                        double uy[4], double p[4]) {
  const int nn = mesh.n_nodes();
  const auto nodes = mesh.elem_nodes(e);
  for (int a = 0; a < 4; ++a) {
    full[a] = nodes[a];
    full[4 + a] = nn + nodes[a];
    full[8 + a] = 2 * nn + nodes[a];
    ux[a] = U[full[a]];
    uy[a] = U[full[4 + a]];
    p[a] = U[full[8 + a]];
  }
}

// Traction forcing from the open inlet/outlet boundaries: constant normal
// stress -p_b integrates to p_b * n * Le/2 per edge node.
void add_traction(const StructuredMesh& mesh, const DofMap& dofs,
                  const FlowBc& bc, Eigen::VectorXd& R) {
  const int nn = mesh.n_nodes();
  for (const auto& e : mesh.boundary_edges) {
    if (e.tag == EdgeTag::wall) continue;
    const double pb = (e.tag == EdgeTag::inlet) ? bc.p_inlet : bc.p_outlet;
    if (pb == 0.0) continue;
    const double le = std::hypot(mesh.node_x(e.n1) - mesh.node_x(e.n0),
                                 mesh.node_y(e.n1) - mesh.node_y(e.n0));
    for (int n : {e.n0, e.n1}) {
      const int rx = dofs.reduced[n];
      const int ry = dofs.reduced[nn + n];
      if (rx >= 0) R[rx] += pb * e.nx * 0.5 * le;
      if (ry >= 0) R[ry] += pb * e.ny * 0.5 * le;
    }
  }
}

}  // namespace

FlowBc make_channel_flow_bc(const StructuredMesh& mesh, double p_in) {
  FlowBc bc;
  const int nn = mesh.n_nodes();
  bc.ux = FieldDirichlet(nn);
  bc.uy = FieldDirichlet(nn);
  bc.p = FieldDirichlet(nn);
  const auto boundary = mesh.boundary_node_mask();
  const auto open_node = mesh.open_boundary_node_mask();
  for (int n = 0; n < nn; ++n) {
    if (boundary[n] && !open_node[n]) {
      bc.ux.set(n, 0.0);
      bc.uy.set(n, 0.0);
    }
  }
  // Open edges keep the normal component free and pin the tangential one.
  for (const auto& e : mesh.boundary_edges) {
    if (e.tag == EdgeTag::wall) continue;
    const bool vertical = (e.nx != 0.0);
    for (int n : {e.n0, e.n1}) {
      if (vertical)
        bc.uy.set(n, 0.0);
      else
        bc.ux.set(n, 0.0);
    }
  }
  bc.p_inlet = p_in;
  bc.p_outlet = 0.0;
  return bc;
}

DofMap make_flow_dof_map(const StructuredMesh& mesh, const FlowBc& bc) {
  return make_dof_map(mesh.n_nodes(), {&bc.ux, &bc.uy, &bc.p});
}

void assemble_flow(const StructuredMesh& mesh, const QuadratureCache& cache,
                   const DofMap& dofs, const FlowBc& bc,
                   const Eigen::VectorXd& U_full, const FlowForcing* forcing,
                   Parallel policy, Eigen::VectorXd* residual,
                   Eigen::SparseMatrix<double>* jacobian) {
  const int ne = mesh.n_elems();
  const bool want_jac = jacobian != nullptr;
  const KernelParams kp = make_kernel_params(mesh, cache, 1e-12);

  std::vector<FlowBlock> local_blocks(ne);

  auto eval_elem = [&](int e) {
    FlowBlock& b = local_blocks[e];
    double ux[4], uy[4], p[4];
    gather_flow_locals(mesh, U_full, e, b.full, ux, uy, p);
    const double* fx = nullptr;
    const double* fy = nullptr;
    double fxq[4], fyq[4];
    if (forcing) {
      for (int q = 0; q < 4; ++q) {
        fxq[q] = forcing->fx(e, q);
        fyq[q] = forcing->fy(e, q);
      }
      fx = fxq;
      fy = fyq;
    }
    double gq[4];
    for (int q = 0; q < 4; ++q) gq[q] = cache.gamma(e, q);

    if (want_jac) {
      using D = Dual<kLoc>;
      D dux[4], duy[4], dp[4], dg[4], dr[kLoc];
      for (int a = 0; a < 4; ++a) {
        dux[a] = D::seeded(ux[a], a);
        duy[a] = D::seeded(uy[a], 4 + a);
        dp[a] = D::seeded(p[a], 8 + a);
        dg[a] = D(gq[a]);
      }
      flow_element_residual(cache.quad, dux, duy, dp, dg, kp, fx, fy, dr);
      for (int i = 0; i < kLoc; ++i) {
        b.r[i] = dr[i].v;
        for (int j = 0; j < kLoc; ++j) b.J(i, j) = dr[i].d[j];
      }
    } else {
      double rr[kLoc];
      flow_element_residual(cache.quad, ux, uy, p, gq, kp, fx, fy, rr);
      for (int i = 0; i < kLoc; ++i) b.r[i] = rr[i];
    }
  };

  if (policy == Parallel::openmp) {
#pragma omp parallel for schedule(static)
    for (int e = 0; e < ne; ++e) eval_elem(e);
  } else {
    for (int e = 0; e < ne; ++e) eval_elem(e);
  }

  // Ordered scatter keeps the result bitwise independent of thread count.
  if (residual) {
    residual->setZero(dofs.n_free());
    for (int e = 0; e < ne; ++e) {
      const FlowBlock& b = local_blocks[e];
      for (int i = 0; i < kLoc; ++i) {
        const int row = dofs.reduced[b.full[i]];
        if (row >= 0) (*residual)[row] += b.r[i];
      }
    }
    add_traction(mesh, dofs, bc, *residual);
  }
  if (want_jac) {
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(ne) * kLoc * kLoc);
    for (int e = 0; e < ne; ++e) {
      const FlowBlock& b = local_blocks[e];
      for (int i = 0; i < kLoc; ++i) {
        const int row = dofs.reduced[b.full[i]];
        if (row < 0) continue;
        for (int j = 0; j < kLoc; ++j) {
          const int col = dofs.reduced[b.full[j]];
          if (col >= 0) trips.emplace_back(row, col, b.J(i, j));
        }
      }
    }
    jacobian->resize(dofs.n_free(), dofs.n_free());
    jacobian->setFromTriplets(trips.begin(), trips.end());
  }
}

namespace {

Eigen::VectorXd initial_state(const DofMap& dofs) {
  Eigen::VectorXd U = Eigen::VectorXd::Zero(dofs.n_full());
  for (int i = 0; i < dofs.n_full(); ++i)
    if (dofs.reduced[i] < 0) U[i] = dofs.dirichlet_value[i];
  return U;
}

// One Newton attempt from the given state. Returns true when converged.
bool newton_attempt(const StructuredMesh& mesh, const QuadratureCache& cache,
                    const DofMap& dofs, const FlowBc& bc,
                    const FlowSolverSettings& st, const FlowForcing* forcing,
                    Parallel policy, Eigen::VectorXd& U,
                    FlowSolveReport& report) {
  Eigen::VectorXd R;
  Eigen::SparseMatrix<double> J;
  assemble_flow(mesh, cache, dofs, bc, U, forcing, policy, &R, nullptr);
  double rnorm = R.norm();
  const double r0 = rnorm;
  report.residual_history.push_back(rnorm);
  if (r0 < 1e-300) return true;  // homogeneous problem, zero state solves it

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  for (int it = 0; it < st.max_newton; ++it) {
    if (rnorm <= st.newton_tol * r0) return true;
    assemble_flow(mesh, cache, dofs, bc, U, forcing, policy, nullptr, &J);
    lu.compute(J);
    if (lu.info() != Eigen::Success)
      throw SolverError("flow Jacobian factorization failed (singular element system)");
    Eigen::VectorXd d = lu.solve(-R);
    ++report.newton_iters;

    bool accepted = false;
    double step = 1.0;
    for (int ls = 0; ls <= st.max_line_search; ++ls, step *= 0.5) {
      Eigen::VectorXd U_try = U;
      for (int k = 0; k < dofs.n_free(); ++k) U_try[dofs.full[k]] += step * d[k];
      Eigen::VectorXd R_try;
      assemble_flow(mesh, cache, dofs, bc, U_try, forcing, policy, &R_try, nullptr);
      const double rn = R_try.norm();
      if (std::isfinite(rn) && rn < (1.0 - 1e-4 * step) * rnorm) {
        U = std::move(U_try);
        R = std::move(R_try);
        rnorm = rn;
        accepted = true;
        break;
      }
    }
    report.residual_history.push_back(rnorm);
    if (!accepted) return false;
  }
  return rnorm <= st.newton_tol * r0;
}

}  // namespace

FlowState solve_flow(const StructuredMesh& mesh, const QuadratureCache& cache,
                     const DofMap& dofs, const FlowBc& bc,
                     const FlowSolverSettings& settings,
                     const FlowForcing* forcing, Parallel policy,
                     FlowSolveReport* report) {
  FlowSolveReport local;
  FlowSolveReport& rep = report ? *report : local;
  rep = FlowSolveReport{};

  Eigen::VectorXd U = initial_state(dofs);
  if (newton_attempt(mesh, cache, dofs, bc, settings, forcing, policy, U, rep)) {
    rep.converged = true;
    return FlowState{std::move(U)};
  }

  // Direct attempt stalled: ramp the inlet traction up in stages.
  rep.continuation_levels = static_cast<int>(settings.ramp_continuation.size());
  U = initial_state(dofs);
  bool ok = true;
  for (double frac : settings.ramp_continuation) {
    FlowBc scaled = bc;
    scaled.p_inlet = bc.p_inlet * frac;
    scaled.p_outlet = bc.p_outlet * frac;
    ok = newton_attempt(mesh, cache, dofs, scaled, settings, forcing, policy, U, rep);
    if (!ok) break;
  }
  if (ok) {
    rep.converged = true;
    return FlowState{std::move(U)};
  }

  std::ostringstream msg;
  msg << "flow solve failed to converge; residual history:";
  for (double r : rep.residual_history) msg << " " << r;
  throw SolverError(msg.str());
}

double flow_rate(const StructuredMesh& mesh, const FlowState& state, EdgeTag tag) {
  bool found = false;
  const int nn = mesh.n_nodes();
  double rate = 0.0;
  for (const auto& e : mesh.boundary_edges) {
    if (e.tag != tag) continue;
    found = true;
    const double le = std::hypot(mesh.node_x(e.n1) - mesh.node_x(e.n0),
                                 mesh.node_y(e.n1) - mesh.node_y(e.n0));
    const double un0 = state.U[e.n0] * e.nx + state.U[nn + e.n0] * e.ny;
    const double un1 = state.U[e.n1] * e.nx + state.U[nn + e.n1] * e.ny;
    rate += 0.5 * le * (un0 + un1);  // exact for the linear edge trace
  }
  if (!found) throw ConfigError("flow_rate: no boundary edges carry the requested tag");
  return rate;
}

Eigen::ArrayXXd flow_dR_dgamma_lambda(const StructuredMesh& mesh,
                                      const QuadratureCache& cache,
                                      const DofMap& dofs,
                                      const Eigen::VectorXd& U_full,
                                      const FlowForcing* forcing,
                                      const Eigen::VectorXd& lambda,
                                      Parallel policy) {
  const int ne = mesh.n_elems();
  const KernelParams kp = make_kernel_params(mesh, cache, 1e-12);
  Eigen::ArrayXXd sens(ne, 4);

  auto eval_elem = [&](int e) {
    std::array<int, kLoc> full;
    double ux[4], uy[4], p[4];
    gather_flow_locals(mesh, U_full, e, full, ux, uy, p);
    double fxq[4], fyq[4];
    const double* fx = nullptr;
    const double* fy = nullptr;
    if (forcing) {
      for (int q = 0; q < 4; ++q) {
        fxq[q] = forcing->fx(e, q);
        fyq[q] = forcing->fy(e, q);
      }
      fx = fxq;
      fy = fyq;
    }
    using D = Dual<4>;
    D dux[4], duy[4], dp[4], dg[4], dr[kLoc];
    for (int a = 0; a < 4; ++a) {
      dux[a] = D(ux[a]);
      duy[a] = D(uy[a]);
      dp[a] = D(p[a]);
      dg[a] = D::seeded(cache.gamma(e, a), a);
    }
    flow_element_residual(cache.quad, dux, duy, dp, dg, kp, fx, fy, dr);
    for (int q = 0; q < 4; ++q) {
      double acc = 0.0;
      for (int i = 0; i < kLoc; ++i) {
        const int row = dofs.reduced[full[i]];
        if (row >= 0) acc += lambda[row] * dr[i].d[q];
      }
      sens(e, q) = acc;
    }
  };

  if (policy == Parallel::openmp) {
#pragma omp parallel for schedule(static)
    for (int e = 0; e < ne; ++e) eval_elem(e);
  } else {
    for (int e = 0; e < ne; ++e) eval_elem(e);
  }
  return sens;
}

}  // namespace coolopt
