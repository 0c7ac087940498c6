#include "coolopt/thermal.hpp"

#include <Eigen/SparseLU>
#include <cmath>

#include "coolopt/dual.hpp"
#include "coolopt/material.hpp"

namespace coolopt {

namespace {

// Local dof layout per element: [Tt(4), Tb(4)].
constexpr int kLoc = 8;

struct KernelParams {
  double rho_cp_adv;  // c_adv * rho * cp
  double c_cond;
  double k_f, k_s, q_k;
  double h_f, h_s, q_h;
  double Ht_f, Ht_s, q_H;
  double k_b, H_b, q0;
  double h_elem;
  double eps_u;
  double exch_sign_b;  // +1 energy-consistent, -1 paper-literal
};

// Coupled two-layer energy residual of one element; linear in (Tt, Tb).
// The scalar type T carries whichever derivative is being extracted.
template <class T>
void thermal_element_residual(const QuadTable& quad, const T ux[4], const T uy[4],
                              const T Tt[4], const T Tb[4], const T gamma_q[4],
                              const KernelParams& kp, const double* ft_q,
                              const double* fb_q, T r[kLoc]) {
  for (int i = 0; i < kLoc; ++i) r[i] = T(0.0);

  T kt_q[4], h_q[4], Ht_q[4];
  T kappa_mean(0.0), reaction_mean(0.0);
  for (int q = 0; q < 4; ++q) {
    kt_q[q] = ramp_interp(gamma_q[q], kp.k_f, kp.k_s, kp.q_k);
    h_q[q] = ramp_interp(gamma_q[q], kp.h_f, kp.h_s, kp.q_h);
    Ht_q[q] = ramp_interp(gamma_q[q], kp.Ht_f, kp.Ht_s, kp.q_H);
    kappa_mean += 0.25 * kp.c_cond * kt_q[q];
    reaction_mean += 0.25 * h_q[q] / (2.0 * Ht_q[q]);
  }

  const double ca = kp.rho_cp_adv;
  T uc1 = 0.25 * (ux[0] + ux[1] + ux[2] + ux[3]);
  T uc2 = 0.25 * (uy[0] + uy[1] + uy[2] + uy[3]);
  T unorm = sqrt(uc1 * uc1 + uc2 * uc2 + kp.eps_u * kp.eps_u);
  const double h = kp.h_elem;
  T tau_inv = 4.0 * kappa_mean / (ca * h * h) + 2.0 * unorm / h + reaction_mean / ca;
  T tau = 1.0 / (tau_inv * ca);

  for (int q = 0; q < 4; ++q) {
    const double* N = quad.N[q];
    const double* dNx = quad.dNdx[q];
    const double* dNy = quad.dNdy[q];
    const double w = quad.wdetJ;

    T u1(0.0), u2(0.0), Ttv(0.0), Tbv(0.0);
    T Tt_x(0.0), Tt_y(0.0), Tb_x(0.0), Tb_y(0.0);
    for (int a = 0; a < 4; ++a) {
      u1 += N[a] * ux[a];
      u2 += N[a] * uy[a];
      Ttv += N[a] * Tt[a];
      Tbv += N[a] * Tb[a];
      Tt_x += dNx[a] * Tt[a];
      Tt_y += dNy[a] * Tt[a];
      Tb_x += dNx[a] * Tb[a];
      Tb_y += dNy[a] * Tb[a];
    }
    const double ft = ft_q ? ft_q[q] : 0.0;
    const double fb = fb_q ? fb_q[q] : 0.0;

    T conv = u1 * Tt_x + u2 * Tt_y;
    T exch_t = h_q[q] / (2.0 * Ht_q[q]) * (Tbv - Ttv);
    T exch_b = h_q[q] / (2.0 * kp.H_b) * (Tbv - Ttv);
    T r_strong = ca * conv - exch_t - ft;

    for (int a = 0; a < 4; ++a) {
      r[a] += w * (ca * conv * N[a] +
                   kp.c_cond * kt_q[q] * (Tt_x * dNx[a] + Tt_y * dNy[a]) -
                   exch_t * N[a] - ft * N[a] +
                   tau * ca * (u1 * dNx[a] + u2 * dNy[a]) * r_strong);
      r[4 + a] += w * (0.5 * kp.k_b * (Tb_x * dNx[a] + Tb_y * dNy[a]) +
                       kp.exch_sign_b * exch_b * N[a] -
                       (kp.q0 / (2.0 * kp.H_b)) * N[a] - fb * N[a]);
    }
  }
}

KernelParams make_kernel_params(const StructuredMesh& mesh,
                                const QuadratureCache& cache, const ThermalBc& bc) {
  KernelParams kp;
  kp.rho_cp_adv = TwoLayerConstants::c_adv * cache.props.rho * cache.props.cp;
  kp.c_cond = TwoLayerConstants::c_cond;
  kp.k_f = cache.props.k_f;
  kp.k_s = cache.props.k_s;
  kp.q_k = cache.ramp.q_k;
  kp.h_f = cache.ramp.h_f;
  kp.h_s = cache.ramp.h_s;
  kp.q_h = cache.ramp.q_h;
  kp.Ht_f = cache.ramp.Ht_f;
  kp.Ht_s = cache.ramp.Ht_s;
  kp.q_H = cache.ramp.q_H;
  kp.k_b = cache.props.k_b;
  kp.H_b = cache.props.H_b;
  kp.q0 = cache.props.q0;
  kp.h_elem = std::sqrt(mesh.hx * mesh.hy);
  kp.eps_u = 1e-12;
  kp.exch_sign_b = bc.paper_literal_sign ? -1.0 : 1.0;
  return kp;
}

struct ThermalBlock {
  std::array<int, kLoc> full{};
  Eigen::Matrix<double, kLoc, kLoc> K;
  Eigen::Matrix<double, kLoc, 1> r0;  // residual at (free=0, fixed=dirichlet)
};

}  // namespace

ThermalBc make_channel_thermal_bc(const StructuredMesh& mesh, double T_in) {
  ThermalBc bc;
  const int nn = mesh.n_nodes();
  bc.Tt = FieldDirichlet(nn);
  bc.Tb = FieldDirichlet(nn);
  bc.T_in = T_in;
  for (int n : mesh.nodes_with_tag(EdgeTag::inlet)) bc.Tt.set(n, T_in);
  return bc;
}

DofMap make_thermal_dof_map(const StructuredMesh& mesh, const ThermalBc& bc) {
  return make_dof_map(mesh.n_nodes(), {&bc.Tt, &bc.Tb});
}

void assemble_thermal(const StructuredMesh& mesh, const QuadratureCache& cache,
                      const DofMap& dofs, const ThermalBc& bc,
                      const FlowState& flow, const ThermalForcing* forcing,
                      Parallel policy, Eigen::SparseMatrix<double>& K,
                      Eigen::VectorXd& F) {
  const int ne = mesh.n_elems();
  const int nn = mesh.n_nodes();
  const KernelParams kp = make_kernel_params(mesh, cache, bc);
  std::vector<ThermalBlock> blocks(ne);

  auto eval_elem = [&](int e) {
    ThermalBlock& b = blocks[e];
    const auto nodes = mesh.elem_nodes(e);
    using D = Dual<kLoc>;
    D ux[4], uy[4], Tt[4], Tb[4], gq[4], r[kLoc];
    for (int a = 0; a < 4; ++a) {
      b.full[a] = nodes[a];
      b.full[4 + a] = nn + nodes[a];
      ux[a] = D(flow.U[nodes[a]]);
      uy[a] = D(flow.U[nn + nodes[a]]);
      // Free dofs enter at zero so r0 carries sources and Dirichlet columns.
      const double tt0 = (dofs.reduced[nodes[a]] < 0)
                             ? dofs.dirichlet_value[nodes[a]]
                             : 0.0;
      const double tb0 = (dofs.reduced[nn + nodes[a]] < 0)
                             ? dofs.dirichlet_value[nn + nodes[a]]
                             : 0.0;
      Tt[a] = D::seeded(tt0, a);
      Tb[a] = D::seeded(tb0, 4 + a);
      gq[a] = D(cache.gamma(e, a));
    }
    double ftq[4], fbq[4];
    const double* ft = nullptr;
    const double* fb = nullptr;
    if (forcing) {
      for (int q = 0; q < 4; ++q) {
        ftq[q] = forcing->ft(e, q);
        fbq[q] = forcing->fb(e, q);
      }
      ft = ftq;
      fb = fbq;
    }
    thermal_element_residual(cache.quad, ux, uy, Tt, Tb, gq, kp, ft, fb, r);
    for (int i = 0; i < kLoc; ++i) {
      b.r0[i] = r[i].v;
      for (int j = 0; j < kLoc; ++j) b.K(i, j) = r[i].d[j];
    }
  };

  if (policy == Parallel::openmp) {
#pragma omp parallel for schedule(static)
    for (int e = 0; e < ne; ++e) eval_elem(e);
  } else {
    for (int e = 0; e < ne; ++e) eval_elem(e);
  }

  F.setZero(dofs.n_free());
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(ne) * kLoc * kLoc);
  for (int e = 0; e < ne; ++e) {
    const ThermalBlock& b = blocks[e];
    for (int i = 0; i < kLoc; ++i) {
      const int row = dofs.reduced[b.full[i]];
      if (row < 0) continue;
      F[row] -= b.r0[i];
      for (int j = 0; j < kLoc; ++j) {
        const int col = dofs.reduced[b.full[j]];
        if (col >= 0) trips.emplace_back(row, col, b.K(i, j));
      }
    }
  }
  K.resize(dofs.n_free(), dofs.n_free());
  K.setFromTriplets(trips.begin(), trips.end());
}

ThermalState solve_thermal(const StructuredMesh& mesh, const QuadratureCache& cache,
                           const DofMap& dofs, const ThermalBc& bc,
                           const FlowState& flow, const ThermalForcing* forcing,
                           Parallel policy) {
  // Pure-Neumann substrate with no interlayer exchange has a constant null
  // space; refuse to solve rather than return garbage.
  if (bc.Tb.count() == 0) {
    const double h_max = std::max(std::abs(cache.ramp.h_f), std::abs(cache.ramp.h_s));
    if (h_max < 1e-30)
      throw SolverError(
          "thermal system singular: lower layer has pure Neumann data and no "
          "interlayer exchange (h = 0)");
  }

  Eigen::SparseMatrix<double> K;
  Eigen::VectorXd F;
  assemble_thermal(mesh, cache, dofs, bc, flow, forcing, policy, K, F);

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(K);
  if (lu.info() != Eigen::Success)
    throw SolverError("thermal system factorization failed (singular matrix)");
  Eigen::VectorXd Tf = lu.solve(F);
  if (!Tf.allFinite()) throw SolverError("thermal solve produced non-finite values");

  ThermalState st;
  st.T.setZero(dofs.n_full());
  for (int i = 0; i < dofs.n_full(); ++i)
    if (dofs.reduced[i] < 0) st.T[i] = dofs.dirichlet_value[i];
  for (int k = 0; k < dofs.n_free(); ++k) st.T[dofs.full[k]] = Tf[k];
  return st;
}

Eigen::ArrayXXd thermal_dR_dgamma_lambda(const StructuredMesh& mesh,
                                         const QuadratureCache& cache,
                                         const DofMap& dofs, const ThermalBc& bc,
                                         const FlowState& flow,
                                         const ThermalState& thermal,
                                         const ThermalForcing* forcing,
                                         const Eigen::VectorXd& lambda,
                                         Parallel policy) {
  const int ne = mesh.n_elems();
  const int nn = mesh.n_nodes();
  const KernelParams kp = make_kernel_params(mesh, cache, bc);
  Eigen::ArrayXXd sens(ne, 4);

  auto eval_elem = [&](int e) {
    const auto nodes = mesh.elem_nodes(e);
    using D = Dual<4>;
    D ux[4], uy[4], Tt[4], Tb[4], gq[4], r[kLoc];
    std::array<int, kLoc> full;
    for (int a = 0; a < 4; ++a) {
      full[a] = nodes[a];
      full[4 + a] = nn + nodes[a];
      ux[a] = D(flow.U[nodes[a]]);
      uy[a] = D(flow.U[nn + nodes[a]]);
      Tt[a] = D(thermal.T[nodes[a]]);
      Tb[a] = D(thermal.T[nn + nodes[a]]);
      gq[a] = D::seeded(cache.gamma(e, a), a);
    }
    double ftq[4], fbq[4];
    const double* ft = nullptr;
    const double* fb = nullptr;
    if (forcing) {
      for (int q = 0; q < 4; ++q) {
        ftq[q] = forcing->ft(e, q);
        fbq[q] = forcing->fb(e, q);
      }
      ft = ftq;
      fb = fbq;
    }
    thermal_element_residual(cache.quad, ux, uy, Tt, Tb, gq, kp, ft, fb, r);
    for (int q = 0; q < 4; ++q) {
      double acc = 0.0;
      for (int i = 0; i < kLoc; ++i) {
        const int row = dofs.reduced[full[i]];
        if (row >= 0) acc += lambda[row] * r[i].d[q];
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

Eigen::VectorXd thermal_dR_dU_lambda(const StructuredMesh& mesh,
                                     const QuadratureCache& cache,
                                     const DofMap& thermal_dofs,
                                     const DofMap& flow_dofs, const ThermalBc& bc,
                                     const FlowState& flow,
                                     const ThermalState& thermal,
                                     const ThermalForcing* forcing,
                                     const Eigen::VectorXd& lambda,
                                     Parallel policy) {
  const int ne = mesh.n_elems();
  const int nn = mesh.n_nodes();
  const KernelParams kp = make_kernel_params(mesh, cache, bc);

  // Per-element contribution slots, reduced serially for determinism.
  Eigen::MatrixXd contrib(8, ne);  // rows: d/d ux[4], d/d uy[4]
  std::vector<std::array<int, 4>> enodes(ne);

  auto eval_elem = [&](int e) {
    const auto nodes = mesh.elem_nodes(e);
    enodes[e] = nodes;
    using D = Dual<8>;
    D ux[4], uy[4], Tt[4], Tb[4], gq[4], r[kLoc];
    std::array<int, kLoc> full;
    for (int a = 0; a < 4; ++a) {
      full[a] = nodes[a];
      full[4 + a] = nn + nodes[a];
      ux[a] = D::seeded(flow.U[nodes[a]], a);
      uy[a] = D::seeded(flow.U[nn + nodes[a]], 4 + a);
      Tt[a] = D(thermal.T[nodes[a]]);
      Tb[a] = D(thermal.T[nn + nodes[a]]);
      gq[a] = D(cache.gamma(e, a));
    }
    double ftq[4], fbq[4];
    const double* ft = nullptr;
    const double* fb = nullptr;
    if (forcing) {
      for (int q = 0; q < 4; ++q) {
        ftq[q] = forcing->ft(e, q);
        fbq[q] = forcing->fb(e, q);
      }
      ft = ftq;
      fb = fbq;
    }
    thermal_element_residual(cache.quad, ux, uy, Tt, Tb, gq, kp, ft, fb, r);
    for (int j = 0; j < 8; ++j) {
      double acc = 0.0;
      for (int i = 0; i < kLoc; ++i) {
        const int row = thermal_dofs.reduced[full[i]];
        if (row >= 0) acc += lambda[row] * r[i].d[j];
      }
      contrib(j, e) = acc;
    }
  };

  if (policy == Parallel::openmp) {
#pragma omp parallel for schedule(static)
    for (int e = 0; e < ne; ++e) eval_elem(e);
  } else {
    for (int e = 0; e < ne; ++e) eval_elem(e);
  }

  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(flow_dofs.n_free());
  for (int e = 0; e < ne; ++e) {
    for (int a = 0; a < 4; ++a) {
      const int rx = flow_dofs.reduced[enodes[e][a]];
      const int ry = flow_dofs.reduced[nn + enodes[e][a]];
      if (rx >= 0) rhs[rx] -= contrib(a, e);
      if (ry >= 0) rhs[ry] -= contrib(4 + a, e);
    }
  }
  return rhs;
}

double advected_enthalpy_outflux(const StructuredMesh& mesh,
                                 const QuadratureCache& cache,
                                 const FlowState& flow, const ThermalState& thermal,
                                 double T_ref) {
  const int nn = mesh.n_nodes();
  const double coef =
      TwoLayerConstants::c_adv * cache.props.rho * cache.props.cp * 2.0 * cache.ramp.Ht_f;
  double total = 0.0;
  for (const auto& e : mesh.boundary_edges) {
    if (e.tag == EdgeTag::wall) continue;
    const double le = std::hypot(mesh.node_x(e.n1) - mesh.node_x(e.n0),
                                 mesh.node_y(e.n1) - mesh.node_y(e.n0));
    // 2-point Gauss on the linear edge trace of (u.n)(T - T_ref).
    const double g = 1.0 / std::sqrt(3.0);
    const double un0 = flow.U[e.n0] * e.nx + flow.U[nn + e.n0] * e.ny;
    const double un1 = flow.U[e.n1] * e.nx + flow.U[nn + e.n1] * e.ny;
    const double t0 = thermal.T[e.n0] - T_ref;
    const double t1 = thermal.T[e.n1] - T_ref;
    for (double xi : {-g, g}) {
      const double N0 = 0.5 * (1.0 - xi);
      const double N1 = 0.5 * (1.0 + xi);
      total += 0.5 * le * (N0 * un0 + N1 * un1) * (N0 * t0 + N1 * t1);
    }
  }
  return coef * total;
}

}  // namespace coolopt
