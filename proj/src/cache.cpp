#include "coolopt/cache.hpp"

namespace coolopt {

namespace {

void resize_cache(QuadratureCache& c, int n_elems) {
  for (auto* a : {&c.gamma, &c.alpha, &c.dalpha_dgamma, &c.kt, &c.dkt_dgamma,
                  &c.h, &c.dh_dgamma, &c.Ht, &c.dHt_dgamma})
    a->resize(n_elems, QuadTable::nq);
}

void fill_ramp_row(QuadratureCache& c, int e) {
  for (int q = 0; q < QuadTable::nq; ++q) {
    const double g = c.gamma(e, q);
    const auto a = alpha_of(g, c.ramp);
    const auto k = kt_of(g, c.ramp, c.props.k_f, c.props.k_s);
    const auto hh = h_of(g, c.ramp);
    const auto ht = Ht_of(g, c.ramp);
    c.alpha(e, q) = a.v;
    c.dalpha_dgamma(e, q) = a.dv;
    c.kt(e, q) = k.v;
    c.dkt_dgamma(e, q) = k.dv;
    c.h(e, q) = hh.v;
    c.dh_dgamma(e, q) = hh.dv;
    c.Ht(e, q) = ht.v;
    c.dHt_dgamma(e, q) = ht.dv;
  }
}

}  // namespace

QuadratureCache evaluate_material_cache(const StructuredMesh& mesh,
                                        const ComponentSet& set,
                                        ComponentMask mask,
                                        const PhysicalProperties& props,
                                        const RampParameters& ramp,
                                        Parallel policy) {
  QuadratureCache c;
  c.quad = make_quad_table(mesh);
  c.props = props;
  c.ramp = ramp;
  const int ne = mesh.n_elems();
  resize_cache(c, ne);

  auto eval_elem = [&](int e) {
    const double x0 = mesh.elem_x0(e);
    const double y0 = mesh.elem_y0(e);
    for (int q = 0; q < QuadTable::nq; ++q) {
      c.gamma(e, q) =
          gamma_at(set, x0 + c.quad.qx_off[q], y0 + c.quad.qy_off[q], mask);
    }
    fill_ramp_row(c, e);
  };

  if (policy == Parallel::openmp) {
#pragma omp parallel for schedule(static)
    for (int e = 0; e < ne; ++e) eval_elem(e);
  } else {
    for (int e = 0; e < ne; ++e) eval_elem(e);
  }
  return c;
}

QuadratureCache evaluate_material_cache_density(const StructuredMesh& mesh,
                                                const Eigen::VectorXd& density,
                                                const PhysicalProperties& props,
                                                const RampParameters& ramp,
                                                Parallel policy) {
  if (density.size() != mesh.n_elems())
    throw ConfigError("material cache: density length must equal element count");
  QuadratureCache c;
  c.quad = make_quad_table(mesh);
  c.props = props;
  c.ramp = ramp;
  const int ne = mesh.n_elems();
  resize_cache(c, ne);

  auto eval_elem = [&](int e) {
    const double g = std::min(1.0, std::max(0.0, density[e]));
    for (int q = 0; q < QuadTable::nq; ++q) c.gamma(e, q) = g;
    fill_ramp_row(c, e);
  };

  if (policy == Parallel::openmp) {
#pragma omp parallel for schedule(static)
    for (int e = 0; e < ne; ++e) eval_elem(e);
  } else {
    for (int e = 0; e < ne; ++e) eval_elem(e);
  }
  return c;
}

}  // namespace coolopt
