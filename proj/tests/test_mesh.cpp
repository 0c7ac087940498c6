#include <cmath>

#include "coolopt/cache.hpp"
#include "coolopt/mesh.hpp"
#include "doctest.h"

using namespace coolopt;

TEST_CASE("small mesh counts and tagging") {
  BoundarySpan inlet{Side::left, 0.5, 1.0};
  BoundarySpan outlet{Side::left, 0.0, 0.5};
  StructuredMesh m = build_mesh(1.0, 1.0, 2, 2, inlet, outlet);
  CHECK(m.n_nodes() == 9);
  CHECK(m.n_elems() == 4);
  CHECK(m.boundary_edges.size() == 8);
  for (const auto& e : m.boundary_edges) {
    const bool tagged = e.tag == EdgeTag::wall || e.tag == EdgeTag::inlet ||
                        e.tag == EdgeTag::outlet;
    CHECK(tagged);
  }
  CHECK(m.nodes_with_tag(EdgeTag::inlet).size() == 2);
  CHECK(m.nodes_with_tag(EdgeTag::outlet).size() == 2);
}

TEST_CASE("inlet and outlet spans select the right node sets") {
  const double Ly = 1.0;
  BoundarySpan inlet{Side::left, 0.8 * Ly, 0.95 * Ly};
  BoundarySpan outlet{Side::left, 0.05 * Ly, 0.2 * Ly};
  StructuredMesh m = build_mesh(1.0, Ly, 20, 20, inlet, outlet);
  for (int n : m.nodes_with_tag(EdgeTag::inlet)) {
    CHECK(m.node_x(n) == doctest::Approx(0.0));
    CHECK(m.node_y(n) >= 0.8 - 1e-12);
    CHECK(m.node_y(n) <= 0.95 + 1e-12);
  }
  for (int n : m.nodes_with_tag(EdgeTag::outlet)) {
    CHECK(m.node_x(n) == doctest::Approx(0.0));
    CHECK(m.node_y(n) >= 0.05 - 1e-12);
    CHECK(m.node_y(n) <= 0.2 + 1e-12);
  }
}

TEST_CASE("mesh area and partition of unity") {
  BoundarySpan inlet{Side::left, 0.7, 0.9};
  BoundarySpan outlet{Side::left, 0.1, 0.3};
  StructuredMesh m = build_mesh(0.01, 0.007, 24, 17, inlet, outlet);
  const QuadTable quad = make_quad_table(m);

  double area = 0.0;
  for (int e = 0; e < m.n_elems(); ++e)
    for (int q = 0; q < QuadTable::nq; ++q) area += quad.wdetJ;
  CHECK(area == doctest::Approx(0.01 * 0.007).epsilon(1e-12));

  for (int q = 0; q < QuadTable::nq; ++q) {
    double sum_n = 0.0, sum_dx = 0.0, sum_dy = 0.0;
    for (int a = 0; a < 4; ++a) {
      sum_n += quad.N[q][a];
      sum_dx += quad.dNdx[q][a];
      sum_dy += quad.dNdy[q][a];
    }
    CHECK(sum_n == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(sum_dx) < 1e-12);
    CHECK(std::abs(sum_dy) < 1e-12);
  }

  BoundarySpan bad_inlet{Side::left, 0.2, 0.4};
  CHECK_THROWS_AS(build_mesh(1.0, 1.0, 4, 4, bad_inlet, BoundarySpan{Side::left, 0.3, 0.6}),
                  ConfigError);
  CHECK_THROWS_AS(build_mesh(1.0, 1.0, 4, 4, BoundarySpan{Side::left, 0.5, 1.5},
                             BoundarySpan{Side::left, 0.0, 0.2}),
                  ConfigError);
}

TEST_CASE("dof map bookkeeping") {
  BoundarySpan inlet{Side::left, 0.6, 0.9};
  BoundarySpan outlet{Side::left, 0.1, 0.4};
  StructuredMesh m = build_mesh(1.0, 1.0, 4, 4, inlet, outlet);
  FieldDirichlet a(m.n_nodes()), b(m.n_nodes());
  a.set(0, 1.5);
  a.set(7, -2.0);
  b.set(3, 0.25);
  DofMap map = make_dof_map(m.n_nodes(), {&a, &b});
  CHECK(map.n_full() == 2 * m.n_nodes());
  CHECK(map.n_free() == map.n_full() - 3);
  CHECK(map.reduced[0] == -1);
  CHECK(map.dirichlet_value[0] == 1.5);
  CHECK(map.dirichlet_value[m.n_nodes() + 3] == 0.25);
  // Free + constrained partition the dofs.
  int free_count = 0;
  for (int i = 0; i < map.n_full(); ++i)
    if (map.reduced[i] >= 0) ++free_count;
  CHECK(free_count == map.n_free());
}

TEST_CASE("material cache evaluates gamma and RAMP values") {
  BoundarySpan inlet{Side::left, 0.6, 0.9};
  BoundarySpan outlet{Side::left, 0.1, 0.4};
  StructuredMesh m = build_mesh(1.0, 1.0, 10, 10, inlet, outlet);
  PhysicalProperties props;
  RampParameters ramp;
  ramp.alpha_s = 1e6;

  SUBCASE("no components: open fluid everywhere") {
    ComponentSet empty;
    QuadratureCache c = evaluate_material_cache(m, empty, ComponentMask::all,
                                                props, ramp, Parallel::serial);
    CHECK(c.gamma.minCoeff() == doctest::Approx(1.0));
    CHECK(c.alpha.maxCoeff() == doctest::Approx(ramp.alpha_f));
  }

  SUBCASE("a wall covering a quadrature point gives near-solid alpha") {
    ComponentSet set;
    set.projection.beta = 8.0;
    set.walls.push_back({0.5, 0.5, 0.3, 0.2, 0.0});
    QuadratureCache c = evaluate_material_cache(m, set, ComponentMask::all,
                                                props, ramp, Parallel::serial);
    // Element containing the wall center.
    const int e = 5 * m.nx + 5;
    for (int q = 0; q < 4; ++q)
      CHECK(c.alpha(e, q) == doctest::Approx(ramp.alpha_s).epsilon(1e-3));
  }

  SUBCASE("rebuild determinism") {
    ComponentSet set;
    set.walls.push_back({0.4, 0.6, 0.25, 0.1, 0.3});
    QuadratureCache c1 = evaluate_material_cache(m, set, ComponentMask::all,
                                                 props, ramp, Parallel::serial);
    QuadratureCache c2 = evaluate_material_cache(m, set, ComponentMask::all,
                                                 props, ramp, Parallel::serial);
    CHECK((c1.gamma == c2.gamma).all());
    CHECK((c1.alpha == c2.alpha).all());
  }

  SUBCASE("density mode uses element-constant gamma") {
    Eigen::VectorXd rho = Eigen::VectorXd::Constant(m.n_elems(), 0.5);
    QuadratureCache c = evaluate_material_cache_density(m, rho, props, ramp,
                                                        Parallel::serial);
    CHECK(c.gamma.minCoeff() == doctest::Approx(0.5));
    CHECK(c.gamma.maxCoeff() == doctest::Approx(0.5));
    Eigen::VectorXd bad = Eigen::VectorXd::Constant(3, 0.5);
    CHECK_THROWS_AS(
        evaluate_material_cache_density(m, bad, props, ramp, Parallel::serial),
        ConfigError);
  }
}
