#include <cmath>
#include <random>

#include "coolopt/geometry.hpp"
#include "doctest.h"

using namespace coolopt;

namespace {

ComponentBounds test_bounds() {
  ComponentBounds b{};
  b.wall_x0_lb = -5.0;
  b.wall_x0_ub = 5.0;
  b.wall_y0_lb = -5.0;
  b.wall_y0_ub = 5.0;
  b.wall_L_lb = 0.1;
  b.wall_L_ub = 4.0;
  b.wall_t_lb = 0.05;
  b.wall_t_ub = 2.0;
  b.wall_angle_lb = -M_PI / 2;
  b.wall_angle_ub = M_PI / 2;
  b.fin_a_lb = 0.05;
  b.fin_a_ub = 2.0;
  b.fin_k_lb = 0.2;
  b.fin_k_ub = 1.0;
  b.fin_angle_lb = -M_PI / 2;
  b.fin_angle_ub = M_PI / 2;
  return b;
}

ComponentSet two_component_set(double beta = 8.0) {
  ComponentSet set;
  set.projection.beta = beta;
  set.walls.push_back({-1.0, 0.5, 1.2, 0.4, 0.3});
  set.fins.push_back({1.5, -0.5, 0.8, 0.6, -0.7, true});
  return set;
}

}  // namespace

TEST_CASE("wall TDF hand values") {
  WallComponent w{0.0, 0.0, 2.0, 1.0, 0.0};
  CHECK(wall_tdf(w, 0.0, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(wall_tdf(w, 2.0, 0.0) == doctest::Approx(0.0).epsilon(1e-14));

  WallComponent wr{0.0, 0.0, 2.0, 1.0, M_PI / 2};
  CHECK(wall_tdf(wr, 0.0, 1.0) == doctest::Approx(0.984375).epsilon(1e-12));
}

TEST_CASE("fin TDF hand values") {
  FinComponent f{0.0, 0.0, 1.0, 0.5, 0.0, true};
  CHECK(fin_tdf(f, 0.0, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(fin_tdf(f, 0.0, 0.5) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(fin_tdf(f, 0.5, 0.25) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("projection hand values") {
  ProjectionParameters proj{8.0};
  CHECK(project_tdf(0.0, proj) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(project_tdf(1.0, proj) ==
        doctest::Approx(0.5 * (1.0 - std::tanh(8.0))).epsilon(1e-12));
  CHECK(project_tdf(0.25, proj) ==
        doctest::Approx(0.5 * (1.0 - std::tanh(2.0))).epsilon(1e-12));
}

TEST_CASE("rotation equivariance of TDFs") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> ur(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double delta = ur(rng) * M_PI;
    WallComponent w{ur(rng), ur(rng), 1.0 + std::abs(ur(rng)), 0.3 + std::abs(ur(rng)), ur(rng)};
    const double px = w.x0 + ur(rng), py = w.y0 + ur(rng);
    const double phi0 = wall_tdf(w, px, py);

    WallComponent wrot = w;
    wrot.angle += delta;
    const double c = std::cos(delta), s = std::sin(delta);
    const double rx = w.x0 + c * (px - w.x0) - s * (py - w.y0);
    const double ry = w.y0 + s * (px - w.x0) + c * (py - w.y0);
    CHECK(wall_tdf(wrot, rx, ry) == doctest::Approx(phi0).epsilon(1e-12));

    FinComponent f{w.x0, w.y0, 1.0 + std::abs(ur(rng)), 0.4 + 0.5 * std::abs(ur(rng)), ur(rng), true};
    const double phif = fin_tdf(f, px, py);
    FinComponent frot = f;
    frot.angle += delta;
    CHECK(fin_tdf(frot, rx, ry) == doctest::Approx(phif).epsilon(1e-12));
  }
}

TEST_CASE("gamma product field") {
  ComponentSet set = two_component_set();

  // Far from every component each factor saturates to 1.
  CHECK(gamma_at(set, 40.0, 40.0, ComponentMask::all) > 1.0 - 1e-6);

  // At a wall center with no other component nearby the single factor rules.
  const double expected = 0.5 * (1.0 - std::tanh(8.0));
  CHECK(gamma_at(set, -1.0, 0.5, ComponentMask::walls_only) ==
        doctest::Approx(expected).epsilon(1e-9));

  // On the fin boundary, far from the wall: one factor 0.5.
  const double bx = 1.5 + 0.8 * std::cos(-0.7);
  const double by = -0.5 + 0.8 * std::sin(-0.7);
  CHECK(gamma_at(set, bx, by, ComponentMask::fins_only) ==
        doctest::Approx(0.5).epsilon(1e-9));

  // Monotone: deactivating a component never decreases gamma.
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> ur(-3.0, 3.0);
  ComponentSet no_fin = set;
  no_fin.fins[0].active = false;
  for (int i = 0; i < 200; ++i) {
    const double x = ur(rng), y = ur(rng);
    CHECK(gamma_at(no_fin, x, y, ComponentMask::all) >=
          gamma_at(set, x, y, ComponentMask::all) - 1e-15);
  }
}

TEST_CASE("projection sharpness limit") {
  ComponentSet set = two_component_set(500.0);
  // Strictly inside the wall.
  CHECK(gamma_at(set, -1.0, 0.5, ComponentMask::walls_only) < 1e-12);
  // Strictly outside everything.
  CHECK(gamma_at(set, 10.0, 10.0, ComponentMask::all) > 1.0 - 1e-12);
  // Exactly on the fin boundary (angle 0 fin for an exact boundary point).
  ComponentSet set2;
  set2.projection.beta = 500.0;
  set2.fins.push_back({0.0, 0.0, 1.0, 0.5, 0.0, true});
  CHECK(gamma_at(set2, 1.0, 0.0, ComponentMask::all) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("gamma gradient matches finite differences") {
  ComponentSet set = two_component_set(4.0);
  set.walls.push_back({0.8, 1.0, 0.9, 0.25, -0.4});
  const ComponentBounds bounds = test_bounds();
  StageMask mask_all{true, true};
  DesignVector design = pack_design(set, mask_all, bounds);

  std::mt19937 rng(11);
  std::uniform_real_distribution<double> ur(-3.0, 3.0);
  Eigen::VectorXd grad(design.values.size());
  int checked = 0;
  for (int pt = 0; pt < 100; ++pt) {
    const double x = ur(rng), y = ur(rng);
    gamma_gradient_at(set, x, y, ComponentMask::all, design, grad);
    for (long v = 0; v < design.values.size(); ++v) {
      const double step = 1e-6;
      DesignVector dp = design, dm = design;
      dp.values[v] += step;
      dm.values[v] -= step;
      const ComponentSet sp = unpack_design(dp, set);
      const ComponentSet sm = unpack_design(dm, set);
      const double fd = (gamma_at(sp, x, y, ComponentMask::all) -
                         gamma_at(sm, x, y, ComponentMask::all)) /
                        (2.0 * step);
      if (std::abs(fd) < 1e-9) continue;  // saturated or insensitive here
      CHECK(grad[v] == doctest::Approx(fd).epsilon(1e-5));
      ++checked;
    }
  }
  CHECK(checked > 200);  // the sweep actually exercised live variables
}

TEST_CASE("gradient is zero for saturated and symmetric variables") {
  ComponentSet set;
  set.projection.beta = 8.0;
  set.walls.push_back({0.0, 0.0, 1.0, 0.3, 0.0});
  set.fins.push_back({5.0, 5.0, 1.0, 1.0, 0.2, true});  // circle: k = 1
  const ComponentBounds bounds = test_bounds();
  DesignVector design = pack_design(set, StageMask{true, true}, bounds);
  Eigen::VectorXd grad(design.values.size());

  // Far outside the wall the projection saturates.
  gamma_gradient_at(set, 30.0, 0.0, ComponentMask::all, design, grad);
  for (long v = 0; v < 5; ++v) CHECK(std::abs(grad[v]) < 1e-8);

  // Rotating a circular fin changes nothing, exactly.
  gamma_gradient_at(set, 5.3, 5.4, ComponentMask::all, design, grad);
  const long psi_index = 5 + 2;  // wall vars, then fin (a, k, psi)
  CHECK(grad[psi_index] == 0.0);
}

TEST_CASE("inactive fins contribute nothing") {
  ComponentSet set = two_component_set();
  set.fins[0].active = false;
  CHECK(gamma_at(set, 1.5, -0.5, ComponentMask::all) ==
        doctest::Approx(gamma_at(set, 1.5, -0.5, ComponentMask::walls_only))
            .epsilon(1e-15));
  DesignVector design = pack_design(set, StageMask{false, true}, test_bounds());
  CHECK(design.values.size() == 0);  // inactive fins are not packed
}

TEST_CASE("prune_walls removes short walls") {
  const double Lx = 10.0;
  ComponentSet set;
  set.walls.push_back({1.0, 1.0, 1.25, 0.2, 0.0});  // 2L/Lx = 0.25
  set.walls.push_back({2.0, 2.0, 0.75, 0.2, 0.0});  // 2L/Lx = 0.15
  ComponentSet pruned = prune_walls(set, 0.2, Lx);
  REQUIRE(pruned.walls.size() == 1);
  CHECK(pruned.walls[0].x0 == 1.0);

  ComponentSet empty;
  CHECK(prune_walls(empty, 0.2, Lx).walls.empty());

  ComponentSet all_big = set;
  all_big.walls[1].half_length = 2.0;
  CHECK(prune_walls(all_big, 0.2, Lx).walls.size() == 2);

  // Idempotent.
  ComponentSet twice = prune_walls(pruned, 0.2, Lx);
  CHECK(twice.walls.size() == pruned.walls.size());

  std::vector<std::string> warnings;
  ComponentSet gone = prune_walls(set, 0.9, Lx, &warnings);
  CHECK(gone.walls.empty());
  CHECK(!warnings.empty());
}

TEST_CASE("prune_fins_near_walls exact distances") {
  ComponentSet set;
  set.walls.push_back({0.0, 0.0, 2.0, 0.5, 0.0});
  set.fins.push_back({0.0, 0.0, 0.1, 0.5, 0.0, true});   // at the wall center
  set.fins.push_back({0.0, 0.5 + 0.2, 0.1, 0.5, 0.0, true});  // face distance 0.2

  ComponentSet pruned = prune_fins_near_walls(set, 0.1);
  CHECK_FALSE(pruned.fins[0].active);
  CHECK(pruned.fins[1].active);

  // Idempotent.
  ComponentSet twice = prune_fins_near_walls(pruned, 0.1);
  CHECK(twice.fins[0].active == pruned.fins[0].active);
  CHECK(twice.fins[1].active == pruned.fins[1].active);
}

TEST_CASE("fin-wall distance agrees with a boundary-sampling oracle") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> ur(-2.0, 2.0);
  for (int trial = 0; trial < 12; ++trial) {
    WallComponent w{ur(rng), ur(rng), 0.5 + std::abs(ur(rng)),
                    0.2 + 0.3 * std::abs(ur(rng)), ur(rng)};
    const double px = ur(rng) * 2.0, py = ur(rng) * 2.0;
    const double exact = distance_to_wall(w, px, py);

    // Densely sample the rectangle boundary and take the minimum distance.
    const int samples = 1000000;
    double best = std::numeric_limits<double>::infinity();
    const double c = std::cos(w.angle), s = std::sin(w.angle);
    const double per = 4.0 * (w.half_length + w.half_thickness);
    for (int i = 0; i < samples; ++i) {
      double u = per * (i + 0.5) / samples;
      double lsx, lsy;
      if (u < 2 * w.half_length) {
        lsx = -w.half_length + u;
        lsy = -w.half_thickness;
      } else if (u < 2 * w.half_length + 2 * w.half_thickness) {
        lsx = w.half_length;
        lsy = -w.half_thickness + (u - 2 * w.half_length);
      } else if (u < 4 * w.half_length + 2 * w.half_thickness) {
        lsx = w.half_length - (u - 2 * w.half_length - 2 * w.half_thickness);
        lsy = w.half_thickness;
      } else {
        lsx = -w.half_length;
        lsy = w.half_thickness - (u - 4 * w.half_length - 2 * w.half_thickness);
      }
      const double gx = w.x0 + c * lsx - s * lsy;
      const double gy = w.y0 + s * lsx + c * lsy;
      best = std::min(best, std::hypot(px - gx, py - gy));
    }
    if (exact == 0.0) {
      // Inside the rectangle: the oracle measures distance to the boundary.
      CHECK(best >= 0.0);
    } else {
      CHECK(exact == doctest::Approx(best).epsilon(1e-4));
    }
    // Pruning decision agrees with the oracle decision at a few thresholds.
    for (double dmin : {0.05, 0.3, 1.0}) {
      ComponentSet set;
      set.walls.push_back(w);
      set.fins.push_back({px, py, 0.1, 0.5, 0.0, true});
      const bool removed = !prune_fins_near_walls(set, dmin).fins[0].active;
      const bool oracle_removed = (exact == 0.0 ? 0.0 : best) < dmin;
      CHECK(removed == oracle_removed);
    }
  }
}

TEST_CASE("prune_small_fins strict threshold") {
  const double h = 0.1;
  ComponentSet set;
  set.fins.push_back({0, 0, 1.5 * h, 0.5, 0.0, true});
  set.fins.push_back({1, 0, 3.0 * h, 0.5, 0.0, true});
  ComponentSet pruned = prune_small_fins(set, 2.0 * h);
  CHECK_FALSE(pruned.fins[0].active);
  CHECK(pruned.fins[1].active);

  ComponentSet empty;
  CHECK(prune_small_fins(empty, 1.0).fins.empty());

  // Exactly at the threshold: kept (strict less-than).
  ComponentSet ties;
  ties.fins.push_back({0, 0, 2.0 * h, 0.5, 0.0, true});
  CHECK(prune_small_fins(ties, 2.0 * h).fins[0].active);
}

TEST_CASE("pack/unpack round trip and clamping") {
  ComponentSet set = two_component_set();
  const ComponentBounds bounds = test_bounds();
  const StageMask mask{true, true};

  DesignVector design = pack_design(set, mask, bounds);
  REQUIRE(design.values.size() == 5 + 3);
  ComponentSet back = unpack_design(design, set);
  CHECK(back.walls[0].x0 == doctest::Approx(set.walls[0].x0).epsilon(1e-14));
  CHECK(back.walls[0].angle == doctest::Approx(set.walls[0].angle).epsilon(1e-14));
  CHECK(back.fins[0].axis_ratio == doctest::Approx(set.fins[0].axis_ratio).epsilon(1e-14));

  // pack(unpack(x)) reproduces the scaled vector.
  DesignVector again = pack_design(back, mask, bounds);
  CHECK((again.values - design.values).cwiseAbs().maxCoeff() < 1e-13);

  // Affine endpoints.
  DesignVector lo = design;
  lo.values.setZero();
  ComponentSet at_lb = unpack_design(lo, set);
  CHECK(at_lb.walls[0].half_length == doctest::Approx(bounds.wall_L_lb));
  DesignVector hi = design;
  hi.values.setOnes();
  ComponentSet at_ub = unpack_design(hi, set);
  CHECK(at_ub.walls[0].half_length == doctest::Approx(bounds.wall_L_ub));

  // Out-of-range scaled input clamps and records a warning.
  DesignVector bad = design;
  bad.values[0] = 1.2;
  std::vector<std::string> warnings;
  ComponentSet clamped = unpack_design(bad, set, &warnings);
  CHECK(clamped.walls[0].x0 == doctest::Approx(bounds.wall_x0_ub));
  CHECK(warnings.size() == 1);

  // Length mismatch is a configuration error.
  DesignVector broken = design;
  broken.values.resize(3);
  CHECK_THROWS_AS(unpack_design(broken, set), ConfigError);
}

TEST_CASE("component set JSON round trip") {
  ComponentSet set = two_component_set();
  set.fins.push_back({0.5, 0.5, 0.3, 0.9, 0.1, false});
  const std::string text = component_set_to_json(set);
  ComponentSet back = component_set_from_json(text);
  REQUIRE(back.walls.size() == set.walls.size());
  REQUIRE(back.fins.size() == set.fins.size());
  CHECK(back.projection.beta == set.projection.beta);
  CHECK(back.walls[0].angle == set.walls[0].angle);
  CHECK(back.fins[1].active == false);
  CHECK(component_set_to_json(back) == text);
}
