#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "coolopt/errors.hpp"

namespace coolopt {

/// Rectangular wall component: superelliptic (power-6) solid bar that routes
/// the global flow network. All lengths in meters, angle in radians.
/// half_length / half_thickness are semi-axes: the zero level set of the TDF
/// sits at |s| = half_length, |n| = half_thickness in the rotated frame.
struct WallComponent {
  double x0 = 0.0;
  double y0 = 0.0;
  double half_length = 0.0;
  double half_thickness = 0.0;
  double angle = 0.0;
};

/// Elliptical fin component with a fixed center; only size, aspect ratio and
/// orientation are design variables. Deactivated fins drop out of the
/// material field entirely.
struct FinComponent {
  double xf = 0.0;
  double yf = 0.0;
  double semi_major = 0.0;
  double axis_ratio = 1.0;  // semi-minor = axis_ratio * semi_major
  double angle = 0.0;
  bool active = true;
};

/// Sharpness of the tanh projection from TDF values to occupancy.
struct ProjectionParameters {
  double beta = 8.0;
};

struct ComponentSet {
  std::vector<WallComponent> walls;
  std::vector<FinComponent> fins;
  ProjectionParameters projection;
};

/// Selects which components contribute to the material field.
enum class ComponentMask { walls_only, fins_only, all };

// --- TDFs and projection -------------------------------------------------

/// Power-6 superellipse TDF: positive inside, zero on the boundary.
double wall_tdf(const WallComponent& w, double x, double y);

/// Ellipse TDF: 1 - (s/a)^2 - (n/(k a))^2 in the rotated frame.
double fin_tdf(const FinComponent& f, double x, double y);

/// tanh projection of a TDF value: ~0 deep inside a component (solid),
/// ~1 far outside (fluid), exactly 0.5 on the zero level set.
double project_tdf(double phi, const ProjectionParameters& proj);

/// Material field gamma(pt) = product of projected TDFs over the selected
/// active components. 1 = open fluid, 0 = solid.
double gamma_at(const ComponentSet& set, double x, double y, ComponentMask mask);

// --- Design vector --------------------------------------------------------

enum class WallField : int { x0 = 0, y0, half_length, half_thickness, angle };
enum class FinField : int { semi_major = 0, axis_ratio, angle };

/// One scaled design variable: which component field it drives and its
/// physical bounds. Scaled value 0 maps to lb, 1 to ub.
struct VarRef {
  bool is_wall = true;
  int component = 0;
  int field = 0;  // WallField or FinField, depending on is_wall
  double lb = 0.0;
  double ub = 1.0;
};

struct DesignVector {
  Eigen::VectorXd values;       // scaled, in [0,1]
  std::vector<VarRef> mapping;  // same length as values
};

/// Physical bounds per component field, used when building design vectors.
struct ComponentBounds {
  double wall_x0_lb, wall_x0_ub;
  double wall_y0_lb, wall_y0_ub;
  double wall_L_lb, wall_L_ub;
  double wall_t_lb, wall_t_ub;
  double wall_angle_lb, wall_angle_ub;
  double fin_a_lb, fin_a_ub;
  double fin_k_lb, fin_k_ub;
  double fin_angle_lb, fin_angle_ub;
};

/// Which component families enter the current stage's design vector.
struct StageMask {
  bool walls = false;
  bool fins = false;
};

/// Builds the scaled design vector for the masked, active components.
/// Physical values outside bounds are clamped into [0,1]; each clamp is
/// reported through `warnings` when non-null.
DesignVector pack_design(const ComponentSet& set, const StageMask& mask,
                         const ComponentBounds& bounds,
                         std::vector<std::string>* warnings = nullptr);

/// Writes scaled values back into a copy of `set`. Out-of-range scaled
/// values are clamped to [0,1] (recorded in `warnings`).
ComponentSet unpack_design(const DesignVector& design, const ComponentSet& set,
                           std::vector<std::string>* warnings = nullptr);

/// d(gamma)/d(scaled design variable) at one point, for every entry of
/// `design.mapping`. Entries owned by components excluded by `mask` (or by
/// inactive fins) are exactly zero. `out` must have design size.
void gamma_gradient_at(const ComponentSet& set, double x, double y,
                       ComponentMask mask, const DesignVector& design,
                       Eigen::Ref<Eigen::VectorXd> out);

// --- Pruning (framework Steps 3, 4, 6) ------------------------------------

/// Removes walls whose total length 2L falls below frac_threshold * Lx.
ComponentSet prune_walls(const ComponentSet& set, double frac_threshold,
                         double domain_Lx,
                         std::vector<std::string>* warnings = nullptr);

/// Deactivates fins whose center lies closer than d_min (exact Euclidean
/// distance) to any wall rectangle. Fins inside a wall are always removed.
ComponentSet prune_fins_near_walls(const ComponentSet& set, double d_min);

/// Deactivates fins with semi_major strictly below a_min_keep.
ComponentSet prune_small_fins(const ComponentSet& set, double a_min_keep);

/// Exact Euclidean distance from a point to a rotated solid rectangle with
/// half-extents (half_length, half_thickness). Zero inside.
double distance_to_wall(const WallComponent& w, double x, double y);

// --- Serialization ---------------------------------------------------------

std::string component_set_to_json(const ComponentSet& set);
ComponentSet component_set_from_json(const std::string& text);

}  // namespace coolopt
