#pragma once

#include <Eigen/Dense>

#include "coolopt/geometry.hpp"
#include "coolopt/material.hpp"
#include "coolopt/mesh.hpp"

namespace coolopt {

/// Execution policy for element-level kernels. Both paths produce bitwise
/// identical results; the serial one is the reference used in tests and as
/// the benchmark baseline.
enum class Parallel { serial, openmp };

/// Per-quadrature-point material state for the current design, plus the
/// shared shape-function table. Rebuilt whenever the design changes.
struct QuadratureCache {
  QuadTable quad;
  PhysicalProperties props;
  RampParameters ramp;

  // n_elems x 4 arrays, one column per quadrature point.
  Eigen::ArrayXXd gamma;
  Eigen::ArrayXXd alpha, dalpha_dgamma;
  Eigen::ArrayXXd kt, dkt_dgamma;
  Eigen::ArrayXXd h, dh_dgamma;
  Eigen::ArrayXXd Ht, dHt_dgamma;

  int n_elems() const { return static_cast<int>(gamma.rows()); }
};

/// Evaluates gamma analytically at every quadrature point from the component
/// set (MMC mode) and caches the RAMP values and gamma-derivatives.
QuadratureCache evaluate_material_cache(const StructuredMesh& mesh,
                                        const ComponentSet& set,
                                        ComponentMask mask,
                                        const PhysicalProperties& props,
                                        const RampParameters& ramp,
                                        Parallel policy = Parallel::openmp);

/// Density-baseline variant: gamma is constant per element, taken from
/// `density` (one entry per element, clamped to [0,1]).
QuadratureCache evaluate_material_cache_density(const StructuredMesh& mesh,
                                                const Eigen::VectorXd& density,
                                                const PhysicalProperties& props,
                                                const RampParameters& ramp,
                                                Parallel policy = Parallel::openmp);

}  // namespace coolopt
