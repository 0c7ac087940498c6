#pragma once

namespace coolopt {

/// Fluid, solid and substrate properties (SI units).
struct PhysicalProperties {
  double rho = 1000.0;    // fluid density, kg/m^3
  double mu = 1e-3;       // dynamic viscosity, Pa s
  double cp = 4180.0;     // fluid heat capacity, J/(kg K)
  double k_f = 0.598;     // fluid conductivity, W/(m K)
  double k_s = 149.0;     // solid conductivity, W/(m K)
  double k_b = 149.0;     // substrate conductivity, W/(m K)
  double cp_s = 942.0;    // solid heat capacity, diagnostics only
  double H_b = 5e-4;      // substrate half-thickness, m
  double q0 = 1e5;        // bottom heat flux, W/m^2
};

/// RAMP interpolation endpoints and slopes for the gamma-dependent
/// effective properties.
struct RampParameters {
  double alpha_f = 0.0;  // inverse permeability at gamma=1, Pa s/m^2
  double alpha_s = 1e8;  // inverse permeability at gamma=0
  double q_f = 10.0;     // RAMP slope for alpha
  double q_k = 1.0;      // RAMP slope for k_t
  double h_f = 2000.0;   // interfacial coefficient at gamma=1, W/(m^2 K)
  double h_s = 10000.0;  // interfacial coefficient at gamma=0
  double Ht_f = 5e-4;    // upper-layer half-thickness at gamma=1, m
  double Ht_s = 5e-4;    // upper-layer half-thickness at gamma=0
  double q_h = 1.0;
  double q_H = 1.0;
};

/// Profile-shape coefficients of the depth-averaged two-layer model.
/// Fixed constants, never design-dependent.
struct TwoLayerConstants {
  static constexpr double c_mom = 6.0 / 7.0;
  static constexpr double c_adv = 2.0 / 3.0;
  static constexpr double c_cond = 49.0 / 52.0;
};

/// RAMP between end_solid (gamma=0) and end_fluid (gamma=1):
///   f(gamma) = end_fluid + (end_solid - end_fluid) (1-gamma)/(1+slope*gamma)
/// Generic over plain doubles and dual scalars.
template <class T>
T ramp_interp(const T& gamma, double end_fluid, double end_solid, double slope) {
  return end_fluid + (end_solid - end_fluid) * (1.0 - gamma) / (1.0 + slope * gamma);
}

inline double ramp_deriv(double gamma, double end_fluid, double end_solid,
                         double slope) {
  const double den = 1.0 + slope * gamma;
  return (end_solid - end_fluid) * (-(1.0 + slope)) / (den * den);
}

struct ValueGrad {
  double v;
  double dv;  // d(value)/d(gamma)
};

inline ValueGrad alpha_of(double gamma, const RampParameters& p) {
  return {ramp_interp(gamma, p.alpha_f, p.alpha_s, p.q_f),
          ramp_deriv(gamma, p.alpha_f, p.alpha_s, p.q_f)};
}

inline ValueGrad kt_of(double gamma, const RampParameters& p, double k_f, double k_s) {
  return {ramp_interp(gamma, k_f, k_s, p.q_k), ramp_deriv(gamma, k_f, k_s, p.q_k)};
}

inline ValueGrad h_of(double gamma, const RampParameters& p) {
  return {ramp_interp(gamma, p.h_f, p.h_s, p.q_h),
          ramp_deriv(gamma, p.h_f, p.h_s, p.q_h)};
}

inline ValueGrad Ht_of(double gamma, const RampParameters& p) {
  return {ramp_interp(gamma, p.Ht_f, p.Ht_s, p.q_H),
          ramp_deriv(gamma, p.Ht_f, p.Ht_s, p.q_H)};
}

}  // namespace coolopt
