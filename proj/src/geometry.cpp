#include "coolopt/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

namespace coolopt {

namespace {

// Local (s, n) coordinates in a component frame rotated by `angle` about
// (cx, cy). s is the longitudinal axis, n the transverse one.
inline void local_coords(double cx, double cy, double angle, double x, double y,
                         double& s, double& n) {
  const double dx = x - cx;
  const double dy = y - cy;
  const double c = std::cos(angle);
  const double si = std::sin(angle);
  s = dx * c + dy * si;
  n = -dx * si + dy * c;
}

inline double pow6(double r) {
  const double r2 = r * r;
  return r2 * r2 * r2;
}

// d(projected)/d(phi) = -beta/2 * sech^2(beta*phi)
inline double project_tdf_dphi(double phi, double beta) {
  const double th = std::tanh(beta * phi);
  return -0.5 * beta * (1.0 - th * th);
}

}  // namespace

double wall_tdf(const WallComponent& w, double x, double y) {
  double s, n;
  local_coords(w.x0, w.y0, w.angle, x, y, s, n);
  return 1.0 - pow6(s / w.half_length) - pow6(n / w.half_thickness);
}

double fin_tdf(const FinComponent& f, double x, double y) {
  double s, n;
  local_coords(f.xf, f.yf, f.angle, x, y, s, n);
  const double a = f.semi_major;
  const double b = f.axis_ratio * a;
  return 1.0 - (s / a) * (s / a) - (n / b) * (n / b);
}

double project_tdf(double phi, const ProjectionParameters& proj) {
  return 0.5 * (1.0 - std::tanh(proj.beta * phi));
}

double gamma_at(const ComponentSet& set, double x, double y, ComponentMask mask) {
  double g = 1.0;
  if (mask != ComponentMask::fins_only) {
    for (const auto& w : set.walls) g *= project_tdf(wall_tdf(w, x, y), set.projection);
  }
  if (mask != ComponentMask::walls_only) {
    for (const auto& f : set.fins) {
      if (f.active) g *= project_tdf(fin_tdf(f, x, y), set.projection);
    }
  }
  return g;
}

namespace {

// Partial derivatives of a wall TDF with respect to its five fields,
// ordered as WallField.
void wall_tdf_partials(const WallComponent& w, double x, double y,
                       double out[5]) {
  const double c = std::cos(w.angle);
  const double si = std::sin(w.angle);
  const double dx = x - w.x0;
  const double dy = y - w.y0;
  const double s = dx * c + dy * si;
  const double n = -dx * si + dy * c;
  const double L = w.half_length;
  const double t = w.half_thickness;
  const double s5 = std::pow(s / L, 5);
  const double n5 = std::pow(n / t, 5);
  const double dphi_ds = -6.0 * s5 / L;
  const double dphi_dn = -6.0 * n5 / t;
  out[static_cast<int>(WallField::x0)] = dphi_ds * (-c) + dphi_dn * si;
  out[static_cast<int>(WallField::y0)] = dphi_ds * (-si) + dphi_dn * (-c);
  out[static_cast<int>(WallField::half_length)] = 6.0 * s5 * s / (L * L);
  out[static_cast<int>(WallField::half_thickness)] = 6.0 * n5 * n / (t * t);
  out[static_cast<int>(WallField::angle)] = dphi_ds * n - dphi_dn * s;
}

// Partial derivatives of a fin TDF with respect to (a, k, psi).
void fin_tdf_partials(const FinComponent& f, double x, double y, double out[3]) {
  const double c = std::cos(f.angle);
  const double si = std::sin(f.angle);
  const double dx = x - f.xf;
  const double dy = y - f.yf;
  const double s = dx * c + dy * si;
  const double n = -dx * si + dy * c;
  const double a = f.semi_major;
  const double k = f.axis_ratio;
  const double a2 = a * a;
  const double k2 = k * k;
  const double dphi_ds = -2.0 * s / a2;
  const double dphi_dn = -2.0 * n / (k2 * a2);
  out[static_cast<int>(FinField::semi_major)] =
      2.0 * s * s / (a2 * a) + 2.0 * n * n / (k2 * a2 * a);
  out[static_cast<int>(FinField::axis_ratio)] = 2.0 * n * n / (k2 * k * a2);
  out[static_cast<int>(FinField::angle)] = dphi_ds * n - dphi_dn * s;
}

double get_wall_field(const WallComponent& w, WallField f) {
  switch (f) {
    case WallField::x0: return w.x0;
    case WallField::y0: return w.y0;
    case WallField::half_length: return w.half_length;
    case WallField::half_thickness: return w.half_thickness;
    case WallField::angle: return w.angle;
  }
  return 0.0;
}

void set_wall_field(WallComponent& w, WallField f, double v) {
  switch (f) {
    case WallField::x0: w.x0 = v; break;
    case WallField::y0: w.y0 = v; break;
    case WallField::half_length: w.half_length = v; break;
    case WallField::half_thickness: w.half_thickness = v; break;
    case WallField::angle: w.angle = v; break;
  }
}

double get_fin_field(const FinComponent& f, FinField fd) {
  switch (fd) {
    case FinField::semi_major: return f.semi_major;
    case FinField::axis_ratio: return f.axis_ratio;
    case FinField::angle: return f.angle;
  }
  return 0.0;
}

void set_fin_field(FinComponent& f, FinField fd, double v) {
  switch (fd) {
    case FinField::semi_major: f.semi_major = v; break;
    case FinField::axis_ratio: f.axis_ratio = v; break;
    case FinField::angle: f.angle = v; break;
  }
}

double scale_to_unit(double v, double lb, double ub,
                     std::vector<std::string>* warnings, const char* what) {
  double x = (v - lb) / (ub - lb);
  if (x < 0.0 || x > 1.0) {
    if (warnings)
      warnings->push_back(std::string("pack: clamped out-of-bounds ") + what);
    x = std::clamp(x, 0.0, 1.0);
  }
  return x;
}

}  // namespace

DesignVector pack_design(const ComponentSet& set, const StageMask& mask,
                         const ComponentBounds& b,
                         std::vector<std::string>* warnings) {
  DesignVector dv;
  std::vector<double> vals;
  if (mask.walls) {
    for (int wi = 0; wi < static_cast<int>(set.walls.size()); ++wi) {
      const auto& w = set.walls[wi];
      const struct {
        WallField f;
        double lb, ub, v;
        const char* name;
      } fields[] = {
          {WallField::x0, b.wall_x0_lb, b.wall_x0_ub, w.x0, "wall x0"},
          {WallField::y0, b.wall_y0_lb, b.wall_y0_ub, w.y0, "wall y0"},
          {WallField::half_length, b.wall_L_lb, b.wall_L_ub, w.half_length, "wall L"},
          {WallField::half_thickness, b.wall_t_lb, b.wall_t_ub, w.half_thickness, "wall t"},
          {WallField::angle, b.wall_angle_lb, b.wall_angle_ub, w.angle, "wall angle"},
      };
      for (const auto& fd : fields) {
        if (!(fd.lb < fd.ub)) throw ConfigError("pack_design: bounds must satisfy lb < ub");
        dv.mapping.push_back({true, wi, static_cast<int>(fd.f), fd.lb, fd.ub});
        vals.push_back(scale_to_unit(fd.v, fd.lb, fd.ub, warnings, fd.name));
      }
    }
  }
  if (mask.fins) {
    for (int fi = 0; fi < static_cast<int>(set.fins.size()); ++fi) {
      const auto& f = set.fins[fi];
      if (!f.active) continue;
      const struct {
        FinField fd;
        double lb, ub, v;
        const char* name;
      } fields[] = {
          {FinField::semi_major, b.fin_a_lb, b.fin_a_ub, f.semi_major, "fin a"},
          {FinField::axis_ratio, b.fin_k_lb, b.fin_k_ub, f.axis_ratio, "fin k"},
          {FinField::angle, b.fin_angle_lb, b.fin_angle_ub, f.angle, "fin angle"},
      };
      for (const auto& fd : fields) {
        if (!(fd.lb < fd.ub)) throw ConfigError("pack_design: bounds must satisfy lb < ub");
        dv.mapping.push_back({false, fi, static_cast<int>(fd.fd), fd.lb, fd.ub});
        vals.push_back(scale_to_unit(fd.v, fd.lb, fd.ub, warnings, fd.name));
      }
    }
  }
  dv.values = Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<long>(vals.size()));
  return dv;
}

ComponentSet unpack_design(const DesignVector& design, const ComponentSet& set,
                           std::vector<std::string>* warnings) {
  if (design.values.size() != static_cast<long>(design.mapping.size()))
    throw ConfigError("unpack_design: value/mapping length mismatch");
  ComponentSet out = set;
  for (long i = 0; i < design.values.size(); ++i) {
    double x = design.values[i];
    if (x < 0.0 || x > 1.0) {
      if (warnings) warnings->push_back("unpack: clamped scaled value to [0,1]");
      x = std::clamp(x, 0.0, 1.0);
    }
    const VarRef& r = design.mapping[i];
    const double v = r.lb + x * (r.ub - r.lb);
    if (r.is_wall) {
      if (r.component >= static_cast<int>(out.walls.size()))
        throw ConfigError("unpack_design: wall index out of range");
      set_wall_field(out.walls[r.component], static_cast<WallField>(r.field), v);
    } else {
      if (r.component >= static_cast<int>(out.fins.size()))
        throw ConfigError("unpack_design: fin index out of range");
      set_fin_field(out.fins[r.component], static_cast<FinField>(r.field), v);
    }
  }
  return out;
}

void gamma_gradient_at(const ComponentSet& set, double x, double y,
                       ComponentMask mask, const DesignVector& design,
                       Eigen::Ref<Eigen::VectorXd> out) {
  out.setZero();
  const bool use_walls = mask != ComponentMask::fins_only;
  const bool use_fins = mask != ComponentMask::walls_only;
  const double beta = set.projection.beta;

  // Projected factors of every contributing component, walls first.
  const int nw = use_walls ? static_cast<int>(set.walls.size()) : 0;
  const int nf = use_fins ? static_cast<int>(set.fins.size()) : 0;
  std::vector<double> factor;
  std::vector<double> phi;
  factor.reserve(nw + nf);
  phi.reserve(nw + nf);
  std::vector<int> fin_slot(set.fins.size(), -1);
  for (int i = 0; i < nw; ++i) {
    phi.push_back(wall_tdf(set.walls[i], x, y));
    factor.push_back(project_tdf(phi.back(), set.projection));
  }
  if (use_fins) {
    for (int i = 0; i < static_cast<int>(set.fins.size()); ++i) {
      if (!set.fins[i].active) continue;
      fin_slot[i] = static_cast<int>(factor.size());
      phi.push_back(fin_tdf(set.fins[i], x, y));
      factor.push_back(project_tdf(phi.back(), set.projection));
    }
  }
  const int m = static_cast<int>(factor.size());
  if (m == 0) return;

  // Product of all factors except slot i, via prefix/suffix products.
  std::vector<double> prefix(m + 1, 1.0), suffix(m + 1, 1.0);
  for (int i = 0; i < m; ++i) prefix[i + 1] = prefix[i] * factor[i];
  for (int i = m - 1; i >= 0; --i) suffix[i] = suffix[i + 1] * factor[i];

  for (long v = 0; v < static_cast<long>(design.mapping.size()); ++v) {
    const VarRef& r = design.mapping[v];
    int slot = -1;
    double dphi_dfield = 0.0;
    if (r.is_wall) {
      if (!use_walls) continue;
      slot = r.component;
      double parts[5];
      wall_tdf_partials(set.walls[r.component], x, y, parts);
      dphi_dfield = parts[r.field];
    } else {
      if (!use_fins || !set.fins[r.component].active) continue;
      slot = fin_slot[r.component];
      if (slot < 0) continue;
      double parts[3];
      fin_tdf_partials(set.fins[r.component], x, y, parts);
      dphi_dfield = parts[r.field];
    }
    const double excl = prefix[slot] * suffix[slot + 1];
    const double dgamma_dphi = excl * project_tdf_dphi(phi[slot], beta);
    // Chain through the affine scaled->physical map.
    out[v] = dgamma_dphi * dphi_dfield * (r.ub - r.lb);
  }
}

ComponentSet prune_walls(const ComponentSet& set, double frac_threshold,
                         double domain_Lx, std::vector<std::string>* warnings) {
  if (!(frac_threshold > 0.0 && frac_threshold < 1.0))
    throw ConfigError("prune_walls: frac_threshold must lie in (0,1)");
  ComponentSet out = set;
  out.walls.clear();
  for (const auto& w : set.walls) {
    if (2.0 * w.half_length >= frac_threshold * domain_Lx) out.walls.push_back(w);
  }
  if (out.walls.empty() && !set.walls.empty() && warnings)
    warnings->push_back("prune_walls: all walls removed");
  return out;
}

double distance_to_wall(const WallComponent& w, double x, double y) {
  double s, n;
  local_coords(w.x0, w.y0, w.angle, x, y, s, n);
  const double ds = std::max(std::abs(s) - w.half_length, 0.0);
  const double dn = std::max(std::abs(n) - w.half_thickness, 0.0);
  return std::hypot(ds, dn);
}

ComponentSet prune_fins_near_walls(const ComponentSet& set, double d_min) {
  if (d_min < 0.0) throw ConfigError("prune_fins_near_walls: d_min must be >= 0");
  ComponentSet out = set;
  for (auto& f : out.fins) {
    if (!f.active) continue;
    for (const auto& w : out.walls) {
      if (distance_to_wall(w, f.xf, f.yf) < d_min) {
        f.active = false;
        break;
      }
    }
  }
  return out;
}

ComponentSet prune_small_fins(const ComponentSet& set, double a_min_keep) {
  if (!(a_min_keep > 0.0)) throw ConfigError("prune_small_fins: a_min_keep must be > 0");
  ComponentSet out = set;
  for (auto& f : out.fins) {
    if (f.active && f.semi_major < a_min_keep) f.active = false;
  }
  return out;
}

std::string component_set_to_json(const ComponentSet& set) {
  nlohmann::ordered_json j;
  j["projection"]["beta"] = set.projection.beta;
  j["walls"] = nlohmann::ordered_json::array();
  for (const auto& w : set.walls) {
    j["walls"].push_back({{"x0", w.x0},
                          {"y0", w.y0},
                          {"half_length", w.half_length},
                          {"half_thickness", w.half_thickness},
                          {"angle", w.angle}});
  }
  j["fins"] = nlohmann::ordered_json::array();
  for (const auto& f : set.fins) {
    j["fins"].push_back({{"xf", f.xf},
                         {"yf", f.yf},
                         {"semi_major", f.semi_major},
                         {"axis_ratio", f.axis_ratio},
                         {"angle", f.angle},
                         {"active", f.active}});
  }
  return j.dump(2) + "\n";
}

ComponentSet component_set_from_json(const std::string& text) {
  ComponentSet set;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("component set JSON parse error: ") + e.what());
  }
  set.projection.beta = j.at("projection").at("beta").get<double>();
  for (const auto& wj : j.at("walls")) {
    WallComponent w;
    w.x0 = wj.at("x0").get<double>();
    w.y0 = wj.at("y0").get<double>();
    w.half_length = wj.at("half_length").get<double>();
    w.half_thickness = wj.at("half_thickness").get<double>();
    w.angle = wj.at("angle").get<double>();
    set.walls.push_back(w);
  }
  for (const auto& fj : j.at("fins")) {
    FinComponent f;
    f.xf = fj.at("xf").get<double>();
    f.yf = fj.at("yf").get<double>();
    f.semi_major = fj.at("semi_major").get<double>();
    f.axis_ratio = fj.at("axis_ratio").get<double>();
    f.angle = fj.at("angle").get<double>();
    f.active = fj.at("active").get<bool>();
    set.fins.push_back(f);
  }
  return set;
}

}  // namespace coolopt
