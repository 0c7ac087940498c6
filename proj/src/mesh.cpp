#include "coolopt/mesh.hpp"

#include <algorithm>
#include <cmath>

namespace coolopt {

namespace {

bool span_is_vertical(Side s) { return s == Side::left || s == Side::right; }

void side_normal(Side s, double& nx, double& ny) {
  switch (s) {
    case Side::left: nx = -1.0; ny = 0.0; break;
    case Side::right: nx = 1.0; ny = 0.0; break;
    case Side::bottom: nx = 0.0; ny = -1.0; break;
    case Side::top: nx = 0.0; ny = 1.0; break;
  }
}

}  // namespace

std::vector<int> StructuredMesh::nodes_with_tag(EdgeTag tag) const {
  std::vector<char> seen(n_nodes(), 0);
  std::vector<int> out;
  for (const auto& e : boundary_edges) {
    if (e.tag != tag) continue;
    for (int n : {e.n0, e.n1}) {
      if (!seen[n]) {
        seen[n] = 1;
        out.push_back(n);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<char> StructuredMesh::boundary_node_mask() const {
  std::vector<char> mask(n_nodes(), 0);
  for (const auto& e : boundary_edges) mask[e.n0] = mask[e.n1] = 1;
  return mask;
}

std::vector<char> StructuredMesh::open_boundary_node_mask() const {
  std::vector<char> mask(n_nodes(), 0);
  for (const auto& e : boundary_edges) {
    if (e.tag != EdgeTag::wall) mask[e.n0] = mask[e.n1] = 1;
  }
  return mask;
}

StructuredMesh build_mesh(double Lx, double Ly, int nx, int ny,
                          const BoundarySpan& inlet, const BoundarySpan& outlet) {
  if (!(Lx > 0.0 && Ly > 0.0)) throw ConfigError("build_mesh: domain dimensions must be positive");
  if (nx < 1 || ny < 1) throw ConfigError("build_mesh: element counts must be >= 1");

  StructuredMesh m;
  m.Lx = Lx;
  m.Ly = Ly;
  m.nx = nx;
  m.ny = ny;
  m.hx = Lx / nx;
  m.hy = Ly / ny;

  const double eps = 1e-9 * std::max(Lx, Ly);
  auto span_extent = [&](const BoundarySpan& s) {
    return span_is_vertical(s.side) ? Ly : Lx;
  };
  for (const auto* s : {&inlet, &outlet}) {
    if (!(s->lo < s->hi)) throw ConfigError("build_mesh: span must have lo < hi");
    if (s->lo < -eps || s->hi > span_extent(*s) + eps)
      throw ConfigError("build_mesh: span extends outside the boundary");
  }
  if (inlet.side == outlet.side &&
      std::max(inlet.lo, outlet.lo) < std::min(inlet.hi, outlet.hi) - eps)
    throw ConfigError("build_mesh: inlet and outlet spans overlap");

  auto classify = [&](Side side, double c0, double c1) {
    auto inside = [&](const BoundarySpan& s) {
      return s.side == side && c0 >= s.lo - eps && c1 <= s.hi + eps;
    };
    if (inside(inlet)) return EdgeTag::inlet;
    if (inside(outlet)) return EdgeTag::outlet;
    return EdgeTag::wall;
  };

  auto add_edge = [&](Side side, int a, int b, double c0, double c1) {
    BoundaryEdge e;
    e.n0 = a;
    e.n1 = b;
    side_normal(side, e.nx, e.ny);
    e.tag = classify(side, std::min(c0, c1), std::max(c0, c1));
    m.boundary_edges.push_back(e);
  };

  for (int j = 0; j < ny; ++j) {
    add_edge(Side::left, m.node_id(0, j), m.node_id(0, j + 1), j * m.hy, (j + 1) * m.hy);
    add_edge(Side::right, m.node_id(nx, j), m.node_id(nx, j + 1), j * m.hy, (j + 1) * m.hy);
  }
  for (int i = 0; i < nx; ++i) {
    add_edge(Side::bottom, m.node_id(i, 0), m.node_id(i + 1, 0), i * m.hx, (i + 1) * m.hx);
    add_edge(Side::top, m.node_id(i, ny), m.node_id(i + 1, ny), i * m.hx, (i + 1) * m.hx);
  }

  if (m.nodes_with_tag(EdgeTag::inlet).empty())
    throw ConfigError("build_mesh: inlet span covers no element face");
  if (m.nodes_with_tag(EdgeTag::outlet).empty())
    throw ConfigError("build_mesh: outlet span covers no element face");
  return m;
}

QuadTable make_quad_table(const StructuredMesh& mesh) {
  QuadTable q;
  const double g = 1.0 / std::sqrt(3.0);
  const double xi[4] = {-g, g, g, -g};
  const double eta[4] = {-g, -g, g, g};
  for (int k = 0; k < 4; ++k) {
    const double x = xi[k], y = eta[k];
    q.N[k][0] = 0.25 * (1 - x) * (1 - y);
    q.N[k][1] = 0.25 * (1 + x) * (1 - y);
    q.N[k][2] = 0.25 * (1 + x) * (1 + y);
    q.N[k][3] = 0.25 * (1 - x) * (1 + y);
    const double dxi[4] = {-0.25 * (1 - y), 0.25 * (1 - y), 0.25 * (1 + y), -0.25 * (1 + y)};
    const double deta[4] = {-0.25 * (1 - x), -0.25 * (1 + x), 0.25 * (1 + x), 0.25 * (1 - x)};
    for (int a = 0; a < 4; ++a) {
      q.dNdx[k][a] = dxi[a] * 2.0 / mesh.hx;
      q.dNdy[k][a] = deta[a] * 2.0 / mesh.hy;
    }
    q.qx_off[k] = 0.5 * (1.0 + x) * mesh.hx;
    q.qy_off[k] = 0.5 * (1.0 + y) * mesh.hy;
  }
  q.wdetJ = mesh.hx * mesh.hy / 4.0;
  return q;
}

DofMap make_dof_map(int n_nodes, const std::vector<const FieldDirichlet*>& fields) {
  DofMap map;
  map.n_nodes = n_nodes;
  map.n_fields = static_cast<int>(fields.size());
  map.reduced.assign(map.n_full(), -1);
  map.dirichlet_value.assign(map.n_full(), 0.0);
  for (int f = 0; f < map.n_fields; ++f) {
    for (int n = 0; n < n_nodes; ++n) {
      const int fi = map.full_index(f, n);
      if (fields[f]->fixed[n]) {
        map.dirichlet_value[fi] = fields[f]->value[n];
      } else {
        map.reduced[fi] = static_cast<int>(map.full.size());
        map.full.push_back(fi);
      }
    }
  }
  return map;
}

}  // namespace coolopt
