#pragma once

#include <array>
#include <vector>

#include "coolopt/errors.hpp"

namespace coolopt {

enum class Side { left, right, bottom, top };

/// Coordinate range along one domain side, e.g. {left, 0.8*Ly, 0.95*Ly}.
struct BoundarySpan {
  Side side = Side::left;
  double lo = 0.0;
  double hi = 0.0;
};

enum class EdgeTag { wall = 0, inlet = 1, outlet = 2 };

/// One boundary element face: its two nodes (in edge order) and the outward
/// unit normal.
struct BoundaryEdge {
  int n0 = 0;
  int n1 = 0;
  double nx = 0.0;
  double ny = 0.0;
  EdgeTag tag = EdgeTag::wall;
};

/// Uniform quadrilateral grid on [0,Lx] x [0,Ly] with bilinear elements.
/// Node (i,j) sits at (i*hx, j*hy); element (i,j) has its lower-left corner
/// at node (i,j).
struct StructuredMesh {
  double Lx = 1.0, Ly = 1.0;
  int nx = 1, ny = 1;
  double hx = 1.0, hy = 1.0;
  std::vector<BoundaryEdge> boundary_edges;

  int n_nodes() const { return (nx + 1) * (ny + 1); }
  int n_elems() const { return nx * ny; }
  int node_id(int i, int j) const { return j * (nx + 1) + i; }
  double node_x(int n) const { return hx * (n % (nx + 1)); }
  double node_y(int n) const { return hy * (n / (nx + 1)); }

  /// Corner nodes of element e, counterclockwise from the lower-left.
  std::array<int, 4> elem_nodes(int e) const {
    const int i = e % nx;
    const int j = e / nx;
    const int n00 = node_id(i, j);
    return {n00, n00 + 1, n00 + nx + 2, n00 + nx + 1};
  }
  double elem_x0(int e) const { return hx * (e % nx); }
  double elem_y0(int e) const { return hy * (e / nx); }

  std::vector<int> nodes_with_tag(EdgeTag tag) const;
  std::vector<char> boundary_node_mask() const;
  /// True if the node belongs to at least one inlet or outlet edge.
  std::vector<char> open_boundary_node_mask() const;
};

/// Builds the uniform mesh and tags boundary edges from the inlet/outlet
/// spans. An edge is tagged when both its endpoints lie inside the span.
/// Overlapping or off-boundary spans raise ConfigError.
StructuredMesh build_mesh(double Lx, double Ly, int nx, int ny,
                          const BoundarySpan& inlet, const BoundarySpan& outlet);

/// 2x2 Gauss data for the shared reference element of a uniform mesh.
/// The same shape values and gradients apply to every element; only the
/// quadrature-point world positions differ by the element corner offset.
struct QuadTable {
  static constexpr int nq = 4;
  double N[nq][4];
  double dNdx[nq][4];
  double dNdy[nq][4];
  double qx_off[nq];  // qp offsets from the element lower-left corner
  double qy_off[nq];
  double wdetJ;  // equal weights on a uniform rectangle: hx*hy/4
};

QuadTable make_quad_table(const StructuredMesh& mesh);

/// Per-field Dirichlet mask and prescribed values over mesh nodes.
struct FieldDirichlet {
  std::vector<char> fixed;
  std::vector<double> value;

  explicit FieldDirichlet(int n_nodes = 0)
      : fixed(n_nodes, 0), value(n_nodes, 0.0) {}
  void set(int node, double v) {
    fixed[node] = 1;
    value[node] = v;
  }
  int count() const {
    int c = 0;
    for (char f : fixed) c += f;
    return c;
  }
};

/// Maps a block of stacked nodal fields onto reduced (free-dof) equation
/// numbers. Field k occupies full indices [k*n_nodes, (k+1)*n_nodes).
struct DofMap {
  int n_nodes = 0;
  int n_fields = 0;
  std::vector<int> reduced;    // full index -> reduced index, -1 when fixed
  std::vector<int> full;       // reduced index -> full index
  std::vector<double> dirichlet_value;  // full size, zero where free

  int n_full() const { return n_nodes * n_fields; }
  int n_free() const { return static_cast<int>(full.size()); }
  int full_index(int field, int node) const { return field * n_nodes + node; }
};

DofMap make_dof_map(int n_nodes, const std::vector<const FieldDirichlet*>& fields);

}  // namespace coolopt
