#pragma once

// Degree-of-freedom layout for vector P1/P2 fields: mesh nodes (vertices,
// plus one node per edge for P2), node identification under the chart
// gluing, and the component-interleaved dof numbering on identified node
// classes.  Values at a mesh node are sign * value at its class
// representative; the sign is -1 on the first component for nodes matched
// across the orientation-reversing Klein seam.

#include <map>
#include <utility>
#include <vector>

#include "kvf/core.hpp"
#include "kvf/element.hpp"
#include "kvf/gluing.hpp"
#include "kvf/mesh.hpp"
#include "kvf/surfaces.hpp"

namespace kvf {

struct DofMap {
  ElementType element = ElementType::P1;
  std::vector<Vec2> node_pos;                 // vertices first, then edge nodes
  std::vector<std::array<int, 6>> elem_nodes; // first 3 used for P1
  PointIdentification id;                     // over nodes
  int n_nodes = 0;
  int n_vertex_nodes = 0;

  int n_dofs() const { return 2 * id.n_classes; }
  int dof(int node, int comp) const { return 2 * id.klass[node] + comp; }
  double sign(int node, int comp) const { return id.sign[node][comp]; }
  int nodes_per_elem() const { return nodes_per_element(element); }
};

inline DofMap build_dofmap(const Triangulation& tri, ElementType element,
                           const ChartDomain& domain, double tol = 1e-9) {
  DofMap dm;
  dm.element = element;
  dm.n_vertex_nodes = tri.n_vertices();
  dm.node_pos = tri.vertices;
  dm.elem_nodes.resize(tri.n_triangles());

  for (int t = 0; t < tri.n_triangles(); ++t)
    for (int k = 0; k < 3; ++k) dm.elem_nodes[t][k] = tri.triangles[t][k];

  if (element == ElementType::P2) {
    std::map<std::pair<int, int>, int> edge_node;
    for (int t = 0; t < tri.n_triangles(); ++t) {
      const auto& T = tri.triangles[t];
      for (int e = 0; e < 3; ++e) {
        int a = T[e], b = T[(e + 1) % 3];
        if (a > b) std::swap(a, b);
        auto [it, inserted] = edge_node.try_emplace({a, b}, int(dm.node_pos.size()));
        if (inserted) dm.node_pos.push_back((tri.vertices[a] + tri.vertices[b]) * 0.5);
        dm.elem_nodes[t][3 + e] = it->second;
      }
    }
  }
  dm.n_nodes = int(dm.node_pos.size());

  if (domain.identification != Gluing::None && domain.kind != ChartDomain::Kind::Rect)
    throw config_error("gluing requires a rectangular chart domain");
  dm.id = identify_points(dm.node_pos, domain.identification, domain.lo, domain.hi, tol);
  return dm;
}

}  // namespace kvf
