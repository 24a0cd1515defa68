#pragma once

// Legacy ASCII VTK export of the parameter-plane mesh with vector point
// data. P1 fields go out on the mesh as is; P2 fields are written on the
// four-way split whose vertices are exactly the P2 nodes, so no resampling
// happens.

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "kvf/assemble.hpp"
#include "kvf/dofmap.hpp"

namespace kvf {

struct NamedField {
  std::string name;
  const DiscreteField* field = nullptr;
};

inline void write_vtk(std::ostream& os, const Triangulation& tri, const DofMap& dm,
                      const std::vector<NamedField>& fields) {
  std::vector<std::array<int, 3>> cells;
  if (dm.element == ElementType::P1) {
    cells = tri.triangles;
  } else {
    cells.reserve(4 * tri.n_triangles());
    for (const auto& en : dm.elem_nodes) {
      cells.push_back({en[0], en[3], en[5]});
      cells.push_back({en[3], en[1], en[4]});
      cells.push_back({en[5], en[4], en[2]});
      cells.push_back({en[3], en[4], en[5]});
    }
  }

  os << "# vtk DataFile Version 3.0\n";
  os << "vector fields on the chart\n";
  os << "ASCII\n";
  os << "DATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << dm.n_nodes << " double\n";
  char buf[96];
  for (int i = 0; i < dm.n_nodes; ++i) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g 0\n", dm.node_pos[i].x, dm.node_pos[i].y);
    os << buf;
  }
  os << "CELLS " << cells.size() << " " << 4 * cells.size() << "\n";
  for (const auto& c : cells) os << "3 " << c[0] << " " << c[1] << " " << c[2] << "\n";
  os << "CELL_TYPES " << cells.size() << "\n";
  for (std::size_t i = 0; i < cells.size(); ++i) os << "5\n";

  if (fields.empty()) return;
  os << "POINT_DATA " << dm.n_nodes << "\n";
  for (const auto& nf : fields) {
    os << "VECTORS " << nf.name << " double\n";
    for (int i = 0; i < dm.n_nodes; ++i) {
      const Vec2 v = field_value_at_node(dm, *nf.field, i);
      std::snprintf(buf, sizeof buf, "%.17g %.17g 0\n", v.x, v.y);
      os << buf;
    }
  }
}

inline void write_vtk(const std::string& path, const Triangulation& tri, const DofMap& dm,
                      const std::vector<NamedField>& fields) {
  std::ofstream os(path);
  if (!os) throw io_error("write_vtk: cannot open " + path);
  write_vtk(os, tri, dm, fields);
  if (!os) throw io_error("write_vtk: write failed for " + path);
}

}  // namespace kvf
