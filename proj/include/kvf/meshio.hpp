#pragma once

// Plain-text mesh files: header "ntri-mesh 1", vertex count and coordinates,
// triangle count and indices, then boundary edges until end of file.
// Coordinates are written with 17 significant digits so a write/read cycle
// reproduces the doubles bit for bit.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "kvf/core.hpp"
#include "kvf/mesh.hpp"

namespace kvf {

inline void write_mesh(std::ostream& os, const Triangulation& tri) {
  os << "ntri-mesh 1\n" << tri.n_vertices() << "\n";
  char buf[64];
  for (const Vec2& v : tri.vertices) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", v.x, v.y);
    os << buf;
  }
  os << tri.n_triangles() << "\n";
  for (const auto& t : tri.triangles) os << t[0] << " " << t[1] << " " << t[2] << "\n";
  for (const auto& e : tri.boundary_edges) os << e.a << " " << e.b << " " << e.tag << "\n";
}

inline void write_mesh(const std::string& path, const Triangulation& tri) {
  std::ofstream os(path);
  if (!os) throw io_error("write_mesh: cannot open " + path);
  write_mesh(os, tri);
  if (!os) throw io_error("write_mesh: write failed for " + path);
}

inline Triangulation read_mesh(std::istream& is) {
  std::string magic;
  int version = 0;
  if (!(is >> magic >> version) || magic != "ntri-mesh" || version != 1)
    throw io_error("read_mesh: not an ntri-mesh 1 file");
  int nv = 0;
  if (!(is >> nv) || nv < 0) throw io_error("read_mesh: bad vertex count");
  Triangulation tri;
  tri.vertices.resize(nv);
  for (auto& v : tri.vertices)
    if (!(is >> v.x >> v.y)) throw io_error("read_mesh: truncated vertex list");
  int nt = 0;
  if (!(is >> nt) || nt < 0) throw io_error("read_mesh: bad triangle count");
  tri.triangles.resize(nt);
  for (auto& t : tri.triangles) {
    if (!(is >> t[0] >> t[1] >> t[2])) throw io_error("read_mesh: truncated triangle list");
    for (int v : t)
      if (v < 0 || v >= nv) throw io_error("read_mesh: triangle index out of range");
  }
  BoundaryEdge e;
  while (is >> e.a >> e.b >> e.tag) {
    if (e.a < 0 || e.a >= nv || e.b < 0 || e.b >= nv)
      throw io_error("read_mesh: boundary edge index out of range");
    tri.boundary_edges.push_back(e);
  }
  return tri;
}

inline Triangulation read_mesh(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw io_error("read_mesh: cannot open " + path);
  return read_mesh(is);
}

}  // namespace kvf
