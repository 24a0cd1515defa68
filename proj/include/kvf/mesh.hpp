#pragma once

// Parameter-plane triangulations: generation on rectangles, Riemannian edge
// lengths, triangle quality, and structural validation.

#include <algorithm>
#include <map>
#include <utility>
#include <vector>

#include "kvf/core.hpp"
#include "kvf/metric.hpp"
#include "kvf/surfaces.hpp"

namespace kvf {

struct BoundaryEdge {
  int a = 0, b = 0;
  int tag = 0;
};

struct Triangulation {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;  // CCW
  std::vector<BoundaryEdge> boundary_edges;

  int n_vertices() const { return int(vertices.size()); }
  int n_triangles() const { return int(triangles.size()); }
};

inline double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x));
}

inline double triangle_area(const Triangulation& tri, int t) {
  const auto& T = tri.triangles[t];
  return signed_area(tri.vertices[T[0]], tri.vertices[T[1]], tri.vertices[T[2]]);
}

// Length of the straight parameter-plane segment [p,q] in the metric,
// 4-point Gauss-Legendre along the segment.
inline double riemannian_edge_length(const MetricField& metric, const Vec2& p, const Vec2& q) {
  static constexpr double node[2] = {0.3399810435848563, 0.8611363115940526};
  static constexpr double wt[2] = {0.6521451548625461, 0.3478548451374538};
  const Vec2 d = q - p;
  double len = 0.0;
  for (int s = 0; s < 2; ++s)
    for (int sign = -1; sign <= 1; sign += 2) {
      const double t = 0.5 + 0.5 * sign * node[s];
      const Sym2 g = metric.eval(p + d * t);
      len += 0.5 * wt[s] * std::sqrt(g.a11 * d.x * d.x + 2.0 * g.a12 * d.x * d.y +
                                     g.a22 * d.y * d.y);
    }
  return len;
}

// All undirected edges (a < b).
inline std::vector<std::pair<int, int>> collect_edges(const Triangulation& tri) {
  std::vector<std::pair<int, int>> edges;
  edges.reserve(tri.triangles.size() * 3);
  for (const auto& t : tri.triangles)
    for (int e = 0; e < 3; ++e) {
      int a = t[e], b = t[(e + 1) % 3];
      if (a > b) std::swap(a, b);
      edges.emplace_back(a, b);
    }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

struct EdgeLengthStats {
  double min = 0.0, max = 0.0, mean = 0.0, stddev = 0.0;
};

inline EdgeLengthStats riemannian_edge_stats(const Triangulation& tri, const MetricField& metric) {
  const auto edges = collect_edges(tri);
  if (edges.empty()) throw config_error("riemannian_edge_stats: empty mesh");
  EdgeLengthStats st;
  st.min = 1e300;
  double sum = 0.0, sum2 = 0.0;
  for (const auto& [a, b] : edges) {
    const double l = riemannian_edge_length(metric, tri.vertices[a], tri.vertices[b]);
    st.min = std::min(st.min, l);
    st.max = std::max(st.max, l);
    sum += l;
    sum2 += l * l;
  }
  const double n = double(edges.size());
  st.mean = sum / n;
  st.stddev = std::sqrt(std::max(0.0, sum2 / n - st.mean * st.mean));
  return st;
}

// Mesh size h = max Riemannian edge length; the abscissa of convergence fits.
inline double mesh_h(const Triangulation& tri, const MetricField& metric) {
  return riemannian_edge_stats(tri, metric).max;
}

// Quality 2 r_in / R_circ of the triangle as seen by the metric at its
// barycenter (1 for equilateral, -> 0 for degenerate).  The vertices are
// mapped by the transpose Cholesky factor of g so Euclidean formulas apply.
inline double triangle_quality(const MetricField& metric, const Vec2& a, const Vec2& b,
                               const Vec2& c) {
  const Vec2 bary = (a + b + c) * (1.0 / 3.0);
  const Sym2 g = metric.eval(bary);
  const double l11 = std::sqrt(g.a11);
  const double l21 = g.a12 / l11;
  const double l22 = std::sqrt(std::max(g.a22 - l21 * l21, 0.0));
  auto map = [&](const Vec2& p) { return Vec2{l11 * p.x + l21 * p.y, l22 * p.y}; };
  const Vec2 A = map(a), B = map(b), C = map(c);
  const double ea = norm(B - C), eb = norm(C - A), ec = norm(A - B);
  const double area = std::abs(signed_area(A, B, C));
  const double denom = ea * eb * ec * (ea + eb + ec);
  if (denom == 0.0) return 0.0;
  return 16.0 * area * area / denom;
}

inline double min_quality(const Triangulation& tri, const MetricField& metric) {
  double q = 1.0;
  for (const auto& t : tri.triangles)
    q = std::min(q, triangle_quality(metric, tri.vertices[t[0]], tri.vertices[t[1]],
                                     tri.vertices[t[2]]));
  return q;
}

// Structural checks: index ranges, positive orientation, edge-manifoldness,
// and agreement of the boundary_edges list with the triangle set.
inline void check_triangulation(const Triangulation& tri) {
  const int nv = tri.n_vertices();
  std::map<std::pair<int, int>, int> edge_count;
  for (const auto& t : tri.triangles) {
    for (int e = 0; e < 3; ++e) {
      if (t[e] < 0 || t[e] >= nv) throw numerical_error("triangle vertex index out of range");
      int a = t[e], b = t[(e + 1) % 3];
      if (a > b) std::swap(a, b);
      ++edge_count[{a, b}];
    }
    if (signed_area(tri.vertices[t[0]], tri.vertices[t[1]], tri.vertices[t[2]]) <= 0.0)
      throw numerical_error("triangle with non-positive area");
  }
  for (const auto& [e, c] : edge_count)
    if (c > 2) throw numerical_error("edge shared by more than two triangles");

  std::map<std::pair<int, int>, int> listed;
  for (const auto& be : tri.boundary_edges) {
    int a = be.a, b = be.b;
    if (a > b) std::swap(a, b);
    ++listed[{a, b}];
  }
  for (const auto& [e, c] : edge_count) {
    const bool on_boundary = (c == 1);
    const bool is_listed = listed.count(e) > 0;
    if (on_boundary != is_listed)
      throw numerical_error("boundary edge list disagrees with triangle incidence");
  }
  if (listed.size() != tri.boundary_edges.size())
    throw numerical_error("duplicate boundary edge entries");
}

inline double total_area(const Triangulation& tri) {
  double a = 0.0;
  for (int t = 0; t < tri.n_triangles(); ++t) a += triangle_area(tri, t);
  return a;
}

// Uniform n x n grid of squares, each split along the same diagonal.
// Boundary tags: 0 bottom, 1 right, 2 top, 3 left.
inline Triangulation generate_structured_rect(const ChartDomain& domain, int n) {
  if (n < 1) throw config_error("generate_structured: n must be >= 1");
  Triangulation tri;
  const Vec2 lo = domain.lo, hi = domain.hi;
  const double dx = (hi.x - lo.x) / n, dy = (hi.y - lo.y) / n;
  tri.vertices.reserve((n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      tri.vertices.push_back({lo.x + i * dx, lo.y + j * dy});

  auto vid = [n](int i, int j) { return j * (n + 1) + i; };
  tri.triangles.reserve(2 * n * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const int v00 = vid(i, j), v10 = vid(i + 1, j), v01 = vid(i, j + 1),
                v11 = vid(i + 1, j + 1);
      tri.triangles.push_back({v00, v10, v11});
      tri.triangles.push_back({v00, v11, v01});
    }

  for (int i = 0; i < n; ++i) {
    tri.boundary_edges.push_back({vid(i, 0), vid(i + 1, 0), 0});
    tri.boundary_edges.push_back({vid(n, i), vid(n, i + 1), 1});
    tri.boundary_edges.push_back({vid(i, n), vid(i + 1, n), 2});
    tri.boundary_edges.push_back({vid(0, i), vid(0, i + 1), 3});
  }
  return tri;
}

}  // namespace kvf
