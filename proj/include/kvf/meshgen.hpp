#pragma once

// Mesh generation for chart domains: structured grids on rectangles and a
// Delaunay triangulation (Bowyer-Watson) for curved polygonal domains,
// where the boundary arcs are resampled at equal arclength and the interior
// is seeded with a hexagonal point lattice clipped away from the boundary.

#include <algorithm>
#include <cmath>
#include <vector>

#include "kvf/core.hpp"
#include "kvf/mesh.hpp"
#include "kvf/surfaces.hpp"

namespace kvf {
namespace detail {

struct BoundarySample {
  std::vector<Vec2> points;  // closed polyline, points[i] -> points[i+1 mod n]
  std::vector<int> tags;     // tag of segment starting at points[i]
};

// Equal-arclength resampling of the arc chain; arc endpoints always kept.
inline BoundarySample sample_boundary(const ChartDomain& dom, double delta) {
  BoundarySample out;
  for (const auto& arc : dom.arcs) {
    const int fine = 256;
    std::vector<double> cum(fine + 1, 0.0);
    std::vector<Vec2> pts(fine + 1);
    for (int i = 0; i <= fine; ++i)
      pts[i] = arc.point(arc.t0 + (arc.t1 - arc.t0) * double(i) / fine);
    for (int i = 1; i <= fine; ++i) cum[i] = cum[i - 1] + norm(pts[i] - pts[i - 1]);
    const double len = cum[fine];
    const int nseg = std::max(1, int(std::lround(len / delta)));
    for (int s = 0; s < nseg; ++s) {
      const double target = len * double(s) / nseg;
      int i = 1;
      while (i < fine && cum[i] < target) ++i;
      const double w = cum[i] == cum[i - 1] ? 0.0 : (target - cum[i - 1]) / (cum[i] - cum[i - 1]);
      out.points.push_back(s == 0 ? pts[0] : pts[i - 1] + (pts[i] - pts[i - 1]) * w);
      out.tags.push_back(arc.tag);
    }
  }
  return out;
}

inline double polygon_area(const std::vector<Vec2>& p) {
  double a = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Vec2& q = p[(i + 1) % p.size()];
    a += p[i].x * q.y - q.x * p[i].y;
  }
  return 0.5 * a;
}

inline bool point_in_polygon(const std::vector<Vec2>& poly, const Vec2& p) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Vec2 &a = poly[i], &b = poly[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double xc = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
      if (p.x < xc) in = !in;
    }
  }
  return in;
}

inline double dist_to_polyline(const std::vector<Vec2>& poly, const Vec2& p) {
  double d2 = std::numeric_limits<double>::max();
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2 &a = poly[i], &b = poly[(i + 1) % poly.size()];
    const Vec2 ab = b - a;
    const double l2 = dot(ab, ab);
    double t = l2 > 0.0 ? dot(p - a, ab) / l2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const Vec2 c = a + ab * t;
    d2 = std::min(d2, dot(p - c, p - c));
  }
  return std::sqrt(d2);
}

// Plain Bowyer-Watson; the input point sets here are small and jittered
// enough that floating-point incircle tests are dependable.
inline std::vector<std::array<int, 3>> bowyer_watson(std::vector<Vec2> pts) {
  const int n = int(pts.size());
  Vec2 lo = pts[0], hi = pts[0];
  for (const Vec2& p : pts) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
  }
  const double span = std::max(hi.x - lo.x, hi.y - lo.y);
  const Vec2 mid = (lo + hi) * 0.5;
  pts.push_back({mid.x - 40.0 * span, mid.y - 20.0 * span});
  pts.push_back({mid.x + 40.0 * span, mid.y - 20.0 * span});
  pts.push_back({mid.x, mid.y + 40.0 * span});

  struct Tri {
    int a, b, c;
    Vec2 cc;
    double r2;
    bool dead = false;
  };
  const auto mk = [&](int a, int b, int c) {
    if (signed_area(pts[a], pts[b], pts[c]) < 0.0) std::swap(b, c);
    Tri t{a, b, c, {}, 0.0, false};
    const Vec2 A = pts[a], B = pts[b], C = pts[c];
    const double d = 2.0 * (A.x * (B.y - C.y) + B.x * (C.y - A.y) + C.x * (A.y - B.y));
    const double a2 = dot(A, A), b2 = dot(B, B), c2 = dot(C, C);
    t.cc = {(a2 * (B.y - C.y) + b2 * (C.y - A.y) + c2 * (A.y - B.y)) / d,
            (a2 * (C.x - B.x) + b2 * (A.x - C.x) + c2 * (B.x - A.x)) / d};
    t.r2 = dot(A - t.cc, A - t.cc);
    return t;
  };

  std::vector<Tri> tris{mk(n, n + 1, n + 2)};
  for (int p = 0; p < n; ++p) {
    std::vector<std::pair<int, int>> hull;
    const auto push_edge = [&](int a, int b) {
      for (auto& e : hull)
        if ((e.first == b && e.second == a) || (e.first == a && e.second == b)) {
          e.first = -1;
          return;
        }
      hull.push_back({a, b});
    };
    for (auto& t : tris) {
      if (t.dead) continue;
      const Vec2 d = pts[p] - t.cc;
      if (dot(d, d) < t.r2 * (1.0 + 1e-12)) {
        t.dead = true;
        push_edge(t.a, t.b);
        push_edge(t.b, t.c);
        push_edge(t.c, t.a);
      }
    }
    for (const auto& e : hull)
      if (e.first >= 0) tris.push_back(mk(e.first, e.second, p));
    if (tris.size() > 4096 && tris.size() % 2048 == 0) {
      std::vector<Tri> keep;
      for (const auto& t : tris)
        if (!t.dead) keep.push_back(t);
      tris = std::move(keep);
    }
  }
  std::vector<std::array<int, 3>> out;
  for (const auto& t : tris) {
    if (t.dead || t.a >= n || t.b >= n || t.c >= n) continue;
    out.push_back({t.a, t.b, t.c});
  }
  return out;
}

inline Triangulation triangulate_curved(const ChartDomain& dom, int target_tris) {
  if (dom.arcs.empty()) throw config_error("triangulate_curved: domain has no boundary arcs");

  // estimate area from a fine polygon to pick the point spacing
  BoundarySample fine = sample_boundary(dom, 1e-2);
  const double area = std::abs(polygon_area(fine.points));
  double delta = std::sqrt(4.0 * area / (std::sqrt(3.0) * std::max(1, target_tris)));

  for (int attempt = 0; attempt < 4; ++attempt, delta *= 0.97) {
    BoundarySample bnd = sample_boundary(dom, delta);
    const auto& poly = bnd.points;
    const int nb = int(poly.size());

    std::vector<Vec2> pts = poly;
    Vec2 lo = poly[0], hi = poly[0];
    for (const Vec2& p : poly) {
      lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
      hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
    }
    Rng rng(1234567);
    const double rowstep = delta * std::sqrt(3.0) / 2.0;
    int row = 0;
    for (double y = lo.y + 0.6 * delta; y < hi.y - 0.3 * delta; y += rowstep, ++row)
      for (double x = lo.x + 0.3 * delta + (row % 2 ? 0.5 * delta : 0.0); x < hi.x; x += delta) {
        Vec2 p{x + 1e-6 * delta * rng.symmetric(), y + 1e-6 * delta * rng.symmetric()};
        if (!point_in_polygon(poly, p)) continue;
        if (dist_to_polyline(poly, p) < 0.72 * delta) continue;
        pts.push_back(p);
      }

    std::vector<std::array<int, 3>> tris = bowyer_watson(pts);

    // keep triangles whose centroid is inside the domain
    std::vector<std::array<int, 3>> kept;
    for (const auto& t : tris) {
      const Vec2 c = (pts[t[0]] + pts[t[1]] + pts[t[2]]) * (1.0 / 3.0);
      if (point_in_polygon(poly, c)) kept.push_back(t);
    }

    // boundary conformity: every polyline segment must be a mesh edge
    std::vector<std::pair<int, int>> edges;
    for (const auto& t : kept)
      for (int e = 0; e < 3; ++e)
        edges.push_back({std::min(t[e], t[(e + 1) % 3]), std::max(t[e], t[(e + 1) % 3])});
    std::sort(edges.begin(), edges.end());
    bool conforming = true;
    for (int i = 0; i < nb && conforming; ++i) {
      const std::pair<int, int> want{std::min(i, (i + 1) % nb), std::max(i, (i + 1) % nb)};
      conforming = std::binary_search(edges.begin(), edges.end(), want);
    }
    if (!conforming) continue;

    Triangulation out;
    out.vertices = pts;
    out.triangles = kept;
    for (auto& t : out.triangles)
      if (signed_area(out.vertices[t[0]], out.vertices[t[1]], out.vertices[t[2]]) < 0.0)
        std::swap(t[1], t[2]);
    for (int i = 0; i < nb; ++i) out.boundary_edges.push_back({i, (i + 1) % nb, bnd.tags[i]});
    check_triangulation(out);
    return out;
  }
  throw numerical_error("triangulate_curved: could not recover a conforming boundary");
}

}  // namespace detail

// Structured rectangle grid or Delaunay fill of a curved domain with about
// 2 n^2 triangles, mirroring the rectangle count.
inline Triangulation generate_structured(const ChartDomain& domain, int n) {
  if (n < 1) throw config_error("generate_structured: n must be >= 1");
  if (domain.kind == ChartDomain::Kind::Rect) {
    if (domain.identification == Gluing::KleinFlip && n % 2 != 0)
      throw config_error("generate_structured: KleinFlip requires even n");
    return generate_structured_rect(domain, n);
  }
  return detail::triangulate_curved(domain, 2 * n * n);
}

}  // namespace kvf
