#pragma once

// Identification of mesh nodes under the side gluings of a rectangular
// chart: plain double periodicity, or the Klein-bottle gluing where the top
// side is matched to the bottom side reversed and the first vector component
// flips sign across the seam.

#include <string>
#include <vector>

#include "kvf/core.hpp"
#include "kvf/mesh.hpp"
#include "kvf/surfaces.hpp"

namespace kvf {

struct PointIdentification {
  std::vector<int> klass;                    // node -> class id
  std::vector<std::array<double, 2>> sign;   // value(node) = sign * value(representative)
  std::vector<int> representative;           // class -> node at the canonical position
  int n_classes = 0;
};

namespace detail {

struct Canonical {
  Vec2 p;
  double s1 = 1.0, s2 = 1.0;
  bool folded = false;
};

inline Canonical canonicalize(const Vec2& x, Gluing gluing, const Vec2& lo, const Vec2& hi,
                              double tol) {
  Canonical c{x, 1.0, 1.0, false};
  if (gluing == Gluing::None) return c;
  if (std::abs(c.p.y - hi.y) <= tol) {  // top seam -> bottom seam
    if (gluing == Gluing::KleinFlip) {
      c.p.x = lo.x + hi.x - c.p.x;
      c.s1 = -c.s1;
    }
    c.p.y = lo.y;
    c.folded = true;
  }
  if (std::abs(c.p.x - hi.x) <= tol) {  // right seam -> left seam
    c.p.x = lo.x;
    c.folded = true;
  }
  return c;
}

}  // namespace detail

// Groups points whose canonical positions coincide (within tol).  Every
// class must contain a member sitting at the canonical position itself;
// a folded point without such a partner is a gluing mismatch.
inline PointIdentification identify_points(const std::vector<Vec2>& points, Gluing gluing,
                                           const Vec2& lo, const Vec2& hi, double tol = 1e-9) {
  const int n = int(points.size());
  std::vector<detail::Canonical> canon(n);
  for (int i = 0; i < n; ++i) canon[i] = detail::canonicalize(points[i], gluing, lo, hi, tol);

  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (canon[a].p.x != canon[b].p.x) return canon[a].p.x < canon[b].p.x;
    return canon[a].p.y < canon[b].p.y;
  });

  PointIdentification id;
  id.klass.assign(n, -1);
  id.sign.assign(n, {1.0, 1.0});

  // Union points whose canonical positions agree within tol. A plain
  // consecutive scan is not enough: canonical x values that differ only in
  // the last bits can have whole columns of unrelated points sorted between
  // them, so sweep a tol-wide window in x and match y pairwise.
  std::vector<int> parent(n);
  for (int i = 0; i < n; ++i) parent[i] = i;
  auto find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (int k = 0; k < n; ++k) {
    const int i = order[k];
    for (int l = k - 1; l >= 0 && canon[i].p.x - canon[order[l]].p.x <= tol; --l) {
      const int j = order[l];
      if (std::abs(canon[i].p.y - canon[j].p.y) <= tol) parent[find(i)] = find(j);
    }
  }

  std::vector<std::vector<int>> groups;
  {
    std::vector<int> group_of(n, -1);
    for (int i = 0; i < n; ++i) {  // numbered by smallest member, deterministic
      const int r = find(i);
      if (group_of[r] < 0) {
        group_of[r] = int(groups.size());
        groups.push_back({});
      }
      groups[group_of[r]].push_back(i);
    }
  }

  for (const auto& grp : groups) {
    int rep = -1;
    for (int i : grp)
      if (!canon[i].folded) rep = (rep < 0 || i < rep) ? i : rep;
    if (rep < 0)
      throw gluing_mismatch_error(
          "node " + std::to_string(grp.front()) + " at (" + std::to_string(points[grp.front()].x) +
          ", " + std::to_string(points[grp.front()].y) +
          ") has no partner at its canonical position");
    const int cid = id.n_classes++;
    id.representative.push_back(rep);
    for (int i : grp) {
      id.klass[i] = cid;
      id.sign[i] = {canon[i].s1, canon[i].s2};
    }
  }
  return id;
}

// Identification of the vertices of a triangulation over the chart
// rectangle.  Gluing::None yields the identity map.
inline PointIdentification identify(const Triangulation& tri, const ChartDomain& domain,
                                    double tol = 1e-9) {
  if (domain.identification != Gluing::None && domain.kind != ChartDomain::Kind::Rect)
    throw config_error("gluing requires a rectangular chart domain");
  return identify_points(tri.vertices, domain.identification, domain.lo, domain.hi, tol);
}

}  // namespace kvf
