#pragma once

// Lagrange triangle elements of degree 1 and 2 on the reference triangle
// with barycentric coordinates (l1, l2, l3) = (1 - xi - eta, xi, eta).
// P2 local node order: vertices 0,1,2 then midpoints of edges (0,1), (1,2),
// (2,0).

#include <array>

#include "kvf/core.hpp"

namespace kvf {

enum class ElementType { P1, P2 };

inline const char* to_string(ElementType t) { return t == ElementType::P1 ? "P1" : "P2"; }

inline int nodes_per_element(ElementType t) { return t == ElementType::P1 ? 3 : 6; }

inline std::array<double, 3> local_node_bary(ElementType t, int k) {
  static const std::array<std::array<double, 3>, 6> bary = {{
      {1.0, 0.0, 0.0},
      {0.0, 1.0, 0.0},
      {0.0, 0.0, 1.0},
      {0.5, 0.5, 0.0},
      {0.0, 0.5, 0.5},
      {0.5, 0.0, 0.5},
  }};
  (void)t;
  return bary[k];
}

inline double shape_value(ElementType t, int k, double l1, double l2, double l3) {
  const double l[3] = {l1, l2, l3};
  if (t == ElementType::P1) return l[k];
  if (k < 3) return l[k] * (2.0 * l[k] - 1.0);
  const int i = k - 3, j = (k - 2) % 3;
  return 4.0 * l[i] * l[j];
}

// Gradient with respect to (xi, eta).
inline Vec2 shape_grad_ref(ElementType t, int k, double l1, double l2, double l3) {
  // dl/dxi = (-1, 1, 0), dl/deta = (-1, 0, 1)
  static const double dl_dxi[3] = {-1.0, 1.0, 0.0};
  static const double dl_deta[3] = {-1.0, 0.0, 1.0};
  const double l[3] = {l1, l2, l3};
  if (t == ElementType::P1) return {dl_dxi[k], dl_deta[k]};
  if (k < 3) {
    const double c = 4.0 * l[k] - 1.0;
    return {c * dl_dxi[k], c * dl_deta[k]};
  }
  const int i = k - 3, j = (k - 2) % 3;
  return {4.0 * (dl_dxi[i] * l[j] + l[i] * dl_dxi[j]),
          4.0 * (dl_deta[i] * l[j] + l[i] * dl_deta[j])};
}

}  // namespace kvf
