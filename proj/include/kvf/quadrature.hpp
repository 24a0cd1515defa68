#pragma once

// Seven-point triangle rule, exact for polynomials of degree <= 5.
// Barycentric points; weights sum to 1 and are scaled by triangle area
// at the point of use.

#include <array>
#include <cmath>

namespace kvf {

struct QuadraturePoint {
  double l1, l2, l3, w;
};

inline const std::array<QuadraturePoint, 7>& triangle_rule_deg5() {
  static const std::array<QuadraturePoint, 7> rule = [] {
    const double s15 = std::sqrt(15.0);
    const double a = (6.0 + s15) / 21.0, wa = (155.0 + s15) / 1200.0;
    const double b = (6.0 - s15) / 21.0, wb = (155.0 - s15) / 1200.0;
    return std::array<QuadraturePoint, 7>{{
        {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 9.0 / 40.0},
        {a, a, 1.0 - 2.0 * a, wa},
        {a, 1.0 - 2.0 * a, a, wa},
        {1.0 - 2.0 * a, a, a, wa},
        {b, b, 1.0 - 2.0 * b, wb},
        {b, 1.0 - 2.0 * b, b, wb},
        {1.0 - 2.0 * b, b, b, wb},
    }};
  }();
  return rule;
}

}  // namespace kvf
