#pragma once

// Riemannian metric given in one coordinate chart: closed-form components
// plus their first (and optionally second) partial derivatives.

#include <functional>
#include <optional>
#include <string>

#include "kvf/core.hpp"

namespace kvf {

// dg[k] holds the partial derivative of every metric component with respect
// to coordinate k.  d2g(k,l) likewise holds the mixed second partials; when
// absent it is generated by central differences of dg.
struct MetricField {
  int dim = 2;
  std::function<Sym2(const Vec2&)> g;
  std::function<std::array<Sym2, 2>(const Vec2&)> dg;
  std::function<std::array<std::array<Sym2, 2>, 2>(const Vec2&)> d2g;  // may be null
  std::function<double(const Vec2&)> kappa;                            // may be null

  Sym2 eval(const Vec2& x) const {
    const Sym2 m = g(x);
    if (!(det(m) > 0.0) || !(m.a11 > 0.0))
      throw degenerate_metric_error("metric not positive definite at (" + std::to_string(x.x) +
                                    ", " + std::to_string(x.y) + ")");
    return m;
  }

  std::array<Sym2, 2> deriv(const Vec2& x) const {
    if (dg) return dg(x);
    return fd_dg(x);
  }

  std::array<std::array<Sym2, 2>, 2> deriv2(const Vec2& x) const {
    if (d2g) return d2g(x);
    constexpr double h = 1e-5;
    std::array<std::array<Sym2, 2>, 2> out;
    for (int l = 0; l < 2; ++l) {
      Vec2 p = x, m = x;
      p[l] += h;
      m[l] -= h;
      const auto dp = deriv(p), dm = deriv(m);
      for (int k = 0; k < 2; ++k) out[k][l] = (dp[k] - dm[k]) * (0.5 / h);
    }
    // Symmetrize the mixed partials; the two difference estimates coincide
    // only up to truncation error.
    const Sym2 mixed = (out[0][1] + out[1][0]) * 0.5;
    out[0][1] = mixed;
    out[1][0] = mixed;
    return out;
  }

  std::array<Sym2, 2> fd_dg(const Vec2& x, double h = 1e-6) const {
    std::array<Sym2, 2> out;
    for (int k = 0; k < 2; ++k) {
      Vec2 p = x, m = x;
      p[k] += h;
      m[k] -= h;
      out[k] = (g(p) - g(m)) * (0.5 / h);
    }
    return out;
  }
};

inline MetricField euclidean_metric() {
  MetricField f;
  f.g = [](const Vec2&) { return Sym2{1.0, 0.0, 1.0}; };
  f.dg = [](const Vec2&) { return std::array<Sym2, 2>{Sym2{}, Sym2{}}; };
  f.d2g = [](const Vec2&) {
    return std::array<std::array<Sym2, 2>, 2>{{{Sym2{}, Sym2{}}, {Sym2{}, Sym2{}}}};
  };
  f.kappa = [](const Vec2&) { return 0.0; };
  return f;
}

}  // namespace kvf
