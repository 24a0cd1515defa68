#pragma once

// Catalog of chart domains, metrics, and reference vector fields for the
// surfaces the toolkit ships with.

#include <functional>
#include <string>
#include <vector>

#include "kvf/core.hpp"
#include "kvf/metric.hpp"

namespace kvf {

enum class Gluing { None, PeriodicBoth, KleinFlip };

inline const char* to_string(Gluing g) {
  switch (g) {
    case Gluing::None: return "none";
    case Gluing::PeriodicBoth: return "periodic_both";
    default: return "klein_flip";
  }
}

struct BoundaryArc {
  std::function<Vec2(double)> point;
  double t0 = 0.0, t1 = 1.0;
  int tag = 0;
};

// Either an axis-aligned rectangle (optionally with a gluing of opposite
// sides) or a curved region bounded by parametric arcs.
struct ChartDomain {
  enum class Kind { Rect, Curved };
  Kind kind = Kind::Rect;
  Vec2 lo{0.0, 0.0}, hi{1.0, 1.0};
  std::vector<BoundaryArc> arcs;  // Curved only, ordered counterclockwise
  Gluing identification = Gluing::None;
};

struct AnalyticVectorField {
  std::string name;
  std::function<Vec2(const Vec2&)> u;
  std::function<Mat2(const Vec2&)> du;  // du[k][j] = d_j u^k
};

struct Manifold {
  std::string name;
  ChartDomain chart;
  MetricField metric;
  std::vector<AnalyticVectorField> known_killing;
  std::vector<AnalyticVectorField> known_conformal_killing;  // non-Killing members
};

// --- constructors ---------------------------------------------------------

inline Manifold flat_torus() {
  Manifold m;
  m.name = "flat_torus";
  m.chart.kind = ChartDomain::Kind::Rect;
  m.chart.lo = {0.0, 0.0};
  m.chart.hi = {2.0 * M_PI, 2.0 * M_PI};
  m.chart.identification = Gluing::PeriodicBoth;
  m.metric = euclidean_metric();

  AnalyticVectorField e1{"e1", [](const Vec2&) { return Vec2{1.0, 0.0}; },
                         [](const Vec2&) { return Mat2{}; }};
  AnalyticVectorField e2{"e2", [](const Vec2&) { return Vec2{0.0, 1.0}; },
                         [](const Vec2&) { return Mat2{}; }};
  m.known_killing = {e1, e2};
  return m;
}

// Generic surface of revolution with profile curve c(t) = (c1, c2): metric
// diag(c1'^2 + c2'^2, c1^2) on [0,2pi]^2 with both sides glued.  Second
// metric derivatives fall back to differences of dg since they would need
// c'''.
inline Manifold surface_of_revolution(std::function<double(double)> c1,
                                      [[maybe_unused]] std::function<double(double)> c2,
                                      std::function<double(double)> dc1,
                                      std::function<double(double)> dc2,
                                      std::function<double(double)> ddc1,
                                      std::function<double(double)> ddc2) {
  Manifold m;
  m.name = "surface_of_revolution";
  m.chart.kind = ChartDomain::Kind::Rect;
  m.chart.lo = {0.0, 0.0};
  m.chart.hi = {2.0 * M_PI, 2.0 * M_PI};
  m.chart.identification = Gluing::PeriodicBoth;

  m.metric.g = [=](const Vec2& x) {
    const double a = dc1(x.x), b = dc2(x.x), r = c1(x.x);
    return Sym2{a * a + b * b, 0.0, r * r};
  };
  m.metric.dg = [=](const Vec2& x) {
    const double a = dc1(x.x), b = dc2(x.x), da = ddc1(x.x), db = ddc2(x.x);
    const double r = c1(x.x), dr = dc1(x.x);
    std::array<Sym2, 2> out;
    out[0] = Sym2{2.0 * (a * da + b * db), 0.0, 2.0 * r * dr};
    out[1] = Sym2{};
    return out;
  };

  AnalyticVectorField rot{"rotation", [](const Vec2&) { return Vec2{0.0, 1.0}; },
                          [](const Vec2&) { return Mat2{}; }};
  m.known_killing = {rot};

  // Quarter-turn partner of the rotation field: (c1/|c'|, 0).
  AnalyticVectorField q;
  q.name = "rotation_quarter_turn";
  q.u = [=](const Vec2& x) {
    const double a = dc1(x.x), b = dc2(x.x);
    return Vec2{c1(x.x) / std::sqrt(a * a + b * b), 0.0};
  };
  q.du = [=](const Vec2& x) {
    const double a = dc1(x.x), b = dc2(x.x), da = ddc1(x.x), db = ddc2(x.x);
    const double s = std::sqrt(a * a + b * b);
    Mat2 d;
    d[0][0] = dc1(x.x) / s - c1(x.x) * (a * da + b * db) / (s * s * s);
    return d;
  };
  m.known_conformal_killing = {q};
  return m;
}

// Torus of revolution with profile (2 + cos t, sin t); the profile is unit
// speed, so g = diag(1, (2 + cos x1)^2).
inline Manifold standard_torus() {
  Manifold m = surface_of_revolution([](double t) { return 2.0 + std::cos(t); },
                                     [](double t) { return std::sin(t); },
                                     [](double t) { return -std::sin(t); },
                                     [](double t) { return std::cos(t); },
                                     [](double t) { return -std::cos(t); },
                                     [](double t) { return -std::sin(t); });
  m.name = "standard_torus";
  m.metric.d2g = [](const Vec2& x) {
    const double f = 2.0 + std::cos(x.x), s = std::sin(x.x), c = std::cos(x.x);
    std::array<std::array<Sym2, 2>, 2> out{};
    out[0][0] = Sym2{0.0, 0.0, 2.0 * (s * s - f * c)};
    return out;
  };
  m.metric.kappa = [](const Vec2& x) { return std::cos(x.x) / (2.0 + std::cos(x.x)); };
  m.known_conformal_killing[0].name = "conformal_partner";
  return m;
}

// Klein bottle chart: g = dx1^2 + (1/4)(3 cos^2 x1 + 16 cos x1 + 17) dx2^2 on
// [0,2pi]^2 with (0,x2) ~ (2pi,x2) and the orientation-reversing
// (x1,0) ~ (2pi - x1, 2pi), under which (u1,u2) -> (-u1,u2).
inline Manifold klein_bottle() {
  auto a = [](double t) {
    const double c = std::cos(t);
    return 3.0 * c * c + 16.0 * c + 17.0;
  };
  auto da = [](double t) { return -std::sin(t) * (6.0 * std::cos(t) + 16.0); };
  auto dda = [](double t) {
    const double c = std::cos(t), s = std::sin(t);
    return -c * (6.0 * c + 16.0) + 6.0 * s * s;
  };

  Manifold m;
  m.name = "klein_bottle";
  m.chart.kind = ChartDomain::Kind::Rect;
  m.chart.lo = {0.0, 0.0};
  m.chart.hi = {2.0 * M_PI, 2.0 * M_PI};
  m.chart.identification = Gluing::KleinFlip;

  m.metric.g = [=](const Vec2& x) { return Sym2{1.0, 0.0, 0.25 * a(x.x)}; };
  m.metric.dg = [=](const Vec2& x) {
    std::array<Sym2, 2> out;
    out[0] = Sym2{0.0, 0.0, 0.25 * da(x.x)};
    out[1] = Sym2{};
    return out;
  };
  m.metric.d2g = [=](const Vec2& x) {
    std::array<std::array<Sym2, 2>, 2> out{};
    out[0][0] = Sym2{0.0, 0.0, 0.25 * dda(x.x)};
    return out;
  };
  m.metric.kappa = [=](const Vec2& x) {
    const double av = a(x.x), d1 = da(x.x), d2 = dda(x.x);
    return -(2.0 * av * d2 - d1 * d1) / (4.0 * av * av);
  };

  AnalyticVectorField rot{"rotation", [](const Vec2&) { return Vec2{0.0, 1.0}; },
                          [](const Vec2&) { return Mat2{}; }};
  m.known_killing = {rot};

  AnalyticVectorField q;
  q.name = "conformal_partner";
  q.u = [=](const Vec2& x) { return Vec2{-0.5 * std::sqrt(a(x.x)), 0.0}; };
  q.du = [=](const Vec2& x) {
    Mat2 d;
    d[0][0] = -0.25 * da(x.x) / std::sqrt(a(x.x));
    return d;
  };
  m.known_conformal_killing = {q};
  return m;
}

// Enneper patch in isothermal coordinates: g = (1 + |x|^2)^2 I on a curved
// hexagonal-ish domain bounded by six arcs.
inline Manifold enneper() {
  Manifold m;
  m.name = "enneper";
  m.chart.kind = ChartDomain::Kind::Curved;
  m.chart.identification = Gluing::None;

  const double pi = M_PI;
  m.chart.arcs = {
      {[](double t) { return Vec2{0.5 * (std::cos(t) + 1.0), std::sin(t)}; }, 0.0, pi / 2, 1},
      {[](double t) { return Vec2{0.5 - t, 1.0}; }, 0.0, 0.5, 2},
      {[](double t) { return Vec2{std::cos(t), std::sin(t)}; }, pi / 2, pi, 3},
      {[](double t) { return Vec2{-0.5 * (std::cos(t) + 1.0), -std::sin(t)}; }, 0.0, pi / 2, 4},
      {[](double t) { return Vec2{t, -1.0}; }, -0.5, 0.0, 5},
      {[](double t) { return Vec2{std::cos(t), std::sin(t)}; }, 3 * pi / 2, 2 * pi, 6},
  };
  m.chart.lo = {-1.0, -1.0};
  m.chart.hi = {1.0, 1.0};

  m.metric.g = [](const Vec2& x) {
    const double e = 1.0 + x.x * x.x + x.y * x.y;
    return Sym2{e * e, 0.0, e * e};
  };
  m.metric.dg = [](const Vec2& x) {
    const double e = 1.0 + x.x * x.x + x.y * x.y;
    std::array<Sym2, 2> out;
    out[0] = Sym2{4.0 * x.x * e, 0.0, 4.0 * x.x * e};
    out[1] = Sym2{4.0 * x.y * e, 0.0, 4.0 * x.y * e};
    return out;
  };
  m.metric.d2g = [](const Vec2& x) {
    const double e = 1.0 + x.x * x.x + x.y * x.y;
    auto comp = [&](int k, int l) {
      const double xk = (k == 0) ? x.x : x.y, xl = (l == 0) ? x.x : x.y;
      double v = 8.0 * xk * xl;
      if (k == l) v += 4.0 * e;
      return Sym2{v, 0.0, v};
    };
    std::array<std::array<Sym2, 2>, 2> out;
    for (int k = 0; k < 2; ++k)
      for (int l = 0; l < 2; ++l) out[k][l] = comp(k, l);
    return out;
  };
  m.metric.kappa = [](const Vec2& x) {
    const double e = 1.0 + x.x * x.x + x.y * x.y;
    return -4.0 / (e * e * e * e);
  };

  AnalyticVectorField rot{"rotation", [](const Vec2& x) { return Vec2{-x.y, x.x}; },
                          [](const Vec2&) {
                            Mat2 d;
                            d[0][1] = -1.0;
                            d[1][0] = 1.0;
                            return d;
                          }};
  m.known_killing = {rot};
  return m;
}

inline Manifold catalog(const std::string& name) {
  if (name == "flat_torus") return flat_torus();
  if (name == "standard_torus") return standard_torus();
  if (name == "klein_bottle") return klein_bottle();
  if (name == "enneper") return enneper();
  throw config_error("unknown manifold '" + name +
                     "' (expected flat_torus, standard_torus, klein_bottle, or enneper)");
}

}  // namespace kvf
