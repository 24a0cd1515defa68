#pragma once

// Error norms against analytic fields, best-approximation errors within a
// computed span, convergence-order fits, and the curvature integral identity
// used as a cross-check on the geometry and assembly.

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "kvf/assemble.hpp"
#include "kvf/geometry.hpp"
#include "kvf/mesh.hpp"
#include "kvf/metric.hpp"
#include "kvf/quadrature.hpp"
#include "kvf/surfaces.hpp"

namespace kvf {

enum class NormKind { L2, H1 };

// Uniform access to discrete and analytic fields at quadrature points:
// value and chart derivative at barycentric coordinates of element t.
using FieldSampler = std::function<FieldEval(int t, double l1, double l2, double l3, const Vec2& x)>;

inline FieldSampler make_sampler(const Triangulation& tri, const DofMap& dm,
                                 const DiscreteField& f) {
  return [&tri, &dm, &f](int t, double l1, double l2, double l3, const Vec2&) {
    return eval_on_element(tri, dm, f, t, l1, l2, l3);
  };
}

inline FieldSampler make_sampler(const AnalyticVectorField& f) {
  return [&f](int, double, double, double, const Vec2& x) {
    FieldEval e;
    e.value = f.u(x);
    e.du = f.du(x);
    return e;
  };
}

namespace detail {

// Quadrature of fn(x, eval...) over the mesh against the Riemannian density.
template <class Fn>
double integrate_fields(const Triangulation& tri, const MetricField& metric,
                        const std::vector<const FieldSampler*>& fields, Fn&& fn) {
  const auto& rule = triangle_rule_deg5();
  double acc = 0.0;
  std::vector<FieldEval> evals(fields.size());
  for (int t = 0; t < tri.n_triangles(); ++t) {
    const ElemGeom eg = elem_geom(tri, t);
    for (const auto& qp : rule) {
      const Vec2 x = eg.p0 * qp.l1 + eg.p1 * qp.l2 + eg.p2 * qp.l3;
      for (std::size_t i = 0; i < fields.size(); ++i)
        evals[i] = (*fields[i])(t, qp.l1, qp.l2, qp.l3, x);
      const Sym2 g = metric.eval(x);
      acc += qp.w * eg.area * std::sqrt(det(g)) * fn(x, g, evals);
    }
  }
  return acc;
}

inline double pair_integrand(const MetricField& metric, const Vec2& x, const Sym2& g,
                             const FieldEval& a, const FieldEval& b, NormKind kind) {
  double s = g(0, 0) * a.value.x * b.value.x + g(1, 1) * a.value.y * b.value.y +
             g(0, 1) * (a.value.x * b.value.y + a.value.y * b.value.x);
  if (kind == NormKind::H1) {
    const Christoffel gamma = christoffel(metric, x);
    const Mat2 ca = covariant_derivative(gamma, a.value, a.du);
    const Mat2 cb = covariant_derivative(gamma, b.value, b.du);
    s += tensor11_inner(g, inverse(g), ca, cb);
  }
  return s;
}

}  // namespace detail

inline double inner_product(const FieldSampler& a, const FieldSampler& b, const Triangulation& tri,
                            const MetricField& metric, NormKind kind) {
  return detail::integrate_fields(
      tri, metric, {&a, &b}, [&](const Vec2& x, const Sym2& g, const std::vector<FieldEval>& e) {
        return detail::pair_integrand(metric, x, g, e[0], e[1], kind);
      });
}

inline double l2_norm(const FieldSampler& f, const Triangulation& tri, const MetricField& metric) {
  return std::sqrt(std::max(0.0, inner_product(f, f, tri, metric, NormKind::L2)));
}

inline double h1_norm(const FieldSampler& f, const Triangulation& tri, const MetricField& metric) {
  return std::sqrt(std::max(0.0, inner_product(f, f, tri, metric, NormKind::H1)));
}

// Best relative approximation of each exact field within span(computed),
// coefficients from the Gram system, the residual integrated directly (no
// norm subtraction, so rounding-level errors are representable).
inline std::vector<double> subspace_error(const std::vector<FieldSampler>& computed,
                                          const std::vector<FieldSampler>& exact,
                                          const Triangulation& tri, const MetricField& metric,
                                          NormKind kind) {
  const int m = int(computed.size());
  if (m == 0 || exact.empty()) throw config_error("subspace_error: empty field list");

  std::vector<double> G(std::size_t(m) * m);
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j)
      G[std::size_t(i) * m + j] = G[std::size_t(j) * m + i] =
          inner_product(computed[i], computed[j], tri, metric, kind);

  // Cholesky with a relative rank guard.
  double dmax = 0.0;
  for (int i = 0; i < m; ++i) dmax = std::max(dmax, G[std::size_t(i) * m + i]);
  std::vector<double> L(G);
  for (int j = 0; j < m; ++j) {
    double s = L[std::size_t(j) * m + j];
    for (int k = 0; k < j; ++k) s -= L[std::size_t(j) * m + k] * L[std::size_t(j) * m + k];
    if (!(s > 1e-26 * dmax))
      throw degenerate_span_error("subspace_error: computed fields are numerically dependent");
    const double piv = std::sqrt(s);
    L[std::size_t(j) * m + j] = piv;
    for (int i = j + 1; i < m; ++i) {
      double t = L[std::size_t(i) * m + j];
      for (int k = 0; k < j; ++k) t -= L[std::size_t(i) * m + k] * L[std::size_t(j) * m + k];
      L[std::size_t(i) * m + j] = t / piv;
    }
  }

  std::vector<double> out;
  for (const auto& e : exact) {
    std::vector<double> c(m);
    for (int i = 0; i < m; ++i) c[i] = inner_product(computed[i], e, tri, metric, kind);
    for (int i = 0; i < m; ++i) {
      for (int k = 0; k < i; ++k) c[i] -= L[std::size_t(i) * m + k] * c[k];
      c[i] /= L[std::size_t(i) * m + i];
    }
    for (int i = m - 1; i >= 0; --i) {
      for (int k = i + 1; k < m; ++k) c[i] -= L[std::size_t(k) * m + i] * c[k];
      c[i] /= L[std::size_t(i) * m + i];
    }

    std::vector<const FieldSampler*> all{&e};
    for (const auto& u : computed) all.push_back(&u);
    const double resid2 = detail::integrate_fields(
        tri, metric, all, [&](const Vec2& x, const Sym2& g, const std::vector<FieldEval>& ev) {
          FieldEval r = ev[0];
          for (int i = 0; i < m; ++i) {
            r.value.x -= c[i] * ev[i + 1].value.x;
            r.value.y -= c[i] * ev[i + 1].value.y;
            for (int p = 0; p < 2; ++p)
              for (int q = 0; q < 2; ++q) r.du[p][q] -= c[i] * ev[i + 1].du[p][q];
          }
          return detail::pair_integrand(metric, x, g, r, r, kind);
        });
    const double en = inner_product(e, e, tri, metric, kind);
    if (!(en > 0.0)) throw degenerate_span_error("subspace_error: exact field has zero norm");
    out.push_back(std::sqrt(std::max(0.0, resid2) / en));
  }
  return out;
}

inline std::vector<double> subspace_error(const std::vector<DiscreteField>& computed,
                                          const std::vector<AnalyticVectorField>& exact,
                                          const Triangulation& tri, const DofMap& dm,
                                          const MetricField& metric, NormKind kind) {
  std::vector<FieldSampler> cs, es;
  for (const auto& f : computed) cs.push_back(make_sampler(tri, dm, f));
  for (const auto& f : exact) es.push_back(make_sampler(f));
  return subspace_error(cs, es, tri, metric, kind);
}

// Least-squares slope of log(err) against log(h).
struct OrderFit {
  double order = 0.0;
  bool saturated = false;  // all usable errors at rounding level
  int n_used = 0;
};

inline OrderFit fit_order(const std::vector<double>& hs, const std::vector<double>& errs) {
  if (hs.size() != errs.size()) throw config_error("fit_order: column length mismatch");
  std::vector<double> x, y;
  double emax = 0.0;
  for (std::size_t i = 0; i < hs.size(); ++i) {
    if (!(errs[i] > 0.0) || !(hs[i] > 0.0)) continue;
    x.push_back(std::log(hs[i]));
    y.push_back(std::log(errs[i]));
    emax = std::max(emax, errs[i]);
  }
  OrderFit fit;
  fit.n_used = int(x.size());
  if (fit.n_used < 4)
    throw insufficient_data_error("fit_order: fewer than 4 usable (h, err) rows");
  fit.saturated = emax < 1e-10;
  double xm = 0.0, ym = 0.0;
  for (int i = 0; i < fit.n_used; ++i) {
    xm += x[i];
    ym += y[i];
  }
  xm /= fit.n_used;
  ym /= fit.n_used;
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < fit.n_used; ++i) {
    sxx += (x[i] - xm) * (x[i] - xm);
    sxy += (x[i] - xm) * (y[i] - ym);
  }
  if (!(sxx > 0.0)) throw insufficient_data_error("fit_order: degenerate h values");
  fit.order = sxy / sxx;
  return fit;
}

struct ConvergenceRow {
  double h = 0.0;
  int ntri = 0;
  double eigenvalue = 0.0;
  double l2_rel = 0.0;
  double h1_rel = 0.0;
};

struct ConvergenceStudy {
  std::vector<ConvergenceRow> rows;  // sorted by decreasing h
  OrderFit eigenvalue_order, l2_order, h1_order;

  void fit() {
    std::vector<double> h, ev, l2, h1;
    for (const auto& r : rows) {
      h.push_back(r.h);
      ev.push_back(std::abs(r.eigenvalue));
      l2.push_back(r.l2_rel);
      h1.push_back(r.h1_rel);
    }
    eigenvalue_order = fit_order(h, ev);
    l2_order = fit_order(h, l2);
    h1_order = fit_order(h, h1);
  }
};

// Integral identity linking the covariant gradient energy of (conformal)
// Killing fields to the Ricci curvature term; in 2D Ri(u,u) = kappa g(u,u).
// The conformal variant's divergence coefficient (1 - 2/n) vanishes for
// n = 2, so both variants coincide on surfaces; the kind parameter keeps the
// general form explicit.
enum class IdentityKind { Killing, Conformal };

inline double ricci_identity_residual(const FieldSampler& f, const Triangulation& tri,
                                      const MetricField& metric, IdentityKind kind) {
  const FieldSampler* fp = &f;
  double lhs = 0.0, rhs = 0.0;
  lhs = detail::integrate_fields(
      tri, metric, {fp}, [&](const Vec2& x, const Sym2& g, const std::vector<FieldEval>& ev) {
        const Christoffel gamma = christoffel(metric, x);
        const Mat2 cd = covariant_derivative(gamma, ev[0].value, ev[0].du);
        double v = tensor11_inner(g, inverse(g), cd, cd);
        if (kind == IdentityKind::Conformal) {
          const double dv = trace(cd);
          v += (1.0 - 2.0 / metric.dim) * dv * dv;
        }
        return v;
      });
  rhs = detail::integrate_fields(
      tri, metric, {fp}, [&](const Vec2& x, const Sym2& g, const std::vector<FieldEval>& ev) {
        const double kappa = metric.kappa ? metric.kappa(x) : gaussian_curvature(metric, x);
        const Vec2 u = ev[0].value;
        return kappa * (g(0, 0) * u.x * u.x + 2.0 * g(0, 1) * u.x * u.y + g(1, 1) * u.y * u.y);
      });
  // Denominator floor scales with the field so that cases where both sides
  // vanish identically (flat metric, parallel field) report ~0 rather than
  // roundoff-over-roundoff.
  const double h1 = inner_product(f, f, tri, metric, NormKind::H1);
  return std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1e-12 * h1, 1e-30});
}

// Pointwise quarter-turn of a discrete field, re-interpolated nodally.
inline DiscreteField rotate_field(const DofMap& dm, const MetricField& metric,
                                  const DiscreteField& f) {
  DiscreteField out;
  out.dofs.assign(dm.n_dofs(), 0.0);
  for (int c = 0; c < dm.id.n_classes; ++c) {
    const int node = dm.id.representative[c];
    const Vec2 v = rotate_K(metric, dm.node_pos[node], field_value_at_node(dm, f, node));
    out.dofs[2 * c] = v.x;
    out.dofs[2 * c + 1] = v.y;
  }
  return out;
}

}  // namespace kvf
