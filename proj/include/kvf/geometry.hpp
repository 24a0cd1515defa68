#pragma once

// Pointwise differential geometry in a 2D chart: Christoffel symbols,
// covariant derivatives, the Killing/conformal-Killing operators, Gaussian
// curvature, the quarter-turn rotation operator, and the curvature-based
// count of independent local Killing fields.

#include <algorithm>
#include <vector>

#include "kvf/core.hpp"
#include "kvf/metric.hpp"

namespace kvf {

// christoffel(metric, x)[k][i][j] = Gamma^k_{ij}
//   = 1/2 g^{kl} (d_i g_{jl} + d_j g_{il} - d_l g_{ij}).
using Christoffel = std::array<Mat2, 2>;

inline Christoffel christoffel(const MetricField& metric, const Vec2& x) {
  const Sym2 g = metric.eval(x);
  const Sym2 ginv = inverse(g);
  const auto dgv = metric.deriv(x);
  auto dg = [&](int i, int j, int k) { return dgv[k](i, j); };  // d_k g_{ij}

  Christoffel gamma;
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        double s = 0.0;
        for (int l = 0; l < 2; ++l)
          s += ginv(k, l) * (dg(j, l, i) + dg(i, l, j) - dg(i, j, l));
        gamma[k][i][j] = 0.5 * s;
      }
  return gamma;
}

// Covariant derivative of a vector field as the (1,1) tensor
// (Du)^k_j = d_j u^k + Gamma^k_{ij} u^i, returned with row = upper index k,
// column = lower index j.  du[k][j] must hold d_j u^k.
inline Mat2 covariant_derivative(const Christoffel& gamma, const Vec2& u, const Mat2& du) {
  Mat2 r;
  for (int k = 0; k < 2; ++k)
    for (int j = 0; j < 2; ++j)
      r[k][j] = du[k][j] + gamma[k][0][j] * u.x + gamma[k][1][j] * u.y;
  return r;
}

inline Mat2 covariant_derivative(const MetricField& metric, const Vec2& x, const Vec2& u,
                                 const Mat2& du) {
  return covariant_derivative(christoffel(metric, x), u, du);
}

inline double divergence(const Mat2& cov_du) { return trace(cov_du); }

// Fiber inner product of (1,1) tensors: g(A, B) = A^{kj} B_{jk}
// (first index raised, second lowered with g) = tr(g A g^{-1} B^T).
inline double tensor11_inner(const Sym2& g, const Sym2& ginv, const Mat2& A, const Mat2& B) {
  double s = 0.0;
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i) {
      double agb = 0.0;
      for (int l = 0; l < 2; ++l)
        for (int j = 0; j < 2; ++j) agb += A[k][l] * ginv(l, j) * B[i][j];
      s += g(i, k) * agb;
    }
  return s;
}

// Inner product of (2,0) tensors: g(S, T) = S^{ik} T^{jl} g_{ij} g_{kl}.
inline double tensor20_inner(const Sym2& g, const Mat2& S, const Mat2& T) {
  double s = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k)
      for (int j = 0; j < 2; ++j)
        for (int l = 0; l < 2; ++l) s += S[i][k] * T[j][l] * g(i, j) * g(k, l);
  return s;
}

// Killing operator as a (2,0) tensor: (Su)^{ik} = g^{kj} u^i_{;j} + g^{ij} u^k_{;j}.
// Vanishes exactly when u generates an isometry.
inline Mat2 s_operator(const Sym2& ginv, const Mat2& cov_du) {
  Mat2 r;
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k) {
      double s = 0.0;
      for (int j = 0; j < 2; ++j) s += ginv(k, j) * cov_du[i][j] + ginv(i, j) * cov_du[k][j];
      r[i][k] = s;
    }
  return r;
}

inline Mat2 s_operator(const MetricField& metric, const Vec2& x, const Vec2& u, const Mat2& du) {
  const Sym2 g = metric.eval(x);
  return s_operator(inverse(g), covariant_derivative(metric, x, u, du));
}

// Conformal Killing operator: Cu = Su - (2/n) div(u) g^{ik}; trace-free part
// of Su, vanishing when u generates a conformal transformation.
inline Mat2 c_operator(const Sym2& ginv, const Mat2& cov_du, int n = 2) {
  Mat2 r = s_operator(ginv, cov_du);
  const double d = (2.0 / n) * divergence(cov_du);
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k) r[i][k] -= d * ginv(i, k);
  return r;
}

inline Mat2 c_operator(const MetricField& metric, const Vec2& x, const Vec2& u, const Mat2& du) {
  const Sym2 g = metric.eval(x);
  return c_operator(inverse(g), covariant_derivative(metric, x, u, du), metric.dim);
}

namespace detail {
inline double det3(const std::array<std::array<double, 3>, 3>& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}
}  // namespace detail

// Gaussian curvature from the metric alone (Brioschi formula).  Catalog
// surfaces also carry closed-form curvature; keeping both paths independent
// lets tests cross-validate them.
inline double gaussian_curvature(const MetricField& metric, const Vec2& x) {
  const Sym2 g = metric.eval(x);
  const auto d1 = metric.deriv(x);
  const auto d2 = metric.deriv2(x);

  const double E = g.a11, F = g.a12, G = g.a22;
  const double Ex = d1[0].a11, Ey = d1[1].a11;
  const double Gx = d1[0].a22, Gy = d1[1].a22;
  const double Fx = d1[0].a12, Fy = d1[1].a12;
  const double Eyy = d2[1][1].a11;
  const double Gxx = d2[0][0].a22;
  const double Fxy = d2[0][1].a12;

  const std::array<std::array<double, 3>, 3> m1 = {{
      {-0.5 * Eyy + Fxy - 0.5 * Gxx, 0.5 * Ex, Fx - 0.5 * Ey},
      {Fy - 0.5 * Gx, E, F},
      {0.5 * Gy, F, G},
  }};
  const std::array<std::array<double, 3>, 3> m2 = {{
      {0.0, 0.5 * Ey, 0.5 * Gx},
      {0.5 * Ey, E, F},
      {0.5 * Gx, F, G},
  }};
  const double dg = det(g);
  return (detail::det3(m1) - detail::det3(m2)) / (dg * dg);
}

// Quarter-turn rotation v^k = g^{ki} eps_{ij} u^j with the Riemannian area
// form eps = sqrt(det g) (dx1 (x) dx2 - dx2 (x) dx1).  Maps Killing fields to
// conformal Killing fields and preserves pointwise length.
inline Vec2 rotate_K(const MetricField& metric, const Vec2& x, const Vec2& u) {
  const Sym2 g = metric.eval(x);
  const double r = std::sqrt(det(g));
  const Vec2 eps_u{r * u.y, -r * u.x};  // (eps u)_i = eps_{ij} u^j
  return solve(g, eps_u);               // raise the index
}

enum class KillingDim { Zero, OneDim, ThreeDim };

inline const char* to_string(KillingDim d) {
  switch (d) {
    case KillingDim::Zero: return "Zero";
    case KillingDim::OneDim: return "OneDim";
    default: return "ThreeDim";
  }
}

namespace detail {

// Fourth-order central difference of a scalar callable along coordinate k.
template <class F>
double fd4(const F& f, const Vec2& x, int k, double h) {
  Vec2 p1 = x, p2 = x, m1 = x, m2 = x;
  p1[k] += h;
  p2[k] += 2 * h;
  m1[k] -= h;
  m2[k] -= 2 * h;
  return (-f(p2) + 8.0 * f(p1) - 8.0 * f(m1) + f(m2)) / (12.0 * h);
}

struct CurvatureSamples {
  std::function<double(const Vec2&)> kappa;

  Vec2 grad(const Vec2& x, double h) const {
    return {fd4(kappa, x, 0, h), fd4(kappa, x, 1, h)};
  }

  // Plain second partials d_j d_k kappa.
  Sym2 hessian(const Vec2& x, double h) const {
    auto gx = [&](const Vec2& y) { return fd4(kappa, y, 0, h); };
    auto gy = [&](const Vec2& y) { return fd4(kappa, y, 1, h); };
    const double hxx = fd4(gx, x, 0, h);
    const double hyy = fd4(gy, x, 1, h);
    const double hxy = 0.5 * (fd4(gx, x, 1, h) + fd4(gy, x, 0, h));
    return {hxx, hxy, hyy};
  }
};

}  // namespace detail

// Counts independent local Killing fields from curvature data: 3 when kappa
// is constant; otherwise 1 exactly when both d(kappa) (x) beta and
// d(kappa) (x) alpha are symmetric, where beta = 1/2 d g(d kappa, d kappa)
// and alpha = d(Laplace kappa); else 0.  Tolerance is relative to the
// magnitude of the tensors involved.  Supplying metric.kappa in closed form
// improves the reliability of the OneDim/Zero split; all derivatives of
// kappa are taken by nested central differences.
inline KillingDim killing_dimension_criterion(const MetricField& metric,
                                              const std::vector<Vec2>& samples, double tol) {
  if (samples.size() < 2) throw config_error("killing_dimension_criterion: need >= 2 samples");

  detail::CurvatureSamples cs;
  if (metric.kappa)
    cs.kappa = metric.kappa;
  else
    cs.kappa = [&metric](const Vec2& y) { return gaussian_curvature(metric, y); };

  double kmin = 1e300, kmax = -1e300, kabs = 0.0;
  for (const Vec2& x : samples) {
    const double k = cs.kappa(x);
    kmin = std::min(kmin, k);
    kmax = std::max(kmax, k);
    kabs = std::max(kabs, std::abs(k));
  }
  if (kmax - kmin <= tol * std::max(1.0, kabs)) return KillingDim::ThreeDim;

  const double h1 = 1e-3;  // gradient/Hessian step
  const double h2 = 1e-2;  // outer step for d(Laplace kappa)

  auto laplacian = [&](const Vec2& y) {
    const Sym2 ginv = inverse(metric.eval(y));
    const Christoffel gamma = christoffel(metric, y);
    const Vec2 gk = cs.grad(y, h1);
    const Sym2 hess = cs.hessian(y, h1);
    double s = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        const double cov_ij = hess(i, j) - gamma[0][i][j] * gk.x - gamma[1][i][j] * gk.y;
        s += ginv(i, j) * cov_ij;
      }
    return s;
  };

  struct Row {
    double cross_beta, scale_beta, cross_alpha, scale_alpha;
  };
  std::vector<Row> rows;
  rows.reserve(samples.size());
  double max_scale_beta = 0.0, max_scale_alpha = 0.0;

  for (const Vec2& x : samples) {
    const Vec2 dk = cs.grad(x, h1);

    // beta_l = 1/2 d_l (g^{ij} kappa_{,i} kappa_{,j})
    auto energy = [&](const Vec2& y) {
      const Sym2 ginv = inverse(metric.eval(y));
      const Vec2 gk = cs.grad(y, h1);
      return ginv.a11 * gk.x * gk.x + 2.0 * ginv.a12 * gk.x * gk.y + ginv.a22 * gk.y * gk.y;
    };
    const Vec2 beta{0.5 * detail::fd4(energy, x, 0, h2), 0.5 * detail::fd4(energy, x, 1, h2)};
    const Vec2 alpha{detail::fd4(laplacian, x, 0, h2), detail::fd4(laplacian, x, 1, h2)};

    // d(kappa) (x) w is symmetric iff the 2D cross product vanishes.
    Row r;
    r.cross_beta = std::abs(dk.x * beta.y - dk.y * beta.x);
    r.scale_beta = norm(dk) * norm(beta);
    r.cross_alpha = std::abs(dk.x * alpha.y - dk.y * alpha.x);
    r.scale_alpha = norm(dk) * norm(alpha);
    max_scale_beta = std::max(max_scale_beta, r.scale_beta);
    max_scale_alpha = std::max(max_scale_alpha, r.scale_alpha);
    rows.push_back(r);
  }

  // Samples where either tensor is negligible carry no symmetry information.
  double worst = 0.0;
  for (const Row& r : rows) {
    if (r.scale_beta > 1e-6 * max_scale_beta)
      worst = std::max(worst, r.cross_beta / (r.scale_beta + 1e-300));
    if (r.scale_alpha > 1e-6 * max_scale_alpha)
      worst = std::max(worst, r.cross_alpha / (r.scale_alpha + 1e-300));
  }
  return worst <= tol ? KillingDim::OneDim : KillingDim::Zero;
}

}  // namespace kvf
