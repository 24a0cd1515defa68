#pragma once

// Dense symmetric eigensolver: Householder reduction to tridiagonal form
// followed by the implicit-shift QL iteration, with accumulated transforms.
// The generalized pencil (A, M) with M positive definite is reduced to
// standard form through a Cholesky factor.  Intended as the reference path
// for small problems; guarded at n <= 2000.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "kvf/core.hpp"

namespace kvf {

struct DenseEig {
  std::vector<double> values;                // ascending
  std::vector<std::vector<double>> vectors;  // vectors[k] pairs with values[k]
};

namespace detail {

// Householder tridiagonalization of the symmetric matrix stored row-major in
// z; on exit z holds the accumulated orthogonal transform, d the diagonal and
// e the subdiagonal (e[0] unused).
inline void tridiagonalize(std::vector<double>& z, int n, std::vector<double>& d,
                           std::vector<double>& e) {
  auto at = [&](int i, int j) -> double& { return z[std::size_t(i) * n + j]; };
  for (int i = n - 1; i >= 1; --i) {
    const int l = i - 1;
    double h = 0.0, scale = 0.0;
    if (l > 0) {
      for (int k = 0; k <= l; ++k) scale += std::abs(at(i, k));
      if (scale == 0.0) {
        e[i] = at(i, l);
      } else {
        for (int k = 0; k <= l; ++k) {
          at(i, k) /= scale;
          h += at(i, k) * at(i, k);
        }
        double f = at(i, l);
        double g = f >= 0.0 ? -std::sqrt(h) : std::sqrt(h);
        e[i] = scale * g;
        h -= f * g;
        at(i, l) = f - g;
        f = 0.0;
        for (int j = 0; j <= l; ++j) {
          at(j, i) = at(i, j) / h;
          g = 0.0;
          for (int k = 0; k <= j; ++k) g += at(j, k) * at(i, k);
          for (int k = j + 1; k <= l; ++k) g += at(k, j) * at(i, k);
          e[j] = g / h;
          f += e[j] * at(i, j);
        }
        const double hh = f / (h + h);
        for (int j = 0; j <= l; ++j) {
          f = at(i, j);
          e[j] = g = e[j] - hh * f;
          for (int k = 0; k <= j; ++k) at(j, k) -= f * e[k] + g * at(i, k);
        }
      }
    } else {
      e[i] = at(i, l);
    }
    d[i] = h;
  }
  d[0] = 0.0;
  e[0] = 0.0;
  for (int i = 0; i < n; ++i) {
    if (d[i] != 0.0) {
      for (int j = 0; j < i; ++j) {
        double g = 0.0;
        for (int k = 0; k < i; ++k) g += at(i, k) * at(k, j);
        for (int k = 0; k < i; ++k) at(k, j) -= g * at(k, i);
      }
    }
    d[i] = at(i, i);
    at(i, i) = 1.0;
    for (int j = 0; j < i; ++j) at(j, i) = at(i, j) = 0.0;
  }
}

// Implicit-shift QL on the tridiagonal (d, e), rotating the columns of z.
inline void ql_implicit(std::vector<double>& z, int n, std::vector<double>& d,
                        std::vector<double>& e) {
  auto at = [&](int i, int j) -> double& { return z[std::size_t(i) * n + j]; };
  for (int i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;
  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m;
    do {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= std::numeric_limits<double>::epsilon() * dd) break;
      }
      if (m != l) {
        if (iter++ == 50) throw numerical_error("dense eigensolver failed to converge");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        int i = m - 1;
        for (; i >= l; --i) {
          double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          for (int k = 0; k < n; ++k) {
            f = at(k, i + 1);
            at(k, i + 1) = s * at(k, i) + c * f;
            at(k, i) = c * at(k, i) - s * f;
          }
        }
        if (r == 0.0 && i >= l) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
}

}  // namespace detail

// Eigendecomposition of a symmetric matrix given row-major; values ascending.
inline DenseEig dense_sym_eig(std::vector<double> a, int n) {
  if (n <= 0) throw config_error("dense_sym_eig: empty matrix");
  if (n > 2000) throw config_error("dense_sym_eig: n > 2000 not supported by the dense path");
  std::vector<double> d(n), e(n);
  detail::tridiagonalize(a, n, d, e);
  detail::ql_implicit(a, n, d, e);

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int i, int j) { return d[i] < d[j]; });

  DenseEig out;
  out.values.resize(n);
  out.vectors.assign(n, std::vector<double>(n));
  for (int k = 0; k < n; ++k) {
    out.values[k] = d[order[k]];
    for (int i = 0; i < n; ++i) out.vectors[k][i] = a[std::size_t(i) * n + order[k]];
  }
  return out;
}

namespace detail {

// In-place lower Cholesky of a row-major SPD matrix.
inline void dense_cholesky(std::vector<double>& m, int n) {
  auto at = [&](int i, int j) -> double& { return m[std::size_t(i) * n + j]; };
  for (int j = 0; j < n; ++j) {
    double s = at(j, j);
    for (int k = 0; k < j; ++k) s -= at(j, k) * at(j, k);
    if (s <= 0.0) throw numerical_error("dense Cholesky: matrix not positive definite");
    const double l = std::sqrt(s);
    at(j, j) = l;
    for (int i = j + 1; i < n; ++i) {
      double t = at(i, j);
      for (int k = 0; k < j; ++k) t -= at(i, k) * at(j, k);
      at(i, j) = t / l;
    }
  }
}

}  // namespace detail

// Generalized symmetric eigenproblem A x = lambda M x with M positive
// definite.  Eigenvectors are M-orthonormal; values ascending.
inline DenseEig dense_sym_geig(std::vector<double> a, std::vector<double> m, int n) {
  if (n > 2000) throw config_error("dense_sym_geig: n > 2000 not supported by the dense path");
  detail::dense_cholesky(m, n);
  auto L = [&](int i, int j) { return m[std::size_t(i) * n + j]; };
  auto A = [&](int i, int j) -> double& { return a[std::size_t(i) * n + j]; };

  // B = L^-1 A L^-T, formed by column then row forward substitutions.
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      double s = A(i, j);
      for (int k = 0; k < i; ++k) s -= L(i, k) * A(k, j);
      A(i, j) = s / L(i, i);
    }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = A(i, j);
      for (int k = 0; k < j; ++k) s -= L(j, k) * A(i, k);
      A(i, j) = s / L(j, j);
    }

  DenseEig eig = dense_sym_eig(std::move(a), n);
  for (auto& v : eig.vectors)  // x = L^-T y
    for (int i = n - 1; i >= 0; --i) {
      double s = v[i];
      for (int k = i + 1; k < n; ++k) s -= L(k, i) * v[k];
      v[i] = s / L(i, i);
    }
  return eig;
}

}  // namespace kvf
