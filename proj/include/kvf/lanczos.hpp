#pragma once

// Smallest eigenpairs of the symmetric generalized problem A x = lambda M x,
// with A positive semidefinite and M positive definite. Small problems go
// through the dense reduction; large ones use shift-invert block Lanczos in
// the M inner product with full reorthogonalization. Also the gap heuristic
// that counts near-zero eigenvalues.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

#include "kvf/core.hpp"
#include "kvf/dense_eig.hpp"
#include "kvf/ldl.hpp"
#include "kvf/sparse.hpp"

namespace kvf {

struct EigOptions {
  int k = 6;               // eigenpairs requested
  double shift = -1.0;     // in units of the mean diagonal ratio of A to M
  double tol = 1e-10;      // residual gate |A x - l M x| / |M x|
  int block_size = 3;
  int max_basis = 360;     // Krylov columns before giving up
  int max_iterations = 200;
  int dense_cutoff = 200;  // n <= cutoff is solved densely
  bool force_dense = false;
  unsigned long long seed = 20260815ull;
};

struct Spectrum {
  std::vector<double> values;                // ascending
  std::vector<std::vector<double>> vectors;  // M-orthonormal, vectors[i] pairs with values[i]
  std::vector<double> residuals;             // |A x - lambda M x| / |M x|
  double shift_used = 0.0;
  int basis_size = 0;   // Krylov columns consumed (0 on the dense path)
  bool dense_path = false;
  bool converged = true;  // false when the basis or iteration cap was hit first
};

namespace detail {

inline double vdot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline void vaxpy(double alpha, const std::vector<double>& x, std::vector<double>& y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
}

inline std::vector<double> flat_dense(const SymSparseMatrix& a) {
  const auto rows = a.dense();
  std::vector<double> out(std::size_t(a.n) * a.n);
  for (int i = 0; i < a.n; ++i)
    for (int j = 0; j < a.n; ++j) out[std::size_t(i) * a.n + j] = rows[i][j];
  return out;
}

// M-normalizes x in place and returns (Rayleigh quotient, relative residual).
inline std::pair<double, double> rayleigh_residual(const SymSparseMatrix& A,
                                                   const SymSparseMatrix& M,
                                                   std::vector<double>& x) {
  std::vector<double> mx(x.size()), ax(x.size());
  M.matvec(x, mx);
  const double mn = std::sqrt(std::max(vdot(x, mx), 0.0));
  if (mn == 0.0) return {0.0, std::numeric_limits<double>::infinity()};
  for (auto& v : x) v /= mn;
  for (auto& v : mx) v /= mn;
  A.matvec(x, ax);
  const double ray = vdot(x, ax);
  double r2 = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = ax[i] - ray * mx[i];
    r2 += d * d;
    m2 += mx[i] * mx[i];
  }
  return {ray, std::sqrt(r2) / std::max(std::sqrt(m2), 1e-300)};
}

inline Spectrum finalize_spectrum(const SymSparseMatrix& A, const SymSparseMatrix& M,
                                  std::vector<std::vector<double>> vecs) {
  Spectrum s;
  for (auto& x : vecs) {
    const auto [ray, res] = rayleigh_residual(A, M, x);
    s.values.push_back(ray);
    s.residuals.push_back(res);
    s.vectors.push_back(std::move(x));
  }
  std::vector<int> order(s.values.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return s.values[a] < s.values[b]; });
  Spectrum t;
  for (int i : order) {
    t.values.push_back(s.values[i]);
    t.residuals.push_back(s.residuals[i]);
    t.vectors.push_back(std::move(s.vectors[i]));
  }
  return t;
}

}  // namespace detail

// Full spectrum through the dense reduction; intended for cross-checks and
// for problems small enough that iteration is not worth it.
inline Spectrum dense_solve(const SymSparseMatrix& A, const SymSparseMatrix& M) {
  if (A.n != M.n || A.n <= 0) throw config_error("dense_solve: dimension mismatch");
  DenseEig e = dense_sym_geig(detail::flat_dense(A), detail::flat_dense(M), A.n);
  Spectrum s = detail::finalize_spectrum(A, M, std::move(e.vectors));
  s.dense_path = true;
  return s;
}

inline Spectrum solve_smallest(const SymSparseMatrix& A, const SymSparseMatrix& M,
                               const EigOptions& opts = {}) {
  const int n = A.n;
  if (n <= 0 || M.n != n) throw config_error("solve_smallest: dimension mismatch");
  if (opts.k < 1) throw config_error("solve_smallest: k must be >= 1");
  if (!(opts.tol > 0.0)) throw config_error("solve_smallest: tol must be positive");
  const int k = std::min(opts.k, n);

  if (opts.force_dense || n <= opts.dense_cutoff) {
    Spectrum s = dense_solve(A, M);
    if (int(s.values.size()) > k) {
      s.values.resize(k);
      s.vectors.resize(k);
      s.residuals.resize(k);
    }
    return s;
  }

  const std::vector<double> da = A.diagonal(), dm = M.diagonal();
  double ratio = 0.0;
  for (int i = 0; i < n; ++i) {
    if (dm[i] <= 0.0) throw numerical_error("solve_smallest: mass diagonal not positive");
    ratio += da[i] / dm[i];
  }
  ratio /= n;
  const double sigma = opts.shift * ratio;

  SparseLDL F(A.scaled_add(-sigma, M));
  Rng rng(opts.seed);

  const int b = std::max(1, std::min(opts.block_size, n / 4));
  const int cap = std::min(n, std::max(opts.max_basis, k + 2 * b));

  std::vector<std::vector<double>> V, MV;
  std::vector<double> T(std::size_t(cap) * cap, 0.0);
  auto tat = [&](int i, int j) -> double& { return T[std::size_t(i) * cap + j]; };

  // Two-pass M-orthogonalization of w against the basis; reports the
  // coefficient of each basis column through coeff(i, h). Returns the
  // leftover M-norm, with w normalized and appended when it is usable.
  auto append_column = [&](std::vector<double>& w, auto&& coeff) -> double {
    std::vector<double> mw(n);
    M.matvec(w, mw);
    const double nrm0 = std::sqrt(std::max(detail::vdot(w, mw), 0.0));
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t i = 0; i < V.size(); ++i) {
        const double h = detail::vdot(MV[i], w);
        detail::vaxpy(-h, V[i], w);
        coeff(int(i), h);
      }
    M.matvec(w, mw);
    const double nrm = std::sqrt(std::max(detail::vdot(w, mw), 0.0));
    if (nrm <= 1e-10 * std::max(nrm0, 1e-300)) return 0.0;
    for (auto& v : w) v /= nrm;
    for (auto& v : mw) v /= nrm;
    V.push_back(std::move(w));
    MV.push_back(std::move(mw));
    return nrm;
  };
  auto append_random = [&]() -> bool {
    for (int tries = 0; tries < 5; ++tries) {
      std::vector<double> w(n);
      for (auto& v : w) v = rng.symmetric();
      if (append_column(w, [](int, double) {}) > 0.0) return true;
    }
    return false;
  };

  for (int c = 0; c < b; ++c)
    if (!append_random()) throw numerical_error("solve_smallest: cannot seed the Krylov basis");

  int src0 = 0, src1 = int(V.size());
  Spectrum out;
  out.shift_used = sigma;

  for (int round = 0;; ++round) {
    const int m_before = int(V.size());
    bool basis_stuck = false;
    for (int c = src0; c < src1 && int(V.size()) < cap; ++c) {
      std::vector<double> w = F.solve(MV[c]);
      const double beta = append_column(w, [&](int i, double h) { tat(i, c) += h; });
      if (beta > 0.0)
        tat(int(V.size()) - 1, c) += beta;
      else if (!append_random()) {
        basis_stuck = true;
        break;
      }
    }
    const int m = int(V.size());

    std::vector<double> S(std::size_t(m) * m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) S[std::size_t(i) * m + j] = 0.5 * (tat(i, j) + tat(j, i));
    DenseEig te = dense_sym_eig(std::move(S), m);

    // largest theta of the shift-inverted operator <-> smallest lambda
    const int kk = std::min(k, m);
    std::vector<std::vector<double>> xs;
    for (int j = m - 1; j >= m - kk; --j) {
      std::vector<double> x(n, 0.0);
      for (int i = 0; i < m; ++i) detail::vaxpy(te.vectors[j][i], V[i], x);
      xs.push_back(std::move(x));
    }
    Spectrum cand = detail::finalize_spectrum(A, M, std::move(xs));
    cand.shift_used = sigma;
    cand.basis_size = m;

    const bool ripe = m >= std::min(cap, k + 2 * b);
    const double worst =
        cand.residuals.empty() ? std::numeric_limits<double>::infinity()
                               : *std::max_element(cand.residuals.begin(), cand.residuals.end());
    if (ripe && kk == k && worst <= opts.tol) {
      cand.converged = true;
      return cand;
    }
    if (m >= cap || m == m_before || basis_stuck || round >= opts.max_iterations) {
      cand.converged = false;
      return cand;
    }
    src0 = m_before;
    src1 = m;
  }
}

struct ZeroModes {
  int count = 0;
  bool inconclusive = false;
  std::vector<std::vector<double>> basis;  // M-orthonormal when extracted from a Spectrum
};

// Counts leading near-zero eigenvalues by the largest-relative-gap rule: the
// cut is placed after the last index whose successor exceeds it by gap_factor,
// treating values below 1e-14 * max as zero for ratio purposes. No qualifying
// gap means no decision.
inline ZeroModes zero_eigenspace(const std::vector<double>& values, double gap_factor = 1e3) {
  ZeroModes z;
  if (values.size() < 2) {
    z.inconclusive = true;
    return z;
  }
  const double floor = 1e-14 * std::max(std::abs(values.back()), 1e-300);
  int cut = -1;
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    const double lo = std::max(values[i], floor);
    if (values[i + 1] / lo >= gap_factor) cut = int(i);
  }
  if (cut < 0) {
    z.inconclusive = true;
    return z;
  }
  z.count = cut + 1;
  return z;
}

inline ZeroModes zero_eigenspace(const Spectrum& spec, const SymSparseMatrix& M,
                                 double gap_factor = 1e3) {
  ZeroModes z = zero_eigenspace(spec.values, gap_factor);
  std::vector<double> mx(M.n);
  for (int i = 0; i < z.count; ++i) {
    std::vector<double> x = spec.vectors[i];
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : z.basis) {
        M.matvec(q, mx);
        detail::vaxpy(-detail::vdot(mx, x), q, x);
      }
    M.matvec(x, mx);
    const double nrm = std::sqrt(std::max(detail::vdot(x, mx), 0.0));
    if (nrm > 0.0)
      for (auto& v : x) v /= nrm;
    z.basis.push_back(std::move(x));
  }
  return z;
}

}  // namespace kvf
