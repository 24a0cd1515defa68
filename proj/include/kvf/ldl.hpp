#pragma once

// Sparse LDL^T factorization (up-looking, elimination-tree based) with a
// fill-reducing permutation.  The shifted matrices factored here are
// positive definite by construction, so no pivoting is performed; a
// non-positive pivot is reported as a numerical error.

#include <vector>

#include "kvf/core.hpp"
#include "kvf/ordering.hpp"
#include "kvf/sparse.hpp"

namespace kvf {

class SparseLDL {
 public:
  SparseLDL(const SymSparseMatrix& A, std::vector<int> perm) : n_(A.n), perm_(std::move(perm)) {
    if (int(perm_.size()) != n_) throw config_error("SparseLDL: permutation size mismatch");
    iperm_.resize(n_);
    for (int k = 0; k < n_; ++k) iperm_[perm_[k]] = k;
    build_permuted_upper(A);
    symbolic();
    numeric();
  }

  explicit SparseLDL(const SymSparseMatrix& A) : SparseLDL(A, fill_reducing_ordering(A)) {}

  int n() const { return n_; }
  std::size_t factor_nonzeros() const { return Lx_.size() + std::size_t(n_); }

  // Solves A x = b.
  std::vector<double> solve(const std::vector<double>& b) const {
    if (int(b.size()) != n_) throw config_error("SparseLDL::solve: size mismatch");
    std::vector<double> y(n_);
    for (int k = 0; k < n_; ++k) y[k] = b[perm_[k]];
    for (int k = 0; k < n_; ++k) {
      const double yk = y[k];
      for (int p = Lp_[k]; p < Lp_[k + 1]; ++p) y[Li_[p]] -= Lx_[p] * yk;
    }
    for (int k = 0; k < n_; ++k) y[k] /= D_[k];
    for (int k = n_ - 1; k >= 0; --k) {
      double s = y[k];
      for (int p = Lp_[k]; p < Lp_[k + 1]; ++p) s -= Lx_[p] * y[Li_[p]];
      y[k] = s;
    }
    std::vector<double> x(n_);
    for (int k = 0; k < n_; ++k) x[perm_[k]] = y[k];
    return x;
  }

 private:
  // Permuted matrix, upper triangle in compressed columns (rows unsorted).
  void build_permuted_upper(const SymSparseMatrix& A) {
    Cp_.assign(n_ + 1, 0);
    std::vector<int> ci;
    std::vector<int> cj;
    std::vector<double> cv;
    ci.reserve(A.col.size());
    for (int i = 0; i < n_; ++i)
      for (int p = A.row_ptr[i]; p < A.row_ptr[i + 1]; ++p) {
        int r = iperm_[i], c = iperm_[A.col[p]];
        if (r > c) std::swap(r, c);
        ci.push_back(r);
        cj.push_back(c);
        cv.push_back(A.val[p]);
        ++Cp_[c + 1];
      }
    for (int k = 0; k < n_; ++k) Cp_[k + 1] += Cp_[k];
    Ci_.resize(ci.size());
    Cx_.resize(ci.size());
    std::vector<int> next(Cp_.begin(), Cp_.end() - 1);
    for (std::size_t e = 0; e < ci.size(); ++e) {
      const int dst = next[cj[e]]++;
      Ci_[dst] = ci[e];
      Cx_[dst] = cv[e];
    }
  }

  void symbolic() {
    parent_.assign(n_, -1);
    std::vector<int> flag(n_), lnz(n_, 0);
    for (int k = 0; k < n_; ++k) {
      flag[k] = k;
      for (int p = Cp_[k]; p < Cp_[k + 1]; ++p) {
        int i = Ci_[p];
        while (i < k && flag[i] != k) {
          if (parent_[i] < 0) parent_[i] = k;
          ++lnz[i];
          flag[i] = k;
          i = parent_[i];
        }
      }
    }
    Lp_.assign(n_ + 1, 0);
    for (int k = 0; k < n_; ++k) Lp_[k + 1] = Lp_[k] + lnz[k];
    Li_.resize(Lp_[n_]);
    Lx_.resize(Lp_[n_]);
  }

  void numeric() {
    D_.assign(n_, 0.0);
    std::vector<double> y(n_, 0.0);
    std::vector<int> pattern(n_), flag(n_), lnext(Lp_.begin(), Lp_.end() - 1);
    for (int k = 0; k < n_; ++k) {
      flag[k] = k;
      int top = n_;
      D_[k] = 0.0;
      for (int p = Cp_[k]; p < Cp_[k + 1]; ++p) {
        const int i = Ci_[p];
        if (i > k) continue;
        y[i] += Cx_[p];
        int len = 0;
        for (int j = i; j < k && flag[j] != k; j = parent_[j]) {
          pattern[len++] = j;
          flag[j] = k;
        }
        while (len > 0) pattern[--top] = pattern[--len];
      }
      D_[k] = y[k];
      y[k] = 0.0;
      for (; top < n_; ++top) {
        const int i = pattern[top];
        const double yi = y[i];
        y[i] = 0.0;
        for (int p = Lp_[i]; p < lnext[i]; ++p) y[Li_[p]] -= Lx_[p] * yi;
        const double lki = yi / D_[i];
        D_[k] -= lki * yi;
        Li_[lnext[i]] = k;
        Lx_[lnext[i]] = lki;
        ++lnext[i];
      }
      if (D_[k] <= 0.0)
        throw numerical_error("sparse LDL^T: non-positive pivot (matrix not positive definite)");
    }
  }

  int n_;
  std::vector<int> perm_, iperm_;
  std::vector<int> Cp_, Ci_;
  std::vector<double> Cx_;
  std::vector<int> parent_;
  std::vector<int> Lp_, Li_;
  std::vector<double> Lx_;
  std::vector<double> D_;
};

}  // namespace kvf
