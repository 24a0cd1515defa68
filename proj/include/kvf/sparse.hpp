#pragma once

// Symmetric sparse matrix storing the upper triangle (including diagonal)
// in CSR form, plus assembly from triplets and a dense mirror for small
// oracle problems.

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <tuple>
#include <vector>

#include "kvf/core.hpp"

namespace kvf {

struct SymSparseMatrix {
  int n = 0;
  std::vector<int> row_ptr;  // size n + 1
  std::vector<int> col;      // col[k] >= row for all entries
  std::vector<double> val;

  int nnz() const { return int(col.size()); }

  static SymSparseMatrix from_triplets(int n, std::vector<std::tuple<int, int, double>> trip) {
    for (auto& [i, j, v] : trip)
      if (i > j) std::swap(i, j);
    std::sort(trip.begin(), trip.end(), [](const auto& a, const auto& b) {
      if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) < std::get<0>(b);
      return std::get<1>(a) < std::get<1>(b);
    });

    SymSparseMatrix m;
    m.n = n;
    m.row_ptr.assign(n + 1, 0);
    for (std::size_t k = 0; k < trip.size();) {
      const int i = std::get<0>(trip[k]), j = std::get<1>(trip[k]);
      double s = 0.0;
      while (k < trip.size() && std::get<0>(trip[k]) == i && std::get<1>(trip[k]) == j)
        s += std::get<2>(trip[k++]);
      m.col.push_back(j);
      m.val.push_back(s);
      ++m.row_ptr[i + 1];
    }
    for (int i = 0; i < n; ++i) m.row_ptr[i + 1] += m.row_ptr[i];
    return m;
  }

  // y = A x with the symmetric completion of the stored triangle.
  void matvec(const std::vector<double>& x, std::vector<double>& y) const {
    y.assign(n, 0.0);
    for (int i = 0; i < n; ++i)
      for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
        const int j = col[k];
        y[i] += val[k] * x[j];
        if (j != i) y[j] += val[k] * x[i];
      }
  }

  double quad_form(const std::vector<double>& x) const {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
        const int j = col[k];
        s += (j == i ? 1.0 : 2.0) * val[k] * x[i] * x[j];
      }
    return s;
  }

  std::vector<double> diagonal() const {
    std::vector<double> d(n, 0.0);
    for (int i = 0; i < n; ++i)
      for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
        if (col[k] == i) d[i] = val[k];
    return d;
  }

  // Max absolute row sum of the full (symmetrically completed) matrix.
  double norm1() const {
    std::vector<double> rs(n, 0.0);
    for (int i = 0; i < n; ++i)
      for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
        const int j = col[k];
        rs[i] += std::abs(val[k]);
        if (j != i) rs[j] += std::abs(val[k]);
      }
    double m = 0.0;
    for (double v : rs) m = std::max(m, v);
    return m;
  }

  // this + alpha * B; patterns may differ.
  SymSparseMatrix scaled_add(double alpha, const SymSparseMatrix& b) const {
    if (b.n != n) throw numerical_error("scaled_add: dimension mismatch");
    SymSparseMatrix r;
    r.n = n;
    r.row_ptr.assign(n + 1, 0);
    for (int i = 0; i < n; ++i) {
      int ka = row_ptr[i], kb = b.row_ptr[i];
      while (ka < row_ptr[i + 1] || kb < b.row_ptr[i + 1]) {
        const int ja = ka < row_ptr[i + 1] ? col[ka] : n;
        const int jb = kb < b.row_ptr[i + 1] ? b.col[kb] : n;
        if (ja == jb) {
          r.col.push_back(ja);
          r.val.push_back(val[ka++] + alpha * b.val[kb++]);
        } else if (ja < jb) {
          r.col.push_back(ja);
          r.val.push_back(val[ka++]);
        } else {
          r.col.push_back(jb);
          r.val.push_back(alpha * b.val[kb++]);
        }
      }
      r.row_ptr[i + 1] = int(r.col.size());
    }
    return r;
  }

  std::vector<std::vector<double>> dense() const {
    std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i)
      for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
        d[i][col[k]] = val[k];
        d[col[k]][i] = val[k];
      }
    return d;
  }

  // Coordinate text format, stored (upper) triangle only, 0-based indices.
  void write_coo(std::ostream& os) const {
    char buf[64];
    for (int i = 0; i < n; ++i)
      for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
        std::snprintf(buf, sizeof buf, "%d %d %.17g\n", i, col[k], val[k]);
        os << buf;
      }
  }
};

}  // namespace kvf
