#include "catch_amalgamated.hpp"

#include <cmath>
#include <tuple>
#include <vector>

#include "kvf/assemble.hpp"
#include "kvf/core.hpp"
#include "kvf/dense_eig.hpp"
#include "kvf/dofmap.hpp"
#include "kvf/lanczos.hpp"
#include "kvf/ldl.hpp"
#include "kvf/meshgen.hpp"
#include "kvf/ordering.hpp"
#include "kvf/sparse.hpp"
#include "kvf/surfaces.hpp"

using namespace kvf;

namespace {

// Shift at the scale of the target eigenvalues rather than of the stiffness
// diagonal; keeps the small cluster well separated after inversion.
double near_zero_shift(const SymSparseMatrix& A, const SymSparseMatrix& M) {
  const auto da = A.diagonal(), dm = M.diagonal();
  double r = 0.0;
  for (int i = 0; i < A.n; ++i) r += da[i] / dm[i];
  r /= A.n;
  return -1.0 / std::max(r, 1.0);
}

std::vector<double> flatten(const std::vector<std::vector<double>>& rows) {
  const int n = int(rows.size());
  std::vector<double> out(std::size_t(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out[std::size_t(i) * n + j] = rows[i][j];
  return out;
}

SymSparseMatrix sparse_identity(int n) {
  std::vector<std::tuple<int, int, double>> trip;
  for (int i = 0; i < n; ++i) trip.emplace_back(i, i, 1.0);
  return SymSparseMatrix::from_triplets(n, std::move(trip));
}

}  // namespace

TEST_CASE("dense pencil solver on closed-form examples") {
  // 1x1: 3 x = lambda 2 x.
  {
    DenseEig e = dense_sym_geig({3.0}, {2.0}, 1);
    REQUIRE(e.values.size() == 1);
    CHECK(e.values[0] == Catch::Approx(1.5).epsilon(1e-14));
    // M-normalized: x^2 * 2 = 1.
    CHECK(std::abs(e.vectors[0][0]) == Catch::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
  }

  // Diagonal A against the identity.
  {
    DenseEig e = dense_sym_geig({0.0, 0.0, 0.0, 2.0}, {1.0, 0.0, 0.0, 1.0}, 2);
    CHECK(e.values[0] == Catch::Approx(0.0).margin(1e-14));
    CHECK(e.values[1] == Catch::Approx(2.0).epsilon(1e-14));
  }

  // A = M: every eigenvalue is 1.
  {
    Rng rng(3);
    const int n = 8;
    std::vector<double> b(std::size_t(n) * n);
    for (auto& v : b) v = rng.symmetric();
    std::vector<double> m(std::size_t(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k)
          m[std::size_t(i) * n + j] += b[std::size_t(i) * n + k] * b[std::size_t(j) * n + k];
        if (i == j) m[std::size_t(i) * n + j] += double(n);
      }
    DenseEig e = dense_sym_geig(m, m, n);
    for (double v : e.values) CHECK(v == Catch::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("dense pencil solver against an explicit whitening route") {
  Rng rng(17);
  const int n = 10;
  std::vector<double> A(std::size_t(n) * n), B(std::size_t(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) A[std::size_t(i) * n + j] = A[std::size_t(j) * n + i] = rng.symmetric();
  for (auto& v : B) v = rng.symmetric();
  std::vector<double> M(std::size_t(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k)
        M[std::size_t(i) * n + j] += B[std::size_t(i) * n + k] * B[std::size_t(j) * n + k];
      if (i == j) M[std::size_t(i) * n + j] += double(n);
    }

  const DenseEig ge = dense_sym_geig(A, M, n);

  // Whitening route: W = M^{-1/2} A M^{-1/2} via the eigendecomposition of M.
  const DenseEig me = dense_sym_eig(M, n);
  std::vector<double> Mih(std::size_t(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        Mih[std::size_t(i) * n + j] +=
            me.vectors[k][i] * me.vectors[k][j] / std::sqrt(me.values[k]);
  auto mm = [&](const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> c(std::size_t(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
          c[std::size_t(i) * n + j] += a[std::size_t(i) * n + k] * b[std::size_t(k) * n + j];
    return c;
  };
  const DenseEig we = dense_sym_eig(mm(Mih, mm(A, Mih)), n);

  REQUIRE(ge.values.size() == we.values.size());
  for (int i = 0; i < n; ++i) CHECK(ge.values[i] == Catch::Approx(we.values[i]).margin(1e-12));

  // Reported vectors are M-orthonormal and satisfy the pencil equation.
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double xmy = 0.0;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) xmy += ge.vectors[i][a] * M[std::size_t(a) * n + b] * ge.vectors[j][b];
      CHECK(xmy == Catch::Approx(i == j ? 1.0 : 0.0).margin(1e-11));
    }
    double worst = 0.0;
    for (int a = 0; a < n; ++a) {
      double ax = 0.0, mx = 0.0;
      for (int b = 0; b < n; ++b) {
        ax += A[std::size_t(a) * n + b] * ge.vectors[i][b];
        mx += M[std::size_t(a) * n + b] * ge.vectors[i][b];
      }
      worst = std::max(worst, std::abs(ax - ge.values[i] * mx));
    }
    CHECK(worst < 1e-10 * double(n));
  }
}

TEST_CASE("dense solver input validation") {
  CHECK_THROWS_AS(dense_sym_eig({}, 0), config_error);
  CHECK_THROWS_AS(dense_sym_eig({1.0}, 2001), config_error);
  // Indefinite mass matrix.
  CHECK_THROWS_AS(dense_sym_geig({1.0, 0.0, 0.0, 1.0}, {1.0, 0.0, 0.0, -1.0}, 2),
                  numerical_error);
}

TEST_CASE("sparse factorization solves SPD systems under any ordering") {
  Rng rng(29);
  const int n = 400;
  std::vector<std::tuple<int, int, double>> trip;
  for (int i = 0; i < n; ++i) trip.emplace_back(i, i, 4.0 + rng.uniform());
  for (int i = 0; i + 1 < n; ++i) trip.emplace_back(i, i + 1, -1.0 + 0.1 * rng.symmetric());
  for (int i = 0; i + 17 < n; ++i) trip.emplace_back(i, i + 17, 0.5 * rng.symmetric());
  SymSparseMatrix A = SymSparseMatrix::from_triplets(n, std::move(trip));

  std::vector<double> b(n);
  for (auto& v : b) v = rng.symmetric();

  const SparseLDL f_auto(A);
  const SparseLDL f_md(A, min_degree_ordering(A));
  const SparseLDL f_rcm(A, rcm_ordering(A));

  const auto x0 = f_auto.solve(b);
  const auto x1 = f_md.solve(b);
  const auto x2 = f_rcm.solve(b);

  std::vector<double> ax(n);
  A.matvec(x0, ax);
  double worst = 0.0;
  for (int i = 0; i < n; ++i) worst = std::max(worst, std::abs(ax[i] - b[i]));
  CHECK(worst < 1e-10);

  for (int i = 0; i < n; ++i) {
    CHECK(x1[i] == Catch::Approx(x0[i]).margin(1e-10));
    CHECK(x2[i] == Catch::Approx(x0[i]).margin(1e-10));
  }
}

TEST_CASE("sparse factorization rejects indefinite matrices") {
  std::vector<std::tuple<int, int, double>> trip{{0, 0, 1.0}, {1, 1, -1.0}, {2, 2, 1.0}};
  SymSparseMatrix A = SymSparseMatrix::from_triplets(3, std::move(trip));
  CHECK_THROWS_AS(SparseLDL(A), numerical_error);
}

TEST_CASE("iterative pencil solver matches the dense path on the flat torus") {
  const Manifold m = flat_torus();
  const Triangulation tri = generate_structured(m.chart, 12);
  const DofMap dm = build_dofmap(tri, ElementType::P1, m.chart);
  const SymSparseMatrix A = assemble_killing(tri, dm, m.metric);
  const SymSparseMatrix M = assemble_mass(tri, dm, m.metric);
  REQUIRE(dm.n_dofs() == 288);

  EigOptions eo;
  eo.k = 6;
  eo.dense_cutoff = 0;     // force the Krylov path
  eo.block_size = 5;       // the first nonzero eigenvalue has multiplicity 4
  eo.shift = near_zero_shift(A, M);
  const Spectrum it = solve_smallest(A, M, eo);
  const Spectrum dn = dense_solve(A, M);

  REQUIRE(it.values.size() == 6);
  CHECK(it.converged);
  CHECK_FALSE(it.dense_path);
  CHECK(it.basis_size > 0);
  CHECK(dn.dense_path);

  // Two translation generators, then a fourfold eigenvalue.
  CHECK(std::abs(it.values[0]) <= 1e-10);
  CHECK(std::abs(it.values[1]) <= 1e-10);
  CHECK(it.values[2] > 0.1);
  for (int i = 0; i < 6; ++i) {
    CHECK(std::abs(it.values[i] - dn.values[i]) <= 1e-8);
    CHECK(it.residuals[i] <= eo.tol);
    CHECK(it.values[i] >= -1e-8);
    if (i > 0) CHECK(it.values[i] >= it.values[i - 1] - 1e-14);
  }

  // Eigenvectors are M-orthonormal.
  std::vector<double> mx(M.n);
  for (int i = 0; i < 6; ++i) {
    M.matvec(it.vectors[i], mx);
    for (int j = 0; j < 6; ++j) {
      double s = 0.0;
      for (int a = 0; a < M.n; ++a) s += it.vectors[j][a] * mx[a];
      CHECK(s == Catch::Approx(i == j ? 1.0 : 0.0).margin(1e-10));
    }
  }
}

TEST_CASE("iterative solver is insensitive to the shift choice") {
  const Manifold m = flat_torus();
  const Triangulation tri = generate_structured(m.chart, 12);
  const DofMap dm = build_dofmap(tri, ElementType::P1, m.chart);
  const SymSparseMatrix A = assemble_killing(tri, dm, m.metric);
  const SymSparseMatrix M = assemble_mass(tri, dm, m.metric);

  EigOptions eo;
  eo.k = 4;
  eo.dense_cutoff = 0;
  eo.block_size = 5;
  eo.shift = near_zero_shift(A, M);

  const Spectrum base = solve_smallest(A, M, eo);
  for (double factor : {0.5, 2.0}) {
    EigOptions alt = eo;
    alt.shift = eo.shift * factor;
    const Spectrum s = solve_smallest(A, M, alt);
    REQUIRE(s.values.size() == base.values.size());
    for (std::size_t i = 0; i < s.values.size(); ++i)
      CHECK(s.values[i] == Catch::Approx(base.values[i]).margin(1e-9));
  }
}

TEST_CASE("iterative solver is deterministic for a fixed seed") {
  const Manifold m = standard_torus();
  const Triangulation tri = generate_structured(m.chart, 12);
  const DofMap dm = build_dofmap(tri, ElementType::P1, m.chart);
  const SymSparseMatrix A = assemble_killing(tri, dm, m.metric);
  const SymSparseMatrix M = assemble_mass(tri, dm, m.metric);

  EigOptions eo;
  eo.k = 4;
  eo.dense_cutoff = 0;
  eo.shift = near_zero_shift(A, M);
  eo.seed = 987654321ull;

  const Spectrum a = solve_smallest(A, M, eo);
  const Spectrum b = solve_smallest(A, M, eo);
  REQUIRE(a.values.size() == b.values.size());
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    CHECK(a.values[i] == b.values[i]);  // bitwise
    REQUIRE(a.vectors[i].size() == b.vectors[i].size());
    for (std::size_t j = 0; j < a.vectors[i].size(); ++j)
      CHECK(a.vectors[i][j] == b.vectors[i][j]);
  }
}

TEST_CASE("small problems take the dense path automatically") {
  const Manifold m = flat_torus();
  const Triangulation tri = generate_structured(m.chart, 8);  // 128 dofs
  const DofMap dm = build_dofmap(tri, ElementType::P1, m.chart);
  const SymSparseMatrix A = assemble_killing(tri, dm, m.metric);
  const SymSparseMatrix M = assemble_mass(tri, dm, m.metric);
  REQUIRE(dm.n_dofs() <= 200);

  EigOptions eo;
  eo.k = 4;
  const Spectrum s = solve_smallest(A, M, eo);
  CHECK(s.dense_path);
  CHECK(s.basis_size == 0);
  REQUIRE(s.values.size() == 4);

  EigOptions forced = eo;
  forced.dense_cutoff = 0;
  forced.force_dense = true;
  const Spectrum f = solve_smallest(A, M, forced);
  CHECK(f.dense_path);
  for (int i = 0; i < 4; ++i) CHECK(f.values[i] == Catch::Approx(s.values[i]).margin(1e-12));
}

TEST_CASE("rotation eigenvalue is stable between neighbor resolutions") {
  const Manifold m = standard_torus();
  double l2[2];
  int idx = 0;
  for (int n : {16, 20}) {
    const Triangulation tri = generate_structured(m.chart, n);
    const DofMap dm = build_dofmap(tri, ElementType::P2, m.chart);
    const SymSparseMatrix A = assemble_killing(tri, dm, m.metric);
    const SymSparseMatrix M = assemble_mass(tri, dm, m.metric);
    EigOptions eo;
    eo.k = 4;
    eo.shift = near_zero_shift(A, M);
    const Spectrum s = solve_smallest(A, M, eo);
    REQUIRE(s.converged);
    CHECK(std::abs(s.values[0]) < 1e-10);
    l2[idx++] = s.values[1];
  }
  CHECK(std::abs(l2[1] - l2[0]) <= 0.05 * std::abs(l2[1]));
}

TEST_CASE("solver option validation") {
  const SymSparseMatrix I3 = sparse_identity(3);
  const SymSparseMatrix I4 = sparse_identity(4);
  EigOptions eo;
  CHECK_THROWS_AS(solve_smallest(I3, I4, eo), config_error);
  eo.k = 0;
  CHECK_THROWS_AS(solve_smallest(I3, I3, eo), config_error);
  eo.k = 2;
  eo.tol = 0.0;
  CHECK_THROWS_AS(solve_smallest(I3, I3, eo), config_error);

  // k is clamped to the problem size.
  EigOptions big;
  big.k = 10;
  const Spectrum s = solve_smallest(I3, I3, big);
  CHECK(s.values.size() == 3);
}

TEST_CASE("near-zero eigenvalue counting by relative gap") {
  {
    const ZeroModes z = zero_eigenspace({1e-12, 0.8, 1.9});
    CHECK(z.count == 1);
    CHECK_FALSE(z.inconclusive);
  }
  {
    const ZeroModes z = zero_eigenspace({1e-11, 3e-11, 0.5});
    CHECK(z.count == 2);
    CHECK_FALSE(z.inconclusive);
  }
  {
    const ZeroModes z = zero_eigenspace({0.3, 0.7, 1.1});
    CHECK(z.count == 0);
    CHECK(z.inconclusive);
  }
  {
    // No spread at all: conclusion impossible.
    const ZeroModes z = zero_eigenspace({1e-16, 2e-16, 3e-16});
    CHECK(z.count == 0);
    CHECK(z.inconclusive);
  }
  {
    // Fewer than two values cannot exhibit a gap.
    const ZeroModes z = zero_eigenspace({0.5});
    CHECK(z.inconclusive);
  }
  {
    // Custom gap factor.
    const ZeroModes strict = zero_eigenspace({1e-5, 0.5, 1.0}, 1e6);
    CHECK(strict.count == 0);
    CHECK(strict.inconclusive);
    const ZeroModes loose = zero_eigenspace({1e-5, 0.5, 1.0}, 1e3);
    CHECK(loose.count == 1);
  }
}

TEST_CASE("near-zero basis extraction is M-orthonormal") {
  const Manifold m = flat_torus();
  const Triangulation tri = generate_structured(m.chart, 10);
  const DofMap dm = build_dofmap(tri, ElementType::P1, m.chart);
  const SymSparseMatrix A = assemble_killing(tri, dm, m.metric);
  const SymSparseMatrix M = assemble_mass(tri, dm, m.metric);

  EigOptions eo;
  eo.k = 6;
  const Spectrum s = solve_smallest(A, M, eo);
  const ZeroModes z = zero_eigenspace(s, M);
  REQUIRE(z.count == 2);
  REQUIRE(z.basis.size() == 2);

  std::vector<double> mx(M.n);
  for (int i = 0; i < 2; ++i) {
    M.matvec(z.basis[i], mx);
    for (int j = 0; j < 2; ++j) {
      double ip = 0.0;
      for (int a = 0; a < M.n; ++a) ip += z.basis[j][a] * mx[a];
      CHECK(ip == Catch::Approx(i == j ? 1.0 : 0.0).margin(1e-10));
    }
  }
}
