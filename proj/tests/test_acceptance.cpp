// Acceptance suite for the headline results.  Each criterion runs the stated
// experiment at pinned tolerances and prints exactly one [PASS]/[FAIL] line;
// the exit status is the number of failed criteria.
//
//   test_acceptance        run all eleven criteria
//   test_acceptance <k>    run criterion k only
//
// Known-red clauses (see README): ratio clauses that compare two runs which
// both sit at rounding level, and the klein bottle trace-free kernel, whose
// continuous dimension is 1, not 2.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#include "kvf/analysis.hpp"
#include "kvf/assemble.hpp"
#include "kvf/dense_eig.hpp"
#include "kvf/dofmap.hpp"
#include "kvf/geometry.hpp"
#include "kvf/lanczos.hpp"
#include "kvf/ldl.hpp"
#include "kvf/meshgen.hpp"
#include "kvf/pipeline.hpp"
#include "kvf/quadrature.hpp"
#include "kvf/surfaces.hpp"

using namespace kvf;

namespace {

std::string num(double v) {
  char b[40];
  std::snprintf(b, sizeof b, "%.3g", v);
  return b;
}

// One criterion = a list of clauses; an empty failure list is a pass.
struct Gate {
  std::vector<std::string> fails;
  void check(bool ok, const std::string& what) {
    if (!ok) fails.push_back(what);
  }
  // clause of the form "value <= bound"
  void at_most(double value, double bound, const std::string& what) {
    check(value <= bound, what + " = " + num(value) + " exceeds " + num(bound));
  }
  void at_least(double value, double bound, const std::string& what) {
    check(value >= bound, what + " = " + num(value) + " is below " + num(bound));
  }
  // "worse by >= factor" comparison between an adapted and an unadapted run
  void ratio(double off, double on, double factor, const std::string& what) {
    check(off >= factor * on, what + " ratio " + num(on > 0.0 ? off / on : 0.0) +
                                  " (unadapted " + num(off) + " vs adapted " + num(on) +
                                  ") is below " + num(factor));
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ExperimentConfig make_cfg(const char* manifold, FormKind problem, ElementType element, int n,
                          bool adapt) {
  ExperimentConfig cfg;
  cfg.manifold = manifold;
  cfg.problem = problem;
  cfg.element = element;
  cfg.n = n;
  cfg.adapt = adapt;
  return cfg;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Shift at the scale of the sought eigenvalues; matches the pipeline's
// automatic choice.
double near_zero_shift(const SymSparseMatrix& A, const SymSparseMatrix& M) {
  const auto da = A.diagonal(), dm = M.diagonal();
  double r = 0.0;
  for (int i = 0; i < A.n; ++i) r += da[i] / dm[i];
  r /= A.n;
  return -1.0 / std::max(r, 1.0);
}

// --- criterion 1: rounding-level kernel on the enneper cap ------------------

Gate criterion_1() {
  Gate g;
  const auto t0 = std::chrono::steady_clock::now();
  for (int n : {7, 10, 14}) {
    const SolveResult r = run_solve(make_cfg("enneper", FormKind::Killing, ElementType::P1, n, false));
    const std::string at = " (" + std::to_string(r.mesh.triangles.size()) + " triangles)";
    g.check(r.zero.count == 1,
            "kernel dimension " + std::to_string(r.zero.count) + " != 1" + at);
    g.at_most(std::abs(r.spectrum.values[0]), 1e-10, "lambda_min" + at);
    if (r.errors.size() == 1) {
      g.at_most(r.errors[0].l2_rel, 1e-8, "L2 error vs (-x2, x1)" + at);
      g.at_most(r.errors[0].h1_rel, 1e-7, "H1 error vs (-x2, x1)" + at);
    } else {
      g.check(false, "no error row for the rotation field" + at);
    }
  }
  g.at_most(seconds_since(t0), 10.0, "runtime [s]");
  return g;
}

// --- criterion 2: adapted torus Killing accuracy -----------------------------

Gate criterion_2() {
  Gate g;
  const auto t0 = std::chrono::steady_clock::now();
  const SolveResult on = run_solve(make_cfg("standard_torus", FormKind::Killing, ElementType::P2, 32, true));
  const SolveResult off = run_solve(make_cfg("standard_torus", FormKind::Killing, ElementType::P2, 32, false));
  if (on.errors.size() != 1 || off.errors.size() != 1) {
    g.check(false, "expected one error row per run (adapted " +
                       std::to_string(on.errors.size()) + ", unadapted " +
                       std::to_string(off.errors.size()) + ")");
    return g;
  }
  const double lam_on = std::abs(on.spectrum.values[0]);
  const double lam_off = std::abs(off.spectrum.values[0]);
  g.at_most(lam_on, 1e-8, "lambda_min (adapted)");
  g.at_most(on.errors[0].l2_rel, 1e-9, "L2 error (adapted)");
  g.at_most(on.errors[0].h1_rel, 1e-9, "H1 error (adapted)");
  g.ratio(lam_off, lam_on, 10.0, "lambda_min");
  g.ratio(off.errors[0].l2_rel, on.errors[0].l2_rel, 10.0, "L2 error");
  g.ratio(off.errors[0].h1_rel, on.errors[0].h1_rel, 10.0, "H1 error");
  g.at_most(seconds_since(t0), 60.0, "runtime [s]");
  return g;
}

// --- criterion 3: torus trace-free kernel and spectral gap -------------------

Gate criterion_3() {
  Gate g;
  const SolveResult r = run_solve(make_cfg("standard_torus", FormKind::Conformal, ElementType::P2, 32, true));
  g.check(r.zero.count == 2 && !r.zero.inconclusive,
          "near-zero count " + std::to_string(r.zero.count) +
              (r.zero.inconclusive ? " (inconclusive)" : "") + " != 2");
  if (r.errors.size() == 2)
    g.at_most(r.errors[1].l2_rel, 1e-6, "L2 error of the non-Killing mode");
  else
    g.check(false, "expected two error rows, got " + std::to_string(r.errors.size()));
  g.at_least(r.spectrum.values[2], 1e-2, "third eigenvalue");
  return g;
}

// --- criterion 4: klein bottle kernels ---------------------------------------

Gate criterion_4() {
  Gate g;
  const SolveResult k_on = run_solve(make_cfg("klein_bottle", FormKind::Killing, ElementType::P1, 32, true));
  const SolveResult k_off = run_solve(make_cfg("klein_bottle", FormKind::Killing, ElementType::P1, 32, false));
  const SolveResult c_on = run_solve(make_cfg("klein_bottle", FormKind::Conformal, ElementType::P1, 32, true));

  g.at_most(std::abs(k_on.spectrum.values[0]), 1e-6, "lambda_min (adapted)");
  if (k_on.errors.size() == 1 && k_off.errors.size() == 1) {
    g.at_most(k_on.errors[0].l2_rel, 1e-6, "L2 error (adapted)");
    g.ratio(k_off.errors[0].l2_rel, k_on.errors[0].l2_rel, 10.0, "L2 error");
  } else {
    g.check(false, "expected one error row per rigid-motion run");
  }

  g.check(c_on.zero.count == 2 && !c_on.zero.inconclusive,
          "trace-free near-zero count " + std::to_string(c_on.zero.count) +
              (c_on.zero.inconclusive ? " (inconclusive)" : "") + " != 2");
  if (c_on.errors.size() == 2)
    g.at_most(c_on.errors[1].l2_rel, 1e-5, "L2 error of the non-Killing mode");
  else
    g.check(false, "expected two trace-free error rows, got " +
                       std::to_string(c_on.errors.size()));
  return g;
}

// --- criterion 5: convergence orders on the torus ----------------------------

Gate criterion_5() {
  Gate g;
  const std::vector<int> family = {3, 4, 5, 6, 8, 10, 12, 16, 20};

  ExperimentConfig ck_cfg = make_cfg("standard_torus", FormKind::Conformal, ElementType::P2, 0, true);
  const ConvergenceRun ck = run_convergence(ck_cfg, family);
  g.check(ck.failures.empty(),
          std::to_string(ck.failures.size()) + " trace-free resolutions failed");
  g.check(ck.study.rows.size() >= 8,
          "only " + std::to_string(ck.study.rows.size()) + " trace-free rows");
  if (!ck.orders_valid) {
    g.check(false, "trace-free order fit unavailable: " + ck.orders_message);
    return g;
  }
  g.at_least(ck.study.eigenvalue_order.order, 3.5, "eigenvalue order");
  g.at_least(ck.study.l2_order.order, 3.0, "L2 order");
  g.at_least(ck.study.h1_order.order, 2.2, "H1 order");

  ExperimentConfig k_cfg = ck_cfg;
  k_cfg.problem = FormKind::Killing;
  const ConvergenceRun kf = run_convergence(k_cfg, family);
  g.check(kf.failures.empty(),
          std::to_string(kf.failures.size()) + " rigid-motion resolutions failed");

  // The rigid-motion field is exactly representable, so its columns sit at
  // rounding level on every mesh.  "Converges faster by >= 1" then means:
  // either the whole column is already below everything the trace-free study
  // reaches, or (when not saturated) the fitted order leads by one.
  struct Column {
    const char* name;
    double ConvergenceRow::*row;
    OrderFit ConvergenceStudy::*fit;
  };
  const std::array<Column, 3> cols = {{{"eigenvalue", &ConvergenceRow::eigenvalue,
                                        &ConvergenceStudy::eigenvalue_order},
                                       {"L2", &ConvergenceRow::l2_rel, &ConvergenceStudy::l2_order},
                                       {"H1", &ConvergenceRow::h1_rel, &ConvergenceStudy::h1_order}}};
  for (const auto& c : cols) {
    double kf_max = 0.0, ck_min = std::numeric_limits<double>::infinity();
    for (const auto& row : kf.study.rows) kf_max = std::max(kf_max, std::abs(row.*c.row));
    for (const auto& row : ck.study.rows) ck_min = std::min(ck_min, std::abs(row.*c.row));
    const bool saturated_below = kf_max < 1e-10 && kf_max < ck_min;
    const bool order_lead =
        kf.orders_valid && (kf.study.*c.fit).order >= (ck.study.*c.fit).order + 1.0;
    g.check(saturated_below || order_lead,
            std::string(c.name) + " column of the rigid-motion study is not faster (max " +
                num(kf_max) + " vs trace-free min " + num(ck_min) + ")");
  }
  return g;
}

// --- criterion 6: flat torus kernel ------------------------------------------

Gate criterion_6() {
  Gate g;
  const SolveResult r = run_solve(make_cfg("flat_torus", FormKind::Killing, ElementType::P1, 16, false));
  g.check(r.zero.count == 2, "kernel dimension " + std::to_string(r.zero.count) + " != 2");
  g.at_most(std::abs(r.spectrum.values[0]), 1e-10, "|lambda_1|");
  g.at_most(std::abs(r.spectrum.values[1]), 1e-10, "|lambda_2|");
  g.at_least(r.spectrum.values[2], 0.1, "lambda_3");
  return g;
}

// --- criterion 7: iterative vs dense eigensolver -----------------------------

Gate criterion_7() {
  Gate g;
  struct Case {
    const char* manifold;
    ElementType element;
    int n;
    FormKind problem;
  };
  const std::vector<Case> suite = {
      {"flat_torus", ElementType::P1, 10, FormKind::Killing},
      {"flat_torus", ElementType::P1, 16, FormKind::Killing},
      {"standard_torus", ElementType::P2, 8, FormKind::Killing},
      {"standard_torus", ElementType::P2, 12, FormKind::Conformal},
      {"klein_bottle", ElementType::P1, 22, FormKind::Killing},
      {"enneper", ElementType::P1, 10, FormKind::Killing},
  };
  for (const auto& c : suite) {
    const Manifold m = catalog(c.manifold);
    const Triangulation tri = generate_structured(m.chart, c.n);
    const DofMap dm = build_dofmap(tri, c.element, m.chart);
    const std::string at = std::string(" (") + c.manifold + ", " +
                           std::to_string(dm.n_dofs()) + " dofs, " + to_string(c.problem) + ")";
    if (dm.n_dofs() > 2000) {
      g.check(false, "suite mesh exceeds 2000 dofs" + at);
      continue;
    }
    const SymSparseMatrix M = assemble_mass(tri, dm, m.metric);
    const SymSparseMatrix A = c.problem == FormKind::Conformal
                                  ? assemble_conformal(tri, dm, m.metric)
                                  : assemble_killing(tri, dm, m.metric);
    const Spectrum dense = dense_solve(A, M);
    EigOptions eo;
    eo.k = 8;
    eo.block_size = 5;
    eo.dense_cutoff = 0;
    eo.shift = near_zero_shift(A, M);
    const Spectrum iter = solve_smallest(A, M, eo);
    g.check(iter.converged, "iterative solve did not converge" + at);

    double worst = 0.0;
    for (int i = 0; i < 6; ++i) worst = std::max(worst, std::abs(iter.values[i] - dense.values[i]));
    g.at_most(worst, 1e-8, "eigenvalue disagreement" + at);

    // Clusters of the dense spectrum; only those closed strictly inside the
    // compared range have solver-independent spans.
    const int scan = std::min<int>(7, int(dense.values.size()) - 1);
    int start = 0;
    for (int i = 0; i <= scan; ++i) {
      const bool boundary =
          i == scan || dense.values[i + 1] - dense.values[i] >
                           1e-6 * std::max(1.0, std::abs(dense.values[i + 1]));
      if (!boundary) continue;
      const int end = i;  // cluster = [start, end]
      if (end <= 5) {
        // principal angles via the M-weighted cross-Gram matrix
        const int d = end - start + 1;
        std::vector<double> tmp(M.n);
        std::vector<std::vector<double>> w(d, std::vector<double>(d));
        for (int a = 0; a < d; ++a) {
          M.matvec(iter.vectors[start + a], tmp);
          for (int b = 0; b < d; ++b) w[a][b] = dot(tmp, dense.vectors[start + b]);
        }
        std::vector<double> wtw(d * d, 0.0);
        for (int p = 0; p < d; ++p)
          for (int q = 0; q < d; ++q) {
            double s = 0.0;
            for (int a = 0; a < d; ++a) s += w[a][p] * w[a][q];
            wtw[p * d + q] = s;
          }
        const DenseEig e = dense_sym_eig(wtw, d);
        const double sin_max = std::sqrt(std::max(0.0, 1.0 - e.values.front()));
        g.at_most(sin_max, 1e-6, "principal angle of cluster [" + std::to_string(start) + "," +
                                     std::to_string(end) + "]" + at);
      }
      start = i + 1;
    }
  }
  return g;
}

// --- criterion 8: structural properties of the forms --------------------------

Gate criterion_8() {
  Gate g;

  // quadrature exactness on reference monomials up to degree 5
  const auto fact = [](int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
  };
  double worst_quad = 0.0;
  for (int a = 0; a <= 5; ++a)
    for (int b = 0; a + b <= 5; ++b) {
      double s = 0.0;
      for (const auto& qp : triangle_rule_deg5())
        s += qp.w * std::pow(qp.l2, a) * std::pow(qp.l3, b);
      const double exact = 2.0 * fact(a) * fact(b) / fact(a + b + 2);
      worst_quad = std::max(worst_quad, std::abs(s - exact));
    }
  g.at_most(worst_quad, 1e-14, "quadrature monomial defect");

  struct Case {
    const char* manifold;
    ElementType element;
    int n;
  };
  const std::vector<Case> suite = {{"flat_torus", ElementType::P1, 8},
                                   {"standard_torus", ElementType::P2, 8},
                                   {"klein_bottle", ElementType::P1, 12},
                                   {"enneper", ElementType::P1, 10}};
  for (const auto& c : suite) {
    const Manifold m = catalog(c.manifold);
    const Triangulation tri = generate_structured(m.chart, c.n);
    const DofMap dm = build_dofmap(tri, c.element, m.chart);
    const SymSparseMatrix M = assemble_mass(tri, dm, m.metric);
    const SymSparseMatrix AK = assemble_killing(tri, dm, m.metric);
    const SymSparseMatrix AC = assemble_conformal(tri, dm, m.metric);
    const std::string at = std::string(" (") + c.manifold + ")";

    try {
      [[maybe_unused]] const SparseLDL chol(M);
    } catch (const std::exception& e) {
      g.check(false, std::string("mass matrix not positive definite") + at + ": " + e.what());
    }

    Rng rng(20260815ull);
    const int n = M.n;
    std::vector<double> x(n), y(n), ax(n), ay(n);

    double sym_defect = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
      for (auto& v : x) v = rng.symmetric();
      for (auto& v : y) v = rng.symmetric();
      for (const SymSparseMatrix* A : {&AK, &AC}) {
        A->matvec(x, ax);
        A->matvec(y, ay);
        double scale = 0.0;
        for (int i = 0; i < n; ++i) scale += std::abs(x[i] * ay[i]) + std::abs(y[i] * ax[i]);
        sym_defect = std::max(sym_defect, std::abs(dot(x, ay) - dot(y, ax)) / scale);
      }
    }
    g.at_most(sym_defect, 1e-12, "relative symmetry defect" + at);

    int chain_violations = 0, spd_violations = 0;
    for (int rep = 0; rep < 1000; ++rep) {
      for (auto& v : x) v = rng.symmetric();
      const double qk = AK.quad_form(x), qc = AC.quad_form(x), qm = M.quad_form(x);
      if (!(qm > 0.0)) ++spd_violations;
      if (!(qk >= qc && qc >= -1e-10 * qm)) ++chain_violations;
    }
    g.check(spd_violations == 0,
            std::to_string(spd_violations) + " of 1000 vectors had x.Mx <= 0" + at);
    g.check(chain_violations == 0,
            std::to_string(chain_violations) +
                " of 1000 vectors broke x.AKx >= x.ACx >= -1e-10 x.Mx" + at);
  }
  return g;
}

// --- criterion 9: quarter turn of the computed rigid motion -------------------

Gate criterion_9() {
  Gate g;
  const SolveResult r = run_solve(make_cfg("standard_torus", FormKind::Killing, ElementType::P2, 32, false));
  if (r.zero.count < 1) {
    g.check(false, "no kernel mode found to rotate");
    return g;
  }
  const DiscreteField v = rotate_field(r.dm, r.manifold.metric, r.zero_fields[0]);
  const SymSparseMatrix AC = assemble_conformal(r.mesh, r.dm, r.manifold.metric);
  const SymSparseMatrix M = assemble_mass(r.mesh, r.dm, r.manifold.metric);
  const double energy = AC.quad_form(v.dofs);
  const double mass = M.quad_form(v.dofs);
  g.at_most(energy, 1e-6 * mass,
            "trace-free energy of the rotated mode (M-norm^2 " + num(mass) + ")");
  return g;
}

// --- criterion 10: curvature integral identity --------------------------------

Gate criterion_10() {
  Gate g;
  for (const char* name : {"standard_torus", "klein_bottle"}) {
    const Manifold m = catalog(name);
    const Triangulation tri = generate_structured(m.chart, 16);
    const std::string at = std::string(" (") + name + ")";
    g.at_most(ricci_identity_residual(make_sampler(m.known_killing[0]), tri, m.metric,
                                      IdentityKind::Killing),
              1e-8, "residual of the rigid motion" + at);
    g.at_most(ricci_identity_residual(make_sampler(m.known_conformal_killing[0]), tri, m.metric,
                                      IdentityKind::Conformal),
              1e-8, "residual of the conformal partner" + at);
  }

  const Manifold t = catalog("standard_torus");
  const Triangulation tri = generate_structured(t.chart, 12);
  Rng rng(7);
  int weak = 0;
  double weakest = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 10; ++i) {
    const double a1 = rng.symmetric(), a2 = rng.symmetric();
    const double b1 = rng.symmetric(), b2 = rng.symmetric();
    const AnalyticVectorField f{
        "rand",
        [=](const Vec2& x) {
          return Vec2{a1 * std::sin(x.x + b1), a2 * std::cos(x.y + b2)};
        },
        [=](const Vec2& x) {
          Mat2 d;
          d[0][0] = a1 * std::cos(x.x + b1);
          d[1][1] = -a2 * std::sin(x.y + b2);
          return d;
        }};
    const double res = ricci_identity_residual(make_sampler(f), tri, t.metric, IdentityKind::Killing);
    weakest = std::min(weakest, res);
    if (res < 1e-2) ++weak;
  }
  g.check(weak == 0, std::to_string(weak) + " of 10 random fields fell below 1e-2 (min " +
                         num(weakest) + ")");
  return g;
}

// --- criterion 11: symmetry dimension classification ---------------------------

Gate criterion_11() {
  Gate g;
  const std::vector<Vec2> torus_pts = {{0.7, 0.3}, {1.3, 4.1}, {2.9, 0.9},
                                       {4.0, 2.2}, {5.1, 5.3}, {2.2, 3.3}};
  const std::vector<Vec2> cap_pts = {{0.3, -0.4}, {0.1, 0.2},   {-0.5, 0.6}, {0.55, 0.15},
                                     {-0.2, -0.3}, {0.4, 0.5},  {0.0, 0.0}};
  MetricField perturbed;
  perturbed.g = [](const Vec2& x) {
    const double f = 2.0 + std::cos(x.x) + 0.3 * std::cos(x.y);
    return Sym2{1.0, 0.0, f * f};
  };
  perturbed.dg = [](const Vec2& x) {
    const double f = 2.0 + std::cos(x.x) + 0.3 * std::cos(x.y);
    std::array<Sym2, 2> out;
    out[0] = Sym2{0.0, 0.0, -2.0 * f * std::sin(x.x)};
    out[1] = Sym2{0.0, 0.0, -0.6 * f * std::sin(x.y)};
    return out;
  };

  const auto label = [](KillingDim d) {
    switch (d) {
      case KillingDim::Zero: return "Zero";
      case KillingDim::OneDim: return "OneDim";
      default: return "ThreeDim";
    }
  };
  const auto expect = [&](const char* name, const MetricField& metric,
                          const std::vector<Vec2>& pts, KillingDim want) {
    const KillingDim got = killing_dimension_criterion(metric, pts, 1e-4);
    g.check(got == want, std::string(name) + " classified " + label(got) + ", expected " +
                             label(want));
  };
  expect("flat_torus", flat_torus().metric, torus_pts, KillingDim::ThreeDim);
  expect("standard_torus", standard_torus().metric, torus_pts, KillingDim::OneDim);
  expect("klein_bottle", klein_bottle().metric, torus_pts, KillingDim::OneDim);
  expect("enneper", enneper().metric, cap_pts, KillingDim::OneDim);
  expect("perturbed torus metric", perturbed, torus_pts, KillingDim::Zero);
  return g;
}

}  // namespace

int main(int argc, char** argv) {
  struct Entry {
    int id;
    const char* label;
    Gate (*fn)();
  };
  const std::vector<Entry> entries = {
      {1, "enneper cap kernel at rounding level (P1, three meshes)", criterion_1},
      {2, "torus rigid motion, adapted P2 accuracy", criterion_2},
      {3, "torus trace-free kernel and spectral gap", criterion_3},
      {4, "klein bottle kernels (P1, adapted)", criterion_4},
      {5, "torus convergence orders over nine meshes", criterion_5},
      {6, "flat torus kernel dimension and gap", criterion_6},
      {7, "iterative and dense eigensolvers agree", criterion_7},
      {8, "form matrices: SPD mass, symmetry, energy ordering, quadrature", criterion_8},
      {9, "quarter turn of the computed rigid motion is trace-free", criterion_9},
      {10, "curvature integral identity separates symmetric fields", criterion_10},
      {11, "symmetry dimension classification", criterion_11},
  };

  int only = 0;
  if (argc > 1) {
    only = std::atoi(argv[1]);
    if (only < 1 || only > 11 || argc > 2) {
      std::fprintf(stderr, "usage: %s [criterion 1..11]\n", argv[0]);
      return 64;
    }
  }

  int failed = 0;
  for (const auto& e : entries) {
    if (only && e.id != only) continue;
    Gate g;
    try {
      g = e.fn();
    } catch (const std::exception& ex) {
      g.fails.push_back(std::string("exception: ") + ex.what());
    }
    if (g.fails.empty()) {
      std::printf("[PASS] criterion %d: %s\n", e.id, e.label);
    } else {
      std::string all;
      for (std::size_t i = 0; i < g.fails.size(); ++i)
        all += (i ? "; " : "") + g.fails[i];
      std::printf("[FAIL] criterion %d: %s | %s\n", e.id, e.label, all.c_str());
      ++failed;
    }
    std::fflush(stdout);
  }
  return failed;
}
