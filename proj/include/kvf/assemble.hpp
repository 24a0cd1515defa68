#pragma once

// Assembly of the mass matrix and of the Killing / conformal-Killing energy
// forms over vector P1/P2 spaces, plus discrete fields and their pointwise
// evaluation.
//
// Metric quantities are evaluated from their closed forms at the physical
// quadrature points; nothing is interpolated.  For a basis field phi_a e_c
// the covariant derivative at a quadrature point is
//   D^k_j = delta_{kc} d_j phi_a + Gamma^k_{cj} phi_a,
// and the three forms integrate, against the Riemannian density sqrt(det g):
//   mass:      g_{cd} phi_a phi_b
//   killing:   g(Du, Dv) + tr(Du Dv)        (equals 1/2 g(Su, Sv))
//   conformal: killing - (2/n) div(u) div(v).

#include <tuple>
#include <vector>

#include "kvf/core.hpp"
#include "kvf/dofmap.hpp"
#include "kvf/element.hpp"
#include "kvf/geometry.hpp"
#include "kvf/mesh.hpp"
#include "kvf/metric.hpp"
#include "kvf/quadrature.hpp"
#include "kvf/sparse.hpp"

namespace kvf {

struct ElemGeom {
  Vec2 p0, p1, p2;
  double area = 0.0;
  Mat2 invJT;  // maps reference gradients to chart gradients
};

inline ElemGeom elem_geom(const Triangulation& tri, int t) {
  ElemGeom g;
  const auto& T = tri.triangles[t];
  g.p0 = tri.vertices[T[0]];
  g.p1 = tri.vertices[T[1]];
  g.p2 = tri.vertices[T[2]];
  const double j11 = g.p1.x - g.p0.x, j12 = g.p2.x - g.p0.x;
  const double j21 = g.p1.y - g.p0.y, j22 = g.p2.y - g.p0.y;
  const double det = j11 * j22 - j12 * j21;
  g.area = 0.5 * det;
  g.invJT[0][0] = j22 / det;
  g.invJT[0][1] = -j21 / det;
  g.invJT[1][0] = -j12 / det;
  g.invJT[1][1] = j11 / det;
  return g;
}

enum class FormKind { Mass, Killing, Conformal };

inline SymSparseMatrix assemble_form(const Triangulation& tri, const DofMap& dm,
                                     const MetricField& metric, FormKind kind) {
  const auto& rule = triangle_rule_deg5();
  const int nloc = dm.nodes_per_elem();
  const int nl2 = 2 * nloc;
  std::vector<std::tuple<int, int, double>> trip;
  trip.reserve(std::size_t(tri.n_triangles()) * nl2 * nl2 / 2);

  std::vector<double> loc(nl2 * nl2);
  std::vector<double> phi(nloc);
  std::vector<Vec2> gphi(nloc);
  std::vector<Mat2> D(nl2), P(nl2);

  for (int t = 0; t < tri.n_triangles(); ++t) {
    const ElemGeom eg = elem_geom(tri, t);
    if (eg.area <= 0.0) throw numerical_error("assemble: inverted triangle");
    std::fill(loc.begin(), loc.end(), 0.0);

    for (const auto& qp : rule) {
      const Vec2 xq = eg.p0 * qp.l1 + eg.p1 * qp.l2 + eg.p2 * qp.l3;
      const Sym2 g = metric.eval(xq);
      const double w = qp.w * eg.area * std::sqrt(det(g));

      for (int a = 0; a < nloc; ++a) {
        phi[a] = shape_value(dm.element, a, qp.l1, qp.l2, qp.l3);
        const Vec2 gr = shape_grad_ref(dm.element, a, qp.l1, qp.l2, qp.l3);
        gphi[a] = {eg.invJT[0][0] * gr.x + eg.invJT[0][1] * gr.y,
                   eg.invJT[1][0] * gr.x + eg.invJT[1][1] * gr.y};
      }

      if (kind == FormKind::Mass) {
        for (int a = 0; a < nloc; ++a)
          for (int b = 0; b < nloc; ++b) {
            const double pp = w * phi[a] * phi[b];
            for (int c = 0; c < 2; ++c)
              for (int d = 0; d < 2; ++d)
                loc[(2 * a + c) * nl2 + 2 * b + d] += pp * g(c, d);
          }
        continue;
      }

      const Sym2 ginv = inverse(g);
      const Christoffel gamma = christoffel(metric, xq);
      const Mat2 gf = g.full(), gi = ginv.full();

      for (int a = 0; a < nloc; ++a)
        for (int c = 0; c < 2; ++c) {
          Mat2 d;
          for (int k = 0; k < 2; ++k)
            for (int j = 0; j < 2; ++j)
              d[k][j] = (k == c ? gphi[a][j] : 0.0) + gamma[k][c][j] * phi[a];
          D[2 * a + c] = d;
          P[2 * a + c] = matmul(matmul(gf, d), gi);
        }

      for (int i = 0; i < nl2; ++i)
        for (int j = 0; j < nl2; ++j) {
          const Mat2 &A = D[i], &B = D[j], &PA = P[i];
          double v = PA[0][0] * B[0][0] + PA[0][1] * B[0][1] + PA[1][0] * B[1][0] +
                     PA[1][1] * B[1][1];                                     // g(Du, Dv)
          v += A[0][0] * B[0][0] + A[0][1] * B[1][0] + A[1][0] * B[0][1] +
               A[1][1] * B[1][1];                                            // tr(Du Dv)
          if (kind == FormKind::Conformal) v -= trace(A) * trace(B);         // (2/n) div div
          loc[i * nl2 + j] += w * v;
        }
    }

    // Scatter with identification signs; each unordered global pair is
    // emitted by exactly one ordered local pair.
    for (int a = 0; a < nloc; ++a) {
      const int na = dm.elem_nodes[t][a];
      for (int c = 0; c < 2; ++c) {
        const int I = dm.dof(na, c);
        const double sa = dm.sign(na, c);
        for (int b = 0; b < nloc; ++b) {
          const int nb = dm.elem_nodes[t][b];
          for (int d = 0; d < 2; ++d) {
            const int J = dm.dof(nb, d);
            if (I > J) continue;
            trip.emplace_back(I, J, sa * dm.sign(nb, d) * loc[(2 * a + c) * nl2 + 2 * b + d]);
          }
        }
      }
    }
  }
  return SymSparseMatrix::from_triplets(dm.n_dofs(), std::move(trip));
}

inline SymSparseMatrix assemble_mass(const Triangulation& tri, const DofMap& dm,
                                     const MetricField& metric) {
  return assemble_form(tri, dm, metric, FormKind::Mass);
}
inline SymSparseMatrix assemble_killing(const Triangulation& tri, const DofMap& dm,
                                        const MetricField& metric) {
  return assemble_form(tri, dm, metric, FormKind::Killing);
}
inline SymSparseMatrix assemble_conformal(const Triangulation& tri, const DofMap& dm,
                                          const MetricField& metric) {
  return assemble_form(tri, dm, metric, FormKind::Conformal);
}

// --- discrete fields ------------------------------------------------------

struct DiscreteField {
  std::vector<double> dofs;
};

inline Vec2 field_value_at_node(const DofMap& dm, const DiscreteField& f, int node) {
  return {dm.sign(node, 0) * f.dofs[dm.dof(node, 0)], dm.sign(node, 1) * f.dofs[dm.dof(node, 1)]};
}

// Nodal interpolation; on identified meshes the value is taken at each
// class representative.
template <class Fn>
DiscreteField interpolate(const DofMap& dm, Fn&& fn) {
  DiscreteField f;
  f.dofs.assign(dm.n_dofs(), 0.0);
  for (int c = 0; c < dm.id.n_classes; ++c) {
    const int node = dm.id.representative[c];
    const Vec2 v = fn(dm.node_pos[node]);
    f.dofs[2 * c] = v.x;
    f.dofs[2 * c + 1] = v.y;
  }
  return f;
}

struct FieldEval {
  Vec2 value;
  Mat2 du;  // du[k][j] = d_j u^k in chart coordinates
};

inline FieldEval eval_on_element(const Triangulation& tri, const DofMap& dm,
                                 const DiscreteField& f, int t, double l1, double l2, double l3) {
  const ElemGeom eg = elem_geom(tri, t);
  const int nloc = dm.nodes_per_elem();
  FieldEval r;
  for (int a = 0; a < nloc; ++a) {
    const int na = dm.elem_nodes[t][a];
    const Vec2 ua = field_value_at_node(dm, f, na);
    const double ph = shape_value(dm.element, a, l1, l2, l3);
    const Vec2 gr = shape_grad_ref(dm.element, a, l1, l2, l3);
    const Vec2 gp{eg.invJT[0][0] * gr.x + eg.invJT[0][1] * gr.y,
                  eg.invJT[1][0] * gr.x + eg.invJT[1][1] * gr.y};
    r.value.x += ph * ua.x;
    r.value.y += ph * ua.y;
    for (int j = 0; j < 2; ++j) {
      r.du[0][j] += gp[j] * ua.x;
      r.du[1][j] += gp[j] * ua.y;
    }
  }
  return r;
}

// Point evaluation by element search (the mesh sizes here never justify an
// acceleration structure).
inline FieldEval evaluate(const Triangulation& tri, const DofMap& dm, const DiscreteField& f,
                          const Vec2& x, double tol = 1e-12) {
  for (int t = 0; t < tri.n_triangles(); ++t) {
    const auto& T = tri.triangles[t];
    const Vec2 &a = tri.vertices[T[0]], &b = tri.vertices[T[1]], &c = tri.vertices[T[2]];
    const double A = signed_area(a, b, c);
    const double l2 = signed_area(a, x, c) / A;
    const double l3 = signed_area(a, b, x) / A;
    const double l1 = 1.0 - l2 - l3;
    const double scale = tol * std::max(1.0, std::abs(A));
    if (l1 >= -scale && l2 >= -scale && l3 >= -scale)
      return eval_on_element(tri, dm, f, t, l1, l2, l3);
  }
  throw numerical_error("evaluate: point (" + std::to_string(x.x) + ", " + std::to_string(x.y) +
                        ") outside the triangulation");
}

}  // namespace kvf
