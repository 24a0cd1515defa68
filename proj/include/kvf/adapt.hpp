#pragma once

// Mesh adaptation toward quasiuniform Riemannian edge lengths: split long
// edges at their Riemannian midpoint, collapse short ones, and smooth with
// Riemannian-length-weighted vertex averaging.  All operations keep the
// triangulation valid (orientation, edge-manifoldness, metric quality floor)
// by pre-checking and rejecting; operations touching a glued boundary are
// mirrored onto the partner edge so identifications survive.  On domains
// without gluing the boundary polyline is preserved (vertices may be added
// on it, never moved off it).
//
// The returned mesh is the best intermediate state by Riemannian max/min
// edge ratio among those not degrading the quality floor, so the ratio and
// the floor are monotone versus the input by construction.

#include <algorithm>
#include <array>
#include <map>
#include <set>
#include <vector>

#include "kvf/core.hpp"
#include "kvf/mesh.hpp"
#include "kvf/metric.hpp"
#include "kvf/surfaces.hpp"

namespace kvf {
namespace detail {

class MeshEditor {
 public:
  MeshEditor(const Triangulation& t, const MetricField& m, const ChartDomain& dom)
      : metric_(&m), gluing_(dom.identification), lo_(dom.lo), hi_(dom.hi) {
    verts_ = t.vertices;
    tris_ = t.triangles;
    bedges_ = t.boundary_edges;
    vdead_.assign(verts_.size(), 0);
    tdead_.assign(tris_.size(), 0);
    tol_ = 1e-7 * std::max({hi_.x - lo_.x, hi_.y - lo_.y, 1.0});
    v2t_.assign(verts_.size(), {});
    for (int t2 = 0; t2 < int(tris_.size()); ++t2) link_tri(t2);
    bedge_tag_.clear();
    for (const auto& e : bedges_) bedge_tag_[key(e.a, e.b)] = e.tag;
    on_boundary_.assign(verts_.size(), 0);
    for (const auto& e : bedges_) on_boundary_[e.a] = on_boundary_[e.b] = 1;
  }

  void iterate(double target_h) {
    for (int pass = 0; pass < 8; ++pass)
      if (!split_pass(1.4 * target_h)) break;
    for (int pass = 0; pass < 8; ++pass)
      if (!collapse_pass(0.6 * target_h)) break;
    smooth_pass();
    smooth_pass();
  }

  Triangulation extract() const {
    Triangulation out;
    std::vector<int> remap(verts_.size(), -1);
    for (std::size_t i = 0; i < verts_.size(); ++i)
      if (!vdead_[i]) {
        remap[i] = out.n_vertices();
        out.vertices.push_back(verts_[i]);
      }
    for (std::size_t i = 0; i < tris_.size(); ++i)
      if (!tdead_[i])
        out.triangles.push_back({remap[tris_[i][0]], remap[tris_[i][1]], remap[tris_[i][2]]});
    for (const auto& e : bedges_)
      if (!vdead_[e.a] && !vdead_[e.b])
        out.boundary_edges.push_back({remap[e.a], remap[e.b], e.tag});
    return out;
  }

 private:
  using Key = std::pair<int, int>;
  static Key key(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

  void link_tri(int t) {
    for (int e = 0; e < 3; ++e) {
      auto [it, fresh] = e2t_.try_emplace(key(tris_[t][e], tris_[t][(e + 1) % 3]),
                                          std::array<int, 2>{-1, -1});
      auto& slot = it->second;
      if (slot[0] == t || slot[1] == t) continue;
      if (slot[0] < 0)
        slot[0] = t;
      else if (slot[1] < 0)
        slot[1] = t;
      else
        throw numerical_error("adapt: non-manifold edge produced");
    }
    for (int v : tris_[t]) v2t_[v].push_back(t);
  }

  void unlink_tri(int t) {
    for (int e = 0; e < 3; ++e) {
      auto it = e2t_.find(key(tris_[t][e], tris_[t][(e + 1) % 3]));
      if (it == e2t_.end()) continue;
      auto& slot = it->second;
      if (slot[1] == t) slot[1] = -1;
      if (slot[0] == t) {
        slot[0] = slot[1];
        slot[1] = -1;
      }
      if (slot[0] < 0) e2t_.erase(it);
    }
  }

  int sides(const Vec2& p) const {
    if (gluing_ == Gluing::None) return 0;
    int s = 0;
    if (std::abs(p.x - lo_.x) <= tol_) s |= 1;
    if (std::abs(p.x - hi_.x) <= tol_) s |= 2;
    if (std::abs(p.y - lo_.y) <= tol_) s |= 4;
    if (std::abs(p.y - hi_.y) <= tol_) s |= 8;
    return s;
  }
  static bool corner(int s) { return (s & 3) && (s & 12); }
  bool frozen(int v) const { return gluing_ == Gluing::None && on_boundary_[v]; }

  Vec2 partner_pos(const Vec2& p, int side) const {
    const double w = hi_.x - lo_.x;
    if (side & 1) return {p.x + w, p.y};
    if (side & 2) return {p.x - w, p.y};
    const double yto = (side & 4) ? hi_.y : lo_.y;
    if (gluing_ == Gluing::KleinFlip) return {lo_.x + hi_.x - p.x, yto};
    return {p.x, yto};
  }

  int vertex_at(const Vec2& p) const {
    for (std::size_t i = 0; i < verts_.size(); ++i)
      if (!vdead_[i] && std::abs(verts_[i].x - p.x) <= tol_ && std::abs(verts_[i].y - p.y) <= tol_)
        return int(i);
    return -1;
  }

  double edge_len(int a, int b) const {
    return riemannian_edge_length(*metric_, verts_[a], verts_[b]);
  }

  std::vector<int> tris_of(int v) const {
    std::vector<int> out;
    for (int t : v2t_[v]) {
      if (tdead_[t]) continue;
      if (tris_[t][0] != v && tris_[t][1] != v && tris_[t][2] != v) continue;
      bool dup = false;
      for (int u : out) dup = dup || u == t;
      if (!dup) out.push_back(t);
    }
    return out;
  }

  // Lowest metric quality over the triangles of v with v virtually at p;
  // negative if any triangle inverts.
  double ring_quality(int v, const Vec2& p) const {
    double q = 1.0;
    for (int t : tris_of(v)) {
      Vec2 pos[3];
      for (int e = 0; e < 3; ++e) pos[e] = tris_[t][e] == v ? p : verts_[tris_[t][e]];
      if (signed_area(pos[0], pos[1], pos[2]) <= 0.0) return -1.0;
      q = std::min(q, triangle_quality(*metric_, pos[0], pos[1], pos[2]));
    }
    return q;
  }

  Vec2 riem_midpoint(const Vec2& a, const Vec2& b) const {
    const double full = riemannian_edge_length(*metric_, a, b);
    double t0 = 0.0, t1 = 1.0;
    for (int it = 0; it < 40; ++it) {
      const double tm = 0.5 * (t0 + t1);
      (riemannian_edge_length(*metric_, a, a + (b - a) * tm) < 0.5 * full ? t0 : t1) = tm;
    }
    return a + (b - a) * (0.5 * (t0 + t1));
  }

  // --- split ---------------------------------------------------------------

  struct SplitPlan {
    int a = -1, b = -1, tri0 = -1, tri1 = -1;
    Vec2 mid;
    int tag = -1;  // boundary tag, -1 interior
  };

  bool plan_split(int a, int b, SplitPlan& plan) const {
    auto it = e2t_.find(key(a, b));
    if (it == e2t_.end()) return false;
    plan.a = a;
    plan.b = b;
    plan.tri0 = it->second[0];
    plan.tri1 = it->second[1];
    plan.mid = riem_midpoint(verts_[a], verts_[b]);
    auto bt = bedge_tag_.find(key(a, b));
    plan.tag = bt == bedge_tag_.end() ? -1 : bt->second;
    if (plan.tag >= 0) {
      const int s = sides(verts_[a]) & sides(verts_[b]);
      if (s & 1) plan.mid.x = lo_.x;
      if (s & 2) plan.mid.x = hi_.x;
      if (s & 4) plan.mid.y = lo_.y;
      if (s & 8) plan.mid.y = hi_.y;
    }
    for (int t : {plan.tri0, plan.tri1}) {
      if (t < 0) continue;
      const auto& T = tris_[t];
      const double qold = triangle_quality(*metric_, verts_[T[0]], verts_[T[1]], verts_[T[2]]);
      for (int e = 0; e < 3; ++e) {
        const int va = T[e], vb = T[(e + 1) % 3], vc = T[(e + 2) % 3];
        if (key(va, vb) != key(a, b)) continue;
        const double q1 = triangle_quality(*metric_, verts_[va], plan.mid, verts_[vc]);
        const double q2 = triangle_quality(*metric_, plan.mid, verts_[vb], verts_[vc]);
        if (std::min(q1, q2) < std::min(0.05, qold)) return false;
      }
    }
    return true;
  }

  void apply_split(const SplitPlan& plan) {
    const int mv = int(verts_.size());
    verts_.push_back(plan.mid);
    vdead_.push_back(0);
    v2t_.push_back({});
    on_boundary_.push_back(plan.tag >= 0 ? 1 : 0);
    for (int t : {plan.tri0, plan.tri1}) {
      if (t < 0) continue;
      const std::array<int, 3> T = tris_[t];
      unlink_tri(t);
      tdead_[t] = 1;
      for (int e = 0; e < 3; ++e) {
        const int va = T[e], vb = T[(e + 1) % 3], vc = T[(e + 2) % 3];
        if (key(va, vb) != key(plan.a, plan.b)) continue;
        tris_.push_back({va, mv, vc});
        tdead_.push_back(0);
        link_tri(int(tris_.size()) - 1);
        tris_.push_back({mv, vb, vc});
        tdead_.push_back(0);
        link_tri(int(tris_.size()) - 1);
        break;
      }
    }
    if (plan.tag >= 0) {
      bedge_tag_.erase(key(plan.a, plan.b));
      bedge_tag_[key(plan.a, mv)] = plan.tag;
      bedge_tag_[key(mv, plan.b)] = plan.tag;
      for (std::size_t i = 0; i < bedges_.size(); ++i)
        if (key(bedges_[i].a, bedges_[i].b) == key(plan.a, plan.b)) {
          const int tag = bedges_[i].tag;
          bedges_[i] = {plan.a, mv, tag};
          bedges_.push_back({mv, plan.b, tag});
          break;
        }
    }
  }

  // Seam partner of a glued boundary edge; false when the edge is not glued.
  bool seam_partner(int a, int b, int& pa, int& pb) const {
    if (gluing_ == Gluing::None) return false;
    const int s = sides(verts_[a]) & sides(verts_[b]);
    if (!s) return false;
    pa = vertex_at(partner_pos(verts_[a], s));
    pb = vertex_at(partner_pos(verts_[b], s));
    if (pa < 0 || pb < 0) throw gluing_mismatch_error("adapt: glued edge lost its partner");
    return true;
  }

  bool split_pass(double limit) {
    struct Cand {
      double len;
      int a, b;
    };
    std::vector<Cand> cands;
    for (const auto& [k, ts] : e2t_) {
      const double l = edge_len(k.first, k.second);
      if (l > limit) cands.push_back({l, k.first, k.second});
    }
    std::sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) {
      return x.len != y.len ? x.len > y.len : key(x.a, x.b) < key(y.a, y.b);
    });
    bool any = false;
    for (const auto& c : cands) {
      if (e2t_.find(key(c.a, c.b)) == e2t_.end()) continue;
      SplitPlan plan;
      if (!plan_split(c.a, c.b, plan)) continue;
      int pa = -1, pb = -1;
      if (plan.tag >= 0 && seam_partner(c.a, c.b, pa, pb)) {
        if (key(pa, pb) == key(c.a, c.b)) continue;  // self-paired seam edge
        SplitPlan pplan;
        if (!plan_split(pa, pb, pplan)) continue;
        const int s = sides(verts_[c.a]) & sides(verts_[c.b]);
        pplan.mid = partner_pos(plan.mid, s);
        apply_split(plan);
        apply_split(pplan);
      } else {
        apply_split(plan);
      }
      any = true;
    }
    return any;
  }

  // --- collapse --------------------------------------------------------------

  struct CollapsePlan {
    int keep = -1, gone = -1;
    Vec2 pos;
    bool boundary = false;
  };

  // forced_keep >= 0 pins the kept endpoint (used to mirror seam collapses).
  bool plan_collapse(int a, int b, CollapsePlan& plan, int forced_keep = -1) const {
    const auto it = e2t_.find(key(a, b));
    if (it == e2t_.end()) return false;
    if (frozen(a) || frozen(b)) return false;
    const int sa = sides(verts_[a]), sb = sides(verts_[b]);
    const bool is_bedge = bedge_tag_.count(key(a, b)) > 0;
    plan.boundary = false;
    if (sa && sb) {
      if (!is_bedge) return false;  // chord between boundary points would pinch
      if (corner(sa) && corner(sb)) return false;
      plan.keep = corner(sa) ? a : corner(sb) ? b : a;
      plan.boundary = true;
    } else if (sa || sb) {
      plan.keep = sa ? a : b;
    } else {
      plan.keep = a;
    }
    if (forced_keep >= 0) {
      if (forced_keep != a && forced_keep != b) return false;
      const int other = forced_keep == a ? b : a;
      if (corner(sides(verts_[other]))) return false;
      if (sides(verts_[other]) && !plan.boundary) return false;
      plan.keep = forced_keep;
    }
    plan.gone = plan.keep == a ? b : a;
    if (sides(verts_[plan.gone]) && !plan.boundary) return false;  // keep seam shape
    plan.pos = (sa || sb) ? verts_[plan.keep] : riem_midpoint(verts_[a], verts_[b]);

    // link condition: common neighbors of a and b must be exactly the
    // opposite vertices of the shared triangles
    std::set<int> na;
    for (int t : tris_of(a))
      for (int v : tris_[t])
        if (v != a && v != b) na.insert(v);
    std::set<int> opp;
    for (int t : {it->second[0], it->second[1]}) {
      if (t < 0) continue;
      for (int v : tris_[t])
        if (v != a && v != b) opp.insert(v);
    }
    for (int t : tris_of(b))
      for (int v : tris_[t]) {
        if (v == a || v == b || !na.count(v)) continue;
        if (!opp.count(v)) return false;
      }

    // the merged ring must stay oriented and above the quality floor
    for (int vv : {a, b}) {
      for (int t : tris_of(vv)) {
        int hits = 0;
        for (int u : tris_[t]) hits += (u == a || u == b) ? 1 : 0;
        if (hits == 2) continue;  // triangle disappears with the edge
        Vec2 pos[3];
        for (int e = 0; e < 3; ++e) {
          const int u = tris_[t][e];
          pos[e] = (u == a || u == b) ? plan.pos : verts_[u];
        }
        if (signed_area(pos[0], pos[1], pos[2]) <= 0.0) return false;
        const double qold =
            triangle_quality(*metric_, verts_[tris_[t][0]], verts_[tris_[t][1]], verts_[tris_[t][2]]);
        if (triangle_quality(*metric_, pos[0], pos[1], pos[2]) < std::min(0.1, qold)) return false;
      }
    }
    return true;
  }

  void apply_collapse(const CollapsePlan& plan) {
    const int a = plan.keep, b = plan.gone;
    std::set<int> affected;
    for (int t : tris_of(a)) affected.insert(t);
    for (int t : tris_of(b)) affected.insert(t);
    for (int t : affected) unlink_tri(t);
    verts_[a] = plan.pos;
    for (int t : affected) {
      int hits = 0;
      for (int& u : tris_[t]) {
        if (u == b) u = a;
        hits += u == a ? 1 : 0;
      }
      if (hits >= 2)
        tdead_[t] = 1;
      else
        link_tri(t);
    }
    if (plan.boundary) {
      std::vector<BoundaryEdge> nb;
      for (auto e : bedges_) {
        if (key(e.a, e.b) == key(a, b)) continue;
        if (e.a == b) e.a = a;
        if (e.b == b) e.b = a;
        nb.push_back(e);
      }
      bedges_ = std::move(nb);
      bedge_tag_.clear();
      for (const auto& e : bedges_) bedge_tag_[key(e.a, e.b)] = e.tag;
    }
    vdead_[b] = 1;
  }

  bool rings_overlap(int a, int b, int pa, int pb) const {
    std::set<int> own;
    for (int v : {a, b})
      for (int t : tris_of(v)) own.insert(t);
    for (int v : {pa, pb})
      for (int t : tris_of(v))
        if (own.count(t)) return true;
    return false;
  }

  bool collapse_pass(double limit) {
    struct Cand {
      double len;
      int a, b;
    };
    std::vector<Cand> cands;
    for (const auto& [k, ts] : e2t_) {
      const double l = edge_len(k.first, k.second);
      if (l < limit) cands.push_back({l, k.first, k.second});
    }
    std::sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) {
      return x.len != y.len ? x.len < y.len : key(x.a, x.b) < key(y.a, y.b);
    });
    bool any = false;
    for (const auto& c : cands) {
      if (e2t_.find(key(c.a, c.b)) == e2t_.end()) continue;
      if (vdead_[c.a] || vdead_[c.b]) continue;
      CollapsePlan plan;
      if (!plan_collapse(c.a, c.b, plan)) continue;
      int pa = -1, pb = -1;
      if (plan.boundary && seam_partner(c.a, c.b, pa, pb)) {
        if (key(pa, pb) == key(c.a, c.b)) continue;
        if (pa == c.a || pa == c.b || pb == c.a || pb == c.b) continue;
        if (rings_overlap(c.a, c.b, pa, pb)) continue;
        const int s = sides(verts_[c.a]) & sides(verts_[c.b]);
        const int want_keep = vertex_at(partner_pos(verts_[plan.keep], s));
        CollapsePlan pplan;
        if (want_keep < 0 || !plan_collapse(pa, pb, pplan, want_keep)) continue;
        apply_collapse(plan);
        apply_collapse(pplan);
      } else {
        apply_collapse(plan);
      }
      any = true;
    }
    return any;
  }

  // --- smoothing -------------------------------------------------------------

  void smooth_pass() {
    const double damp = 0.6;
    for (int v = 0; v < int(verts_.size()); ++v) {
      if (vdead_[v] || frozen(v) || on_boundary_[v] != sides_nonzero(v)) continue;
      const int s = sides(verts_[v]);
      if (corner(s)) continue;
      if (!s) {
        double wsum = 0.0;
        Vec2 acc;
        for (int t : tris_of(v))
          for (int u : tris_[t]) {
            if (u == v) continue;
            const double w = edge_len(v, u);
            acc = acc + verts_[u] * w;
            wsum += w;
          }
        if (wsum <= 0.0) continue;
        const Vec2 target = acc * (1.0 / wsum);
        const Vec2 p = verts_[v] + (target - verts_[v]) * damp;
        if (sides(p)) continue;  // do not migrate onto a glued line
        const double qold = ring_quality(v, verts_[v]);
        if (ring_quality(v, p) >= std::min(0.1, qold)) verts_[v] = p;
        continue;
      }
      const int pv = vertex_at(partner_pos(verts_[v], s));
      if (pv < 0) throw gluing_mismatch_error("adapt: glued vertex lost its partner");
      const bool tangent_is_x = (s & 12) != 0;
      double wsum = 0.0, tacc = 0.0;
      const auto accumulate = [&](int center, bool mapped) {
        for (int t : tris_of(center))
          for (int u : tris_[t]) {
            if (u == center) continue;
            const double w = edge_len(center, u);
            double tc = tangent_is_x ? verts_[u].x : verts_[u].y;
            if (mapped && gluing_ == Gluing::KleinFlip && tangent_is_x) tc = lo_.x + hi_.x - tc;
            tacc += w * tc;
            wsum += w;
          }
      };
      accumulate(v, false);
      accumulate(pv, true);
      if (wsum <= 0.0) continue;
      const double tcur = tangent_is_x ? verts_[v].x : verts_[v].y;
      const double tnew = tcur + damp * (tacc / wsum - tcur);
      Vec2 p = verts_[v];
      (tangent_is_x ? p.x : p.y) = tnew;
      if (corner(sides(p)) || sides(p) != s) continue;  // keep off the corners
      const Vec2 pp = partner_pos(p, s);
      const double qold = std::min(ring_quality(v, verts_[v]), ring_quality(pv, verts_[pv]));
      const double qnew = std::min(ring_quality(v, p), ring_quality(pv, pp));
      if (qnew >= std::min(0.1, qold)) {
        verts_[v] = p;
        verts_[pv] = pp;
      }
    }
  }

  int sides_nonzero(int v) const { return sides(verts_[v]) ? 1 : 0; }

  const MetricField* metric_;
  Gluing gluing_;
  Vec2 lo_, hi_;
  double tol_ = 1e-9;
  std::vector<Vec2> verts_;
  std::vector<std::array<int, 3>> tris_;
  std::vector<BoundaryEdge> bedges_;
  std::vector<char> vdead_, tdead_, on_boundary_;
  std::map<Key, std::array<int, 2>> e2t_;
  std::map<Key, int> bedge_tag_;
  std::vector<std::vector<int>> v2t_;
};

}  // namespace detail

inline Triangulation adapt(const Triangulation& mesh, const MetricField& metric, double target_h,
                           const ChartDomain& domain, int iterations = 10) {
  if (!(target_h > 0.0)) throw config_error("adapt: target_h must be positive");
  check_triangulation(mesh);

  const auto ratio_of = [&](const Triangulation& t) {
    const EdgeLengthStats st = riemannian_edge_stats(t, metric);
    return st.max / st.min;
  };
  const double floor_q = std::min(0.1, min_quality(mesh, metric));

  Triangulation best = mesh;
  double best_ratio = ratio_of(mesh);

  detail::MeshEditor ed(mesh, metric, domain);
  for (int it = 0; it < iterations; ++it) {
    ed.iterate(target_h);
    Triangulation cur = ed.extract();
    check_triangulation(cur);
    if (min_quality(cur, metric) + 1e-12 < floor_q) continue;
    const double r = ratio_of(cur);
    if (r <= best_ratio) {
      best_ratio = r;
      best = std::move(cur);
    }
  }
  return best;
}

}  // namespace kvf
