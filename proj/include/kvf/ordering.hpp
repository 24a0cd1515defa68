#pragma once

// Fill-reducing orderings: exact minimum degree for small problems and
// reverse Cuthill-McKee for larger ones, where the quadratic bookkeeping of
// the former stops being harmless. Ties break toward the smallest index so
// orderings are deterministic.

#include <algorithm>
#include <set>
#include <vector>

#include "kvf/sparse.hpp"

namespace kvf {

inline std::vector<int> min_degree_ordering(const SymSparseMatrix& A) {
  const int n = A.n;
  std::vector<std::set<int>> adj(n);
  for (int i = 0; i < n; ++i)
    for (int p = A.row_ptr[i]; p < A.row_ptr[i + 1]; ++p) {
      const int j = A.col[p];
      if (i == j) continue;
      adj[i].insert(j);
      adj[j].insert(i);
    }

  std::vector<int> perm;
  perm.reserve(n);
  std::vector<char> gone(n, 0);
  for (int step = 0; step < n; ++step) {
    int best = -1;
    std::size_t best_deg = 0;
    for (int v = 0; v < n; ++v) {
      if (gone[v]) continue;
      if (best < 0 || adj[v].size() < best_deg) {
        best = v;
        best_deg = adj[v].size();
      }
    }
    gone[best] = 1;
    perm.push_back(best);
    for (int u : adj[best]) adj[u].erase(best);
    for (auto it = adj[best].begin(); it != adj[best].end(); ++it) {
      auto jt = it;
      for (++jt; jt != adj[best].end(); ++jt) {
        adj[*it].insert(*jt);
        adj[*jt].insert(*it);
      }
    }
    adj[best].clear();
  }
  return perm;
}

inline std::vector<int> rcm_ordering(const SymSparseMatrix& A) {
  const int n = A.n;
  std::vector<std::vector<int>> adj(n);
  for (int i = 0; i < n; ++i)
    for (int p = A.row_ptr[i]; p < A.row_ptr[i + 1]; ++p) {
      const int j = A.col[p];
      if (i == j) continue;
      adj[i].push_back(j);
      adj[j].push_back(i);
    }
  for (auto& a : adj) {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }
  const auto deg_less = [&](int a, int b) {
    if (adj[a].size() != adj[b].size()) return adj[a].size() < adj[b].size();
    return a < b;
  };

  std::vector<int> level(n);
  std::vector<int> queue;
  const auto bfs = [&](int root) {  // returns the last (deepest, lowest-degree) node
    queue.assign(1, root);
    std::fill(level.begin(), level.end(), -1);
    level[root] = 0;
    std::vector<int> next;
    for (std::size_t h = 0; h < queue.size(); ++h) {
      const int v = queue[h];
      next.clear();
      for (int u : adj[v])
        if (level[u] < 0) {
          level[u] = level[v] + 1;
          next.push_back(u);
        }
      std::sort(next.begin(), next.end(), deg_less);
      queue.insert(queue.end(), next.begin(), next.end());
    }
    return queue.back();
  };

  std::vector<int> perm;
  perm.reserve(n);
  std::vector<char> done(n, 0);
  for (int seed = 0; seed < n; ++seed) {
    if (done[seed]) continue;
    int root = seed;  // pseudo-peripheral start within this component
    for (int it = 0; it < 3; ++it) {
      const int far = bfs(root);
      if (far == root) break;
      root = far;
    }
    bfs(root);
    for (int v : queue) {
      perm.push_back(v);
      done[v] = 1;
    }
  }
  std::reverse(perm.begin(), perm.end());
  return perm;
}

inline std::vector<int> fill_reducing_ordering(const SymSparseMatrix& A) {
  return A.n <= 1500 ? min_degree_ordering(A) : rcm_ordering(A);
}

}  // namespace kvf
