#pragma once

#include <algorithm>
#include <map>
#include <queue>
#include <vector>

#include "stablecubes/cube_complex.hpp"
#include "stablecubes/metric_graph.hpp"
#include "stablecubes/steiner.hpp"

namespace stablecubes::oracle {

// All coherent orientations of a wallspace, by filtering the full 2^m cube.
// Only usable for small wall counts; this is the ground truth the dual-complex
// enumeration is measured against.
inline std::vector<Bits> enumerate_coherent_orientations(const Wallspace& ws) {
  const int m = ws.wall_count();
  if (m > 22) throw resource_error("oracle enumeration: too many walls");
  std::vector<Bits> out;
  for (uint64_t mask = 0; mask < (uint64_t(1) << m); ++mask) {
    bool ok = true;
    for (int a = 0; a < m && ok; ++a) {
      const Bits& sa = (mask >> a) & 1 ? ws.walls[a].second : ws.walls[a].first;
      for (int b = a + 1; b < m && ok; ++b) {
        const Bits& sb = (mask >> b) & 1 ? ws.walls[b].second : ws.walls[b].first;
        if (!sa.intersects(sb)) ok = false;
      }
    }
    if (!ok) continue;
    Bits v(m);
    for (int w = 0; w < m; ++w)
      if ((mask >> w) & 1) v.set(w);
    out.push_back(v);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// BFS distance in the 1-skeleton.
inline int skeleton_distance(const CubeComplex& cc, int x, int y) {
  if (x == y) return 0;
  std::vector<int> d(cc.vertex_count(), -1);
  std::queue<int> q;
  d[x] = 0;
  q.push(x);
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int w = 0; w < cc.wall_count(); ++w) {
      Bits f = cc.vertex(u);
      f.flip(w);
      int v = cc.vertex_index(f);
      if (v >= 0 && d[v] < 0) {
        if (v == y) return d[u] + 1;
        d[v] = d[u] + 1;
        q.push(v);
      }
    }
  }
  return -1;
}

// BFS in the cube-move graph: one move flips a mutually-crossing set of walls
// (i.e. jumps across one cube).
inline int cube_move_distance(const CubeComplex& cc, int x, int y) {
  if (x == y) return 0;
  auto movable = [&](int u, int v) {
    Bits diff = cc.vertex(u) ^ cc.vertex(v);
    auto ws = diff.to_indices();
    for (size_t a = 0; a < ws.size(); ++a)
      for (size_t b = a + 1; b < ws.size(); ++b)
        if (!cc.crosses(ws[a], ws[b])) return false;
    return true;
  };
  std::vector<int> d(cc.vertex_count(), -1);
  std::queue<int> q;
  d[x] = 0;
  q.push(x);
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int v = 0; v < cc.vertex_count(); ++v) {
      if (d[v] >= 0 || v == u) continue;
      if (!movable(u, v)) continue;
      if (v == y) return d[u] + 1;
      d[v] = d[u] + 1;
      q.push(v);
    }
  }
  return -1;
}

// vertex minimizing the sum of l1 distances to x, y, z (ties: least index)
inline int brute_median(const CubeComplex& cc, int x, int y, int z) {
  int best = -1, bestval = 1 << 30;
  for (int v = 0; v < cc.vertex_count(); ++v) {
    int s = cc.l1_distance(v, x) + cc.l1_distance(v, y) + cc.l1_distance(v, z);
    if (s < bestval) {
      bestval = s;
      best = v;
    }
  }
  return best;
}

// Minimal edge count of a subgraph whose collapse (each terminal set to a point)
// is connected. Exhaustive over edge subsets; graphs must be tiny.
inline int brute_min_network_length(const MetricGraph& g,
                                    const std::vector<std::vector<Vertex>>& terminal_sets) {
  auto edges = g.edges();
  int E = int(edges.size());
  if (E > 22) throw resource_error("brute network: too many edges");
  int n = g.vertex_count();
  int best = 1 << 30;
  for (uint64_t mask = 0; mask < (uint64_t(1) << E); ++mask) {
    int len = std::popcount(mask);
    if (len >= best) continue;
    detail::Dsu dsu(n);
    for (auto& A : terminal_sets)
      for (size_t i = 1; i < A.size(); ++i) dsu.unite(A[0], A[i]);
    for (int e = 0; e < E; ++e)
      if ((mask >> e) & 1) dsu.unite(edges[e].first, edges[e].second);
    int root = dsu.find(terminal_sets[0][0]);
    bool conn = true;
    for (auto& A : terminal_sets)
      if (dsu.find(A[0]) != root) conn = false;
    if (conn) best = len;
  }
  return best;
}

// product of two nested chains: the a-by-b grid complex
inline CubeComplex grid_complex(int a, int b) {
  int m = a + b;
  std::vector<Bits> verts;
  for (int i = 0; i <= a; ++i)
    for (int j = 0; j <= b; ++j) {
      Bits v(m);
      for (int w = 0; w < i; ++w) v.set(w);
      for (int w = 0; w < j; ++w) v.set(a + w);
      verts.push_back(v);
    }
  return CubeComplex::from_orientations(m, std::move(verts));
}

}  // namespace stablecubes::oracle
