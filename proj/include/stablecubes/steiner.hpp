#pragma once

#include <algorithm>
#include <bit>
#include <deque>
#include <map>
#include <queue>
#include <set>
#include <vector>

#include "stablecubes/metric_graph.hpp"

namespace stablecubes {

// A 1-complex in a MetricGraph spanning a list of terminal sets: collapsing
// each terminal set to a point makes the union connected and acyclic.
struct EmbeddedNetwork {
  std::vector<Vertex> vertices;               // sorted
  std::vector<Edge> edges;                    // canonical pairs, sorted
  std::vector<std::vector<Vertex>> terminals;  // as supplied (members sorted)
  int total_length = 0;                       // == edges.size()
  bool exact = true;                          // false => MST approximation

  bool has_vertex(Vertex v) const {
    return std::binary_search(vertices.begin(), vertices.end(), v);
  }
};

namespace detail {

struct Dsu {
  std::vector<int> p;
  explicit Dsu(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
  int find(int x) { return p[x] == x ? x : p[x] = find(p[x]); }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    p[a] = b;
    return true;
  }
};

inline void finish_network(const MetricGraph& g, EmbeddedNetwork& net) {
  std::sort(net.edges.begin(), net.edges.end());
  net.edges.erase(std::unique(net.edges.begin(), net.edges.end()), net.edges.end());

  // drop non-terminal leaves (no-op for exact reconstructions)
  std::set<Vertex> term_pts;
  for (auto& A : net.terminals) term_pts.insert(A.begin(), A.end());
  bool changed = true;
  while (changed) {
    changed = false;
    std::map<Vertex, int> deg;
    for (auto [u, v] : net.edges) {
      deg[u]++;
      deg[v]++;
    }
    for (auto it = net.edges.begin(); it != net.edges.end(); ++it) {
      auto [u, v] = *it;
      if ((deg[u] == 1 && !term_pts.count(u)) || (deg[v] == 1 && !term_pts.count(v))) {
        net.edges.erase(it);
        changed = true;
        break;
      }
    }
  }

  std::set<Vertex> vs;
  for (auto [u, v] : net.edges) {
    vs.insert(u);
    vs.insert(v);
  }
  if (net.edges.empty() && net.terminals.size() == 1 && net.terminals[0].size() == 1)
    vs.insert(net.terminals[0][0]);
  net.vertices.assign(vs.begin(), vs.end());
  net.total_length = int(net.edges.size());
}

// collapse each terminal set to a point; the result must be a connected tree
inline bool collapse_is_tree(const MetricGraph& g, const EmbeddedNetwork& net) {
  std::map<Vertex, int> id;
  auto ensure = [&](Vertex v) {
    auto [it, _] = id.emplace(v, int(id.size()));
    return it->second;
  };
  for (Vertex v : net.vertices) ensure(v);
  for (auto& A : net.terminals)
    for (Vertex v : A) ensure(v);
  Dsu dsu(int(id.size()));
  for (auto& A : net.terminals)
    for (size_t i = 1; i < A.size(); ++i) dsu.unite(id.at(A[0]), id.at(A[i]));
  for (auto [u, v] : net.edges)
    if (!dsu.unite(id.at(u), id.at(v))) return false;  // cycle after collapse
  int root = dsu.find(0);
  for (auto& [v, i] : id)
    if (dsu.find(i) != root) return false;
  return true;
}

}  // namespace detail

// Minimal network spanning a list of terminal sets (lambda' in the spanning
// sense; singleton terminal sets reproduce the point case). Exact mode runs
// Dreyfus-Wagner dynamic programming over super-terminals; above `exact_limit`
// terminal sets a metric-closure MST approximation is returned and flagged.
// Deterministic: ties are broken by canonical (lexicographic) order throughout,
// so the output is a pure function of the input.
inline EmbeddedNetwork steiner_network(const MetricGraph& g,
                                       std::vector<std::vector<Vertex>> terminal_sets,
                                       int exact_limit = 8) {
  if (terminal_sets.empty()) throw input_error("steiner_network: no terminal sets");
  for (auto& A : terminal_sets) {
    if (A.empty()) throw input_error("steiner_network: empty terminal set");
    std::sort(A.begin(), A.end());
    A.erase(std::unique(A.begin(), A.end()), A.end());
    for (Vertex v : A)
      if (v < 0 || v >= g.vertex_count()) throw input_error("steiner_network: unknown vertex");
  }
  std::sort(terminal_sets.begin(), terminal_sets.end());
  terminal_sets.erase(std::unique(terminal_sets.begin(), terminal_sets.end()),
                      terminal_sets.end());

  EmbeddedNetwork net;
  net.terminals = terminal_sets;
  const int t = int(terminal_sets.size());
  const int n = g.vertex_count();

  if (t == 1) {
    if (terminal_sets[0].size() == 1) net.vertices = terminal_sets[0];
    detail::finish_network(g, net);
    return net;
  }

  if (t > exact_limit) {
    // metric-closure MST on super-terminals, expanded along canonical geodesics
    net.exact = false;
    std::vector<std::vector<int>> dset(t);
    for (int i = 0; i < t; ++i) dset[i] = g.distances_from_set(terminal_sets[i]);
    std::vector<std::tuple<int, int, int>> cands;  // (dist, i, j)
    for (int i = 0; i < t; ++i)
      for (int j = i + 1; j < t; ++j) {
        int d = n;
        for (Vertex v : terminal_sets[j]) d = std::min(d, dset[i][v]);
        cands.push_back({d, i, j});
      }
    std::sort(cands.begin(), cands.end());
    detail::Dsu dsu(t);
    for (auto [d, i, j] : cands) {
      if (!dsu.unite(i, j)) continue;
      // canonical closest pair: least x in A_i with d(x, A_j) == d, then least y
      Vertex x = -1;
      for (Vertex v : terminal_sets[i])
        if (dset[j][v] == d) {
          x = v;
          break;
        }
      auto row = g.distances_from(x);
      Vertex y = -1;
      for (Vertex v : terminal_sets[j])
        if ((*row)[v] == d) {
          y = v;
          break;
        }
      auto path = g.canonical_geodesic(x, y);
      for (size_t s = 1; s < path.size(); ++s) net.edges.push_back(make_edge(path[s - 1], path[s]));
    }
    // expansions can overlap: keep a canonical spanning forest of the collapsed union
    std::sort(net.edges.begin(), net.edges.end());
    net.edges.erase(std::unique(net.edges.begin(), net.edges.end()), net.edges.end());
    std::map<Vertex, int> id;
    auto node = [&](Vertex v) {
      auto [it, _] = id.emplace(v, int(id.size()));
      return it->second;
    };
    for (auto [u, v] : net.edges) {
      node(u);
      node(v);
    }
    for (auto& A : terminal_sets)
      for (Vertex v : A) node(v);
    detail::Dsu cyc(int(id.size()));
    for (auto& A : terminal_sets)
      for (size_t i = 1; i < A.size(); ++i) cyc.unite(id.at(A[0]), id.at(A[i]));
    std::vector<Edge> kept;
    for (auto e : net.edges)
      if (cyc.unite(id.at(e.first), id.at(e.second))) kept.push_back(e);
    net.edges = std::move(kept);
    detail::finish_network(g, net);
    return net;
  }

  // Dreyfus-Wagner on the auxiliary graph: real vertices plus one super node
  // per terminal set, joined to its members by 0-length edges. Networks may
  // route *through* a terminal set (the collapse connects the branches), which
  // is exactly a lateral hop across a super node. dp[S][u] = minimal length of
  // a network whose collapse connects all super nodes in S to aux node u.
  const int full = (1 << t) - 1;
  const int inf = 1 << 29;
  const int naux = n + t;
  auto is_super = [&](int u) { return u >= n; };

  // 0-1 BFS distances in the aux graph from each super node
  std::vector<std::vector<int>> daux(t);
  {
    std::vector<std::vector<int>> member_of(n);  // supers containing a real vertex
    for (int i = 0; i < t; ++i)
      for (Vertex v : terminal_sets[i]) member_of[v].push_back(i);
    for (int i = 0; i < t; ++i) {
      auto& d = daux[i];
      d.assign(naux, inf);
      std::deque<int> dq;
      d[n + i] = 0;
      dq.push_back(n + i);
      while (!dq.empty()) {
        int u = dq.front();
        dq.pop_front();
        if (is_super(u)) {
          for (Vertex w : terminal_sets[u - n])
            if (d[u] < d[w]) {
              d[w] = d[u];
              dq.push_front(w);
            }
        } else {
          for (int j : member_of[u])
            if (d[u] < d[n + j]) {
              d[n + j] = d[u];
              dq.push_front(n + j);
            }
          for (Vertex w : g.neighbors(u))
            if (d[u] + 1 < d[w]) {
              d[w] = d[u] + 1;
              dq.push_back(w);
            }
        }
      }
    }
    std::vector<std::vector<int>> dp(full + 1);
    for (int i = 0; i < t; ++i) dp[1 << i] = daux[i];

    auto merge_val = [&](int S, int u) {
      int low = S & -S;
      int best = inf;
      for (int T = (S - 1) & S; T; T = (T - 1) & S) {
        if (!(T & low) || T == S) continue;
        best = std::min(best, dp[T][u] + dp[S ^ T][u]);
      }
      return best;
    };

    for (int S = 1; S <= full; ++S) {
      if ((S & (S - 1)) == 0) continue;
      auto& row = dp[S];
      row.assign(naux, inf);
      int maxd = 0;
      for (int u = 0; u < naux; ++u) {
        row[u] = merge_val(S, u);
        if (row[u] < inf) maxd = std::max(maxd, row[u]);
      }
      // Dial relaxation over 0/1 weights
      std::vector<std::vector<int>> bucket(maxd + n + 2);
      for (int u = 0; u < naux; ++u)
        if (row[u] < inf) bucket[row[u]].push_back(u);
      for (int d = 0; d < int(bucket.size()); ++d)
        for (size_t bi = 0; bi < bucket[d].size(); ++bi) {
          int u = bucket[d][bi];
          if (row[u] != d) continue;
          if (is_super(u)) {
            for (Vertex w : terminal_sets[u - n])
              if (row[w] > d) {
                row[w] = d;
                bucket[d].push_back(w);
              }
          } else {
            for (int j : member_of[u])
              if (row[n + j] > d) {
                row[n + j] = d;
                bucket[d].push_back(n + j);
              }
            for (Vertex w : g.neighbors(u))
              if (row[w] > d + 1) {
                row[w] = d + 1;
                bucket[d + 1].push_back(w);
              }
          }
        }
    }

    int root = 0;
    for (int u = 1; u < naux; ++u)
      if (dp[full][u] < dp[full][root]) root = u;

    // canonical reconstruction: prefer a merge; else a strict downhill real
    // step; else hop laterally (0-cost, through super nodes) to the canonically
    // least node where a merge fires or a strict step exists
    auto zero_neighbors = [&](int u) {
      std::vector<int> out;
      if (is_super(u)) {
        for (Vertex w : terminal_sets[u - n]) out.push_back(w);
      } else {
        for (int j : member_of[u]) out.push_back(n + j);
      }
      return out;
    };

    std::vector<std::pair<int, int>> stack{{full, root}};
    while (!stack.empty()) {
      auto [S, u] = stack.back();
      stack.pop_back();
      while (true) {
        const bool single = (S & (S - 1)) == 0;
        const auto& row = dp[S];
        if (single && row[u] == 0) break;  // reached the terminal set
        if (!single && merge_val(S, u) == row[u]) {
          int low = S & -S, pick = -1;
          for (int T = (S - 1) & S; T; T = (T - 1) & S) {
            if (!(T & low) || T == S) continue;
            if (dp[T][u] + dp[S ^ T][u] == row[u]) pick = T;  // last hit = least T
          }
          stack.push_back({S ^ pick, u});
          S = pick;
          continue;
        }
        // strict real step from u itself
        int nxt = -1;
        if (!is_super(u)) {
          for (Vertex w : g.neighbors(u))
            if (row[w] == row[u] - 1) {
              nxt = w;
              break;
            }
        }
        if (nxt >= 0) {
          net.edges.push_back(make_edge(u, nxt));
          u = nxt;
          continue;
        }
        // lateral 0-cost hop: BFS the equal-dp 0-closure, pick the canonically
        // least node offering progress
        std::vector<int> closure{u};
        std::vector<char> seen(naux, 0);
        seen[u] = 1;
        int dest = -1;
        for (size_t qi = 0; qi < closure.size() && dest < 0; ++qi) {
          for (int w : zero_neighbors(closure[qi])) {
            if (seen[w] || row[w] != row[u]) continue;
            seen[w] = 1;
            closure.push_back(w);
            bool progress = false;
            if (!single && merge_val(S, w) == row[w]) progress = true;
            if (single && row[w] == 0) progress = true;
            if (!progress && !is_super(w)) {
              for (Vertex x : g.neighbors(w))
                if (row[x] == row[w] - 1) progress = true;
            }
            if (progress) {
              dest = w;
              break;
            }
          }
        }
        if (dest < 0) throw invariant_error("steiner reconstruction: no progress");
        u = dest;  // 0-edges contribute no length and no real edges
      }
    }
  }

  detail::finish_network(g, net);
  if (!detail::collapse_is_tree(g, net))
    throw invariant_error("steiner_network: collapsed network is not a tree");
  return net;
}

}  // namespace stablecubes
