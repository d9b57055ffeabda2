#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <queue>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "stablecubes/errors.hpp"

namespace stablecubes {

using Vertex = int;
using Edge = std::pair<Vertex, Vertex>;  // canonical: first < second

inline Edge make_edge(Vertex u, Vertex v) { return u < v ? Edge{u, v} : Edge{v, u}; }

struct Rational {
  long long num = 0;
  long long den = 1;

  static Rational of(long long n, long long d) {
    long long g = std::gcd(n < 0 ? -n : n, d);
    if (g == 0) g = 1;
    return Rational{n / g, d / g};
  }
  bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
  double value() const { return double(num) / double(den); }
};

// Finite connected graph with unit-length edges. Vertices are dense indices
// 0..n-1; `label(v)` carries the external id (sorted ascending, so index order
// and id order agree and lexicographic tie-breaks mean the same thing in both).
//
// Distance rows are computed by BFS on demand and cached; the cache is guarded
// so a const graph can be shared across threads.
class MetricGraph {
 public:
  MetricGraph() = default;

  static MetricGraph from_edges(int n, const std::vector<Edge>& edges) {
    std::vector<long long> labels(n);
    std::iota(labels.begin(), labels.end(), 0);
    return from_labeled_edges(labels, edges);
  }

  // `edges` refer to positions in `labels` after sorting (i.e. dense indices).
  static MetricGraph from_labeled_edges(std::vector<long long> labels,
                                        const std::vector<Edge>& edges) {
    MetricGraph g;
    std::sort(labels.begin(), labels.end());
    for (size_t i = 1; i < labels.size(); ++i)
      if (labels[i] == labels[i - 1]) throw input_error("duplicate vertex id");
    g.labels_ = std::move(labels);
    int n = int(g.labels_.size());
    if (n == 0) throw input_error("graph needs at least one vertex");
    g.adj_.assign(n, {});
    for (auto [u, v] : edges) {
      if (u < 0 || u >= n || v < 0 || v >= n) throw input_error("edge endpoint out of range");
      if (u == v) throw input_error("self-loop");
      g.adj_[u].push_back(v);
      g.adj_[v].push_back(u);
    }
    for (auto& nb : g.adj_) {
      std::sort(nb.begin(), nb.end());
      nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    }
    g.edge_count_ = 0;
    for (auto& nb : g.adj_) g.edge_count_ += int(nb.size());
    g.edge_count_ /= 2;
    g.check_connected();
    return g;
  }

  int vertex_count() const { return int(adj_.size()); }
  int edge_count() const { return edge_count_; }
  long long label(Vertex v) const { return labels_[v]; }

  Vertex index_of_label(long long id) const {
    auto it = std::lower_bound(labels_.begin(), labels_.end(), id);
    if (it == labels_.end() || *it != id) throw input_error("unknown vertex id");
    return Vertex(it - labels_.begin());
  }

  const std::vector<Vertex>& neighbors(Vertex v) const {
    check_vertex(v);
    return adj_[v];
  }

  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count_);
    for (Vertex u = 0; u < vertex_count(); ++u)
      for (Vertex v : adj_[u])
        if (u < v) out.push_back({u, v});
    return out;
  }
  bool has_edge(Vertex u, Vertex v) const {
    const auto& nb = adj_[u];
    return std::binary_search(nb.begin(), nb.end(), v);
  }

  // BFS row from `src`, cached.
  std::shared_ptr<const std::vector<int>> distances_from(Vertex src) const {
    check_vertex(src);
    {
      std::lock_guard<std::mutex> lk(cache_mutex_);
      auto it = dist_cache_.find(src);
      if (it != dist_cache_.end()) return it->second;
    }
    auto row = std::make_shared<std::vector<int>>(bfs_from({src}));
    std::lock_guard<std::mutex> lk(cache_mutex_);
    auto [it, _] = dist_cache_.emplace(src, std::move(row));
    return it->second;
  }

  int distance(Vertex u, Vertex v) const {
    check_vertex(v);
    return (*distances_from(u))[v];
  }

  // distance-to-set row (multi-source BFS); not cached.
  std::vector<int> distances_from_set(const std::vector<Vertex>& srcs) const {
    for (Vertex s : srcs) check_vertex(s);
    if (srcs.empty()) throw input_error("empty source set");
    return bfs_from(srcs);
  }

  // Lexicographically least vertex sequence among shortest u->v paths.
  std::vector<Vertex> canonical_geodesic(Vertex u, Vertex v) const {
    auto dv = distances_from(v);
    std::vector<Vertex> path{u};
    Vertex cur = u;
    while (cur != v) {
      Vertex best = -1;
      for (Vertex w : adj_[cur]) {
        if ((*dv)[w] == (*dv)[cur] - 1) {
          best = w;
          break;  // neighbors sorted, first hit is least
        }
      }
      cur = best;
      path.push_back(cur);
    }
    return path;
  }

  // True iff u lies on some geodesic between x and y.
  bool on_geodesic(Vertex x, Vertex u, Vertex y) const {
    return distance(x, u) + distance(u, y) == distance(x, y);
  }

  bool is_tree() const { return edge_count_ == vertex_count() - 1; }

 private:
  std::vector<int> bfs_from(const std::vector<Vertex>& srcs) const {
    std::vector<int> d(vertex_count(), -1);
    std::queue<Vertex> q;
    for (Vertex s : srcs)
      if (d[s] != 0) {
        d[s] = 0;
        q.push(s);
      }
    while (!q.empty()) {
      Vertex u = q.front();
      q.pop();
      for (Vertex w : adj_[u])
        if (d[w] < 0) {
          d[w] = d[u] + 1;
          q.push(w);
        }
    }
    return d;
  }

  void check_connected() const {
    auto d = bfs_from({0});
    for (int x : d)
      if (x < 0) throw input_error("graph is not connected");
  }

  void check_vertex(Vertex v) const {
    if (v < 0 || v >= vertex_count()) throw input_error("unknown vertex");
  }

  std::vector<std::vector<Vertex>> adj_;
  std::vector<long long> labels_;
  int edge_count_ = 0;

  mutable std::mutex cache_mutex_;
  mutable std::unordered_map<Vertex, std::shared_ptr<const std::vector<int>>> dist_cache_;

 public:
  MetricGraph(const MetricGraph& o) : adj_(o.adj_), labels_(o.labels_), edge_count_(o.edge_count_) {}
  MetricGraph& operator=(const MetricGraph& o) {
    adj_ = o.adj_;
    labels_ = o.labels_;
    edge_count_ = o.edge_count_;
    std::lock_guard<std::mutex> lk(cache_mutex_);
    dist_cache_.clear();
    return *this;
  }
  MetricGraph(MetricGraph&& o) noexcept
      : adj_(std::move(o.adj_)), labels_(std::move(o.labels_)), edge_count_(o.edge_count_) {}
  MetricGraph& operator=(MetricGraph&& o) noexcept {
    adj_ = std::move(o.adj_);
    labels_ = std::move(o.labels_);
    edge_count_ = o.edge_count_;
    dist_cache_.clear();
    return *this;
  }
};

// Union of vertices of all geodesics between all pairs of F.
inline std::vector<Vertex> weak_hull(const MetricGraph& g, const std::vector<Vertex>& F) {
  if (F.empty()) throw input_error("weak_hull: empty point set");
  std::vector<std::shared_ptr<const std::vector<int>>> rows;
  rows.reserve(F.size());
  for (Vertex f : F) rows.push_back(g.distances_from(f));
  std::vector<Vertex> out;
  for (Vertex u = 0; u < g.vertex_count(); ++u) {
    bool in = false;
    for (size_t i = 0; i < F.size() && !in; ++i)
      for (size_t j = i; j < F.size() && !in; ++j)
        in = (*rows[i])[u] + (*rows[j])[u] == (*rows[i])[F[j]];
    if (in) out.push_back(u);
  }
  return out;
}

// Minimal delta in the four-point condition: for every vertex quadruple the two
// largest of the three pair-sums differ by at most 2*delta. Exhaustive scan.
inline Rational four_point_delta(const MetricGraph& g) {
  int n = g.vertex_count();
  std::vector<std::shared_ptr<const std::vector<int>>> rows(n);
  for (Vertex v = 0; v < n; ++v) rows[v] = g.distances_from(v);
  int twice = 0;
  for (Vertex x = 0; x < n; ++x)
    for (Vertex y = x + 1; y < n; ++y)
      for (Vertex z = y + 1; z < n; ++z)
        for (Vertex w = z + 1; w < n; ++w) {
          int a = (*rows[x])[y] + (*rows[z])[w];
          int b = (*rows[x])[z] + (*rows[y])[w];
          int c = (*rows[x])[w] + (*rows[y])[z];
          int hi = std::max({a, b, c});
          int mid = a + b + c - hi - std::min({a, b, c});
          twice = std::max(twice, hi - mid);
        }
  return Rational::of(twice, 2);
}

inline int hausdorff_distance(const MetricGraph& g, const std::vector<Vertex>& A,
                              const std::vector<Vertex>& B) {
  if (A.empty() || B.empty()) throw input_error("hausdorff_distance: empty set");
  auto da = g.distances_from_set(A);
  auto db = g.distances_from_set(B);
  int h = 0;
  for (Vertex a : A) h = std::max(h, db[a]);
  for (Vertex b : B) h = std::max(h, da[b]);
  return h;
}

}  // namespace stablecubes
