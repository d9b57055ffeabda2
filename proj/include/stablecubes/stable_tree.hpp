#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "stablecubes/steiner.hpp"

namespace stablecubes {

struct StableTreeParams {
  int delta = 0;        // ambient hyperbolicity constant
  int eps = -1;         // default 4*delta + 4
  int epsp = -1;        // default 2*eps
  int E = -1;           // default 8*epsp
  int exact_limit = 8;  // Steiner DP limit (terminal sets)

  StableTreeParams resolved() const {
    StableTreeParams p = *this;
    if (p.eps < 0) p.eps = 4 * p.delta + 4;
    if (p.epsp < 0) p.epsp = 2 * p.eps;
    if (p.E < 0) p.E = 8 * p.epsp;
    return p;
  }
};

// Components of the graph joining points of Y u F at distance <= E.
struct ClusterGraph {
  std::vector<Vertex> points;  // Y u F, sorted
  std::vector<bool> is_f_point;
  int E = 0;
  std::vector<std::vector<Vertex>> clusters;    // partition, ordered by least point
  std::vector<int> cluster_of;                  // per point index
  std::vector<std::pair<int, int>> adjacency;   // point-index pairs at distance <= E
  std::vector<std::string> warnings;

  int cluster_of_vertex(Vertex v) const {
    auto it = std::lower_bound(points.begin(), points.end(), v);
    if (it == points.end() || *it != v) return -1;
    return cluster_of[it - points.begin()];
  }
  bool cluster_has_f(int c) const {
    for (Vertex v : clusters[c]) {
      auto it = std::lower_bound(points.begin(), points.end(), v);
      if (is_f_point[it - points.begin()]) return true;
    }
    return false;
  }
};

inline ClusterGraph build_clusters(const MetricGraph& g, const std::vector<Vertex>& F,
                                   const std::vector<Vertex>& Y, int E, int eps = -1) {
  if (F.empty()) throw input_error("build_clusters: empty F");
  ClusterGraph cg;
  cg.E = E;
  std::set<Vertex> pts(F.begin(), F.end());
  pts.insert(Y.begin(), Y.end());
  cg.points.assign(pts.begin(), pts.end());
  std::set<Vertex> fset(F.begin(), F.end());
  for (Vertex p : cg.points) cg.is_f_point.push_back(fset.count(p) != 0);

  if (eps >= 0) {
    auto hd = g.distances_from_set(weak_hull(g, F));
    for (Vertex y : Y)
      if (hd[y] > eps / 2)
        cg.warnings.push_back("Y point " + std::to_string(y) + " is " + std::to_string(hd[y]) +
                              " from the weak hull (allowed " + std::to_string(eps / 2) + ")");
  }

  int np = int(cg.points.size());
  detail::Dsu dsu(np);
  for (int i = 0; i < np; ++i) {
    auto row = g.distances_from(cg.points[i]);
    for (int j = i + 1; j < np; ++j)
      if ((*row)[cg.points[j]] <= E) {
        cg.adjacency.push_back({i, j});
        dsu.unite(i, j);
      }
  }
  std::map<int, int> root_to_cluster;
  std::vector<std::vector<Vertex>> cl;
  for (int i = 0; i < np; ++i) {  // points sorted, so clusters come out ordered by least point
    int r = dsu.find(i);
    auto [it, fresh] = root_to_cluster.emplace(r, int(cl.size()));
    if (fresh) cl.push_back({});
    cl[it->second].push_back(cg.points[i]);
    cg.cluster_of.push_back(it->second);
  }
  cg.clusters = std::move(cl);
  return cg;
}

// Separation graph on clusters: an edge means no third cluster separates the
// pair. C separates A from B when some minimal geodesic between a closest
// (A,B)-pair meets the 2*epsp-neighborhood of C; all minimal geodesics between
// all closest pairs are tested.
struct SeparationGraph {
  int epsp = 0;
  std::vector<std::vector<int>> adj;  // per cluster node
  std::vector<bool> is_e0;            // bivalent and F-free
  bool connected = true;

  int node_count() const { return int(adj.size()); }
  int valence(int c) const { return int(adj[c].size()); }
  bool has_edge(int a, int b) const {
    return std::find(adj[a].begin(), adj[a].end(), b) != adj[a].end();
  }
};

inline SeparationGraph separation_graph(const MetricGraph& g, const ClusterGraph& cg, int epsp) {
  if (cg.E <= 4 * epsp)
    throw param_error("separation_graph: requires E > 4*eps' (E=" + std::to_string(cg.E) +
                      ", eps'=" + std::to_string(epsp) + ")");
  int nc = int(cg.clusters.size());
  SeparationGraph sg;
  sg.epsp = epsp;
  sg.adj.assign(nc, {});

  std::vector<std::vector<int>> cluster_dist(nc);
  for (int c = 0; c < nc; ++c) cluster_dist[c] = g.distances_from_set(cg.clusters[c]);

  for (int a = 0; a < nc; ++a)
    for (int b = a + 1; b < nc; ++b) {
      int dab = g.vertex_count();
      for (Vertex x : cg.clusters[a]) dab = std::min(dab, cluster_dist[b][x]);
      bool separated = false;
      for (Vertex x : cg.clusters[a]) {
        if (cluster_dist[b][x] != dab) continue;
        auto dx = g.distances_from(x);
        for (Vertex y : cg.clusters[b]) {
          if ((*dx)[y] != dab) continue;
          auto dy = g.distances_from(y);
          for (int c = 0; c < nc && !separated; ++c) {
            if (c == a || c == b) continue;
            for (Vertex u = 0; u < g.vertex_count(); ++u)
              if ((*dx)[u] + (*dy)[u] == dab && cluster_dist[c][u] <= 2 * epsp) {
                separated = true;
                break;
              }
          }
          if (separated) break;
        }
        if (separated) break;
      }
      if (!separated) {
        sg.adj[a].push_back(b);
        sg.adj[b].push_back(a);
      }
    }

  sg.is_e0.assign(nc, false);
  for (int c = 0; c < nc; ++c)
    sg.is_e0[c] = sg.valence(c) == 2 && !cg.cluster_has_f(c);

  {  // connectivity (guaranteed for E > 4*eps' on hyperbolic instances)
    std::vector<char> seen(nc, 0);
    std::vector<int> todo{0};
    seen[0] = 1;
    while (!todo.empty()) {
      int u = todo.back();
      todo.pop_back();
      for (int v : sg.adj[u])
        if (!seen[v]) {
          seen[v] = 1;
          todo.push_back(v);
        }
    }
    for (char s : seen)
      if (!s) sg.connected = false;
  }
  return sg;
}

// Convex hull, inside a tree network, of the network vertices within eps of A.
struct Shadow {
  std::vector<Vertex> vertices;  // sorted
  std::vector<Edge> edges;
  bool empty() const { return vertices.empty(); }
  bool contains(Vertex v) const {
    return std::binary_search(vertices.begin(), vertices.end(), v);
  }
};

inline Shadow shadow(const MetricGraph& g, const EmbeddedNetwork& net,
                     const std::vector<Vertex>& A, int eps) {
  Shadow s;
  if (A.empty() || net.vertices.empty()) return s;
  auto da = g.distances_from_set(A);
  std::set<Vertex> marked;
  for (Vertex v : net.vertices)
    if (da[v] <= eps) marked.insert(v);
  if (marked.empty()) return s;
  // minimal subtree spanning the marked vertices: prune unmarked leaves
  std::map<Vertex, std::vector<Vertex>> adj;
  for (auto [u, v] : net.edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  std::set<Vertex> alive(net.vertices.begin(), net.vertices.end());
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto it = alive.begin(); it != alive.end();) {
      Vertex v = *it;
      int deg = 0;
      for (Vertex w : adj[v])
        if (alive.count(w)) deg++;
      if (deg <= 1 && !marked.count(v)) {
        it = alive.erase(it);
        changed = true;
      } else {
        ++it;
      }
    }
  }
  s.vertices.assign(alive.begin(), alive.end());
  for (auto [u, v] : net.edges)
    if (alive.count(u) && alive.count(v)) s.edges.push_back({u, v});
  return s;
}

// topological structure of a tree network with marked nodes treated as junctions
struct NetworkTopology {
  std::vector<Vertex> junctions;                 // sorted
  std::vector<std::vector<Vertex>> edge_paths;   // junction ... junction

  bool is_junction(Vertex v) const {
    return std::binary_search(junctions.begin(), junctions.end(), v);
  }
};

inline NetworkTopology network_topology(const EmbeddedNetwork& net,
                                        const std::vector<Vertex>& marked) {
  NetworkTopology topo;
  std::map<Vertex, std::vector<Vertex>> adj;
  for (auto [u, v] : net.edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  std::set<Vertex> js(marked.begin(), marked.end());
  for (Vertex v : net.vertices)
    if (adj[v].size() != 2) js.insert(v);
  topo.junctions.assign(js.begin(), js.end());
  std::set<Edge> used;
  for (Vertex j : topo.junctions) {
    for (Vertex w : adj[j]) {
      if (used.count(make_edge(j, w))) continue;
      std::vector<Vertex> path{j, w};
      used.insert(make_edge(j, w));
      while (!js.count(path.back())) {
        Vertex cur = path.back(), prev = path[path.size() - 2];
        Vertex nxt = adj[cur][0] == prev ? adj[cur][1] : adj[cur][0];
        used.insert(make_edge(cur, nxt));
        path.push_back(nxt);
      }
      topo.edge_paths.push_back(std::move(path));
    }
  }
  return topo;
}

// ---------------------------------------------------------------------------
// the stable tree
// ---------------------------------------------------------------------------

enum class ForestKind : uint8_t { Cluster, External };  // T_c vs T_e

struct StableTree {
  struct Node {
    Vertex xi;  // image in the ambient graph
  };
  struct TreeEdge {
    int a, b;
    ForestKind kind;
    int comp;  // cluster id for T_c, external-component id for T_e
  };

  std::vector<Node> nodes;
  std::vector<TreeEdge> edges;
  std::vector<std::vector<int>> adj;  // node -> incident node ids

  std::vector<Vertex> F, Y;
  std::vector<int> f_nodes;  // node ids of the F points (marked leaves)
  StableTreeParams params;

  ClusterGraph clusters;
  SeparationGraph sep;

  // external components, identified with their images in the ambient graph
  struct ExternalComponent {
    std::vector<Vertex> zvertices;  // sorted
    std::vector<Edge> zedges;       // sorted
    std::vector<int> node_ids;
  };
  std::vector<ExternalComponent> external;
  std::vector<EmbeddedNetwork> cluster_networks;  // mu(C) per cluster

  // topological edges of T_e (subdivision targets), canonically oriented
  struct TopEdge {
    std::vector<int> node_path;
    int comp;  // external component id
    int length() const { return int(node_path.size()) - 1; }
  };
  std::vector<TopEdge> top_edges;

  int node_count() const { return int(nodes.size()); }
  int valence(int n) const { return int(adj[n].size()); }

  std::vector<int> node_distances_from(const std::vector<int>& srcs) const {
    std::vector<int> d(node_count(), -1);
    std::vector<int> q;
    for (int s : srcs)
      if (d[s] != 0) {
        d[s] = 0;
        q.push_back(s);
      }
    for (size_t i = 0; i < q.size(); ++i)
      for (int w : adj[q[i]])
        if (d[w] < 0) {
          d[w] = d[q[i]] + 1;
          q.push_back(w);
        }
    return d;
  }

  int total_branching() const {
    int b = 0;
    for (int n = 0; n < node_count(); ++n)
      if (valence(n) > 2) b += valence(n) - 2;
    return b;
  }

  std::vector<int> leaves() const {
    std::vector<int> out;
    for (int n = 0; n < node_count(); ++n)
      if (valence(n) <= 1) out.push_back(n);
    return out;
  }

  std::vector<Vertex> image() const {
    std::set<Vertex> im;
    for (auto& nd : nodes) im.insert(nd.xi);
    return {im.begin(), im.end()};
  }
};

namespace tree_detail {

// canonical orientation of a node path: image id sequence lexicographically
// least against its reverse
inline void orient_canonically(const StableTree& t, std::vector<int>& path) {
  std::vector<Vertex> fwd, bwd;
  for (int n : path) fwd.push_back(t.nodes[n].xi);
  bwd.assign(fwd.rbegin(), fwd.rend());
  if (bwd < fwd) std::reverse(path.begin(), path.end());
}

}  // namespace tree_detail

// Assembles T(F,Y) = T_c u T_e: external minimal networks over the pieces of
// the separation graph between bivalent F-free clusters, plus one internal
// network per cluster, glued along shared attachment points.
inline StableTree build_stable_tree(const MetricGraph& g, const std::vector<Vertex>& F,
                                    const std::vector<Vertex>& Y, StableTreeParams params_in) {
  StableTreeParams P = params_in.resolved();
  if (P.E != 8 * P.epsp)
    throw param_error("build_stable_tree: E must equal 8*eps'");
  if (F.empty()) throw input_error("build_stable_tree: empty F");

  StableTree t;
  t.params = P;
  t.F = F;
  t.Y = Y;
  std::sort(t.F.begin(), t.F.end());
  t.F.erase(std::unique(t.F.begin(), t.F.end()), t.F.end());
  std::sort(t.Y.begin(), t.Y.end());
  t.Y.erase(std::unique(t.Y.begin(), t.Y.end()), t.Y.end());

  t.clusters = build_clusters(g, t.F, t.Y, P.E, P.eps);
  t.sep = separation_graph(g, t.clusters, P.epsp);
  if (!t.sep.connected)
    throw construction_error("separation graph disconnected; raise eps or check the instance");

  const int nc = int(t.clusters.clusters.size());
  const auto& e0 = t.sep.is_e0;

  // pieces of the separation graph: closures of the components after removing
  // the open stars of E0 vertices, plus single edges joining two E0 vertices
  std::vector<std::vector<int>> piece_clusters;
  {
    detail::Dsu dsu(nc);
    for (int a = 0; a < nc; ++a)
      if (!e0[a])
        for (int b : t.sep.adj[a])
          if (b > a && !e0[b]) dsu.unite(a, b);
    std::map<int, std::set<int>> comp;
    for (int a = 0; a < nc; ++a)
      if (!e0[a]) comp[dsu.find(a)].insert(a);
    for (auto& [root, members] : comp) {
      std::set<int> closure = members;
      for (int a : members)
        for (int b : t.sep.adj[a])
          if (e0[b]) closure.insert(b);
      piece_clusters.push_back({closure.begin(), closure.end()});
    }
    for (int a = 0; a < nc; ++a)
      if (e0[a])
        for (int b : t.sep.adj[a])
          if (b > a && e0[b]) piece_clusters.push_back({a, b});
    std::sort(piece_clusters.begin(), piece_clusters.end());
  }

  // external networks: lambda'(V) per piece
  std::vector<EmbeddedNetwork> ext_nets;
  for (auto& piece : piece_clusters) {
    if (piece.size() < 2) continue;  // nothing to connect
    std::vector<std::vector<Vertex>> terms;
    for (int c : piece) terms.push_back(t.clusters.clusters[c]);
    auto net = steiner_network(g, terms, P.exact_limit);
    if (!net.edges.empty() || !net.vertices.empty()) ext_nets.push_back(std::move(net));
  }

  // split the networks into connected components: these are the components of T_e
  struct RawComp {
    std::vector<Vertex> vs;
    std::vector<Edge> es;
  };
  std::vector<RawComp> raw;
  for (auto& net : ext_nets) {
    if (net.vertices.empty()) continue;
    std::map<Vertex, int> idx;
    for (size_t i = 0; i < net.vertices.size(); ++i) idx[net.vertices[i]] = int(i);
    detail::Dsu dsu(int(net.vertices.size()));
    for (auto [u, v] : net.edges) dsu.unite(idx[u], idx[v]);
    std::map<int, RawComp> comps;
    for (size_t i = 0; i < net.vertices.size(); ++i)
      comps[dsu.find(int(i))].vs.push_back(net.vertices[i]);
    for (auto [u, v] : net.edges) comps[dsu.find(idx[u])].es.push_back(make_edge(u, v));
    for (auto& [r, c] : comps) {
      if (c.es.empty()) continue;  // isolated attachment point, carries no edge
      std::sort(c.vs.begin(), c.vs.end());
      std::sort(c.es.begin(), c.es.end());
      raw.push_back(std::move(c));
    }
  }
  std::sort(raw.begin(), raw.end(), [](const RawComp& a, const RawComp& b) {
    return a.es < b.es;
  });

  // attachment sets r(C) = C n (T_e u F)
  std::vector<std::vector<Vertex>> rC(nc);
  for (int c = 0; c < nc; ++c) {
    std::set<Vertex> rs;
    std::set<Vertex> members(t.clusters.clusters[c].begin(), t.clusters.clusters[c].end());
    for (auto& comp : raw)
      for (Vertex v : comp.vs)
        if (members.count(v)) rs.insert(v);
    for (Vertex f : t.F)
      if (members.count(f)) rs.insert(f);
    rC[c].assign(rs.begin(), rs.end());
  }

  // cluster networks mu(C) = lambda(r(C))
  t.cluster_networks.resize(nc);
  for (int c = 0; c < nc; ++c) {
    if (rC[c].empty()) {
      // untouched cluster: anchor it at its least point
      rC[c] = {t.clusters.clusters[c][0]};
    }
    std::vector<std::vector<Vertex>> singles;
    for (Vertex v : rC[c]) singles.push_back({v});
    t.cluster_networks[c] = steiner_network(g, singles, P.exact_limit);
  }

  // assemble the abstract tree; cluster copies first, then external copies
  // glued at attachment points
  std::map<std::pair<int, Vertex>, int> tc_node;  // (cluster, vertex) -> node
  auto add_node = [&](Vertex xi) {
    t.nodes.push_back({xi});
    t.adj.push_back({});
    return int(t.nodes.size()) - 1;
  };
  auto add_edge = [&](int a, int b, ForestKind k, int comp) {
    t.edges.push_back({a, b, k, comp});
    t.adj[a].push_back(b);
    t.adj[b].push_back(a);
  };
  for (int c = 0; c < nc; ++c) {
    for (Vertex v : t.cluster_networks[c].vertices) tc_node[{c, v}] = add_node(v);
    for (auto [u, v] : t.cluster_networks[c].edges)
      add_edge(tc_node.at({c, u}), tc_node.at({c, v}), ForestKind::Cluster, c);
  }
  t.external.resize(raw.size());
  for (size_t ci = 0; ci < raw.size(); ++ci) {
    auto& comp = raw[ci];
    auto& ext = t.external[ci];
    ext.zvertices = comp.vs;
    ext.zedges = comp.es;
    std::map<Vertex, int> local;
    for (Vertex v : comp.vs) {
      int cl = t.clusters.cluster_of_vertex(v);
      int node;
      if (cl >= 0 && tc_node.count({cl, v})) {
        node = tc_node.at({cl, v});  // glue to the cluster copy
      } else {
        node = add_node(v);
      }
      local[v] = node;
      ext.node_ids.push_back(node);
    }
    for (auto [u, v] : comp.es)
      add_edge(local.at(u), local.at(v), ForestKind::External, int(ci));
  }

  // F nodes
  for (Vertex f : t.F) {
    int cl = t.clusters.cluster_of_vertex(f);
    t.f_nodes.push_back(tc_node.at({cl, f}));
  }

  // tree validation: connected and acyclic
  {
    if (int(t.edges.size()) != t.node_count() - 1)
      throw construction_error("glued network is not a tree (edge count); raise eps");
    auto d = t.node_distances_from({0});
    for (int x : d)
      if (x < 0) throw construction_error("glued network is disconnected; raise eps");
  }

  // topological edges of T_e: maximal external runs between junctions
  {
    std::vector<char> junction(t.node_count(), 0);
    std::vector<std::vector<std::pair<int, int>>> ext_adj(t.node_count());  // (other, comp)
    for (auto& e : t.edges) {
      if (e.kind == ForestKind::External) {
        ext_adj[e.a].push_back({e.b, e.comp});
        ext_adj[e.b].push_back({e.a, e.comp});
      } else {
        junction[e.a] = junction[e.b] = 1;  // touches T_c
      }
    }
    for (int n = 0; n < t.node_count(); ++n)
      if (t.valence(n) != 2) junction[n] = 1;
    for (int fn : t.f_nodes) junction[fn] = 1;  // F points are logical leaves
    for (int n = 0; n < t.node_count(); ++n) {  // meeting point of two components
      std::set<int> comps;
      for (auto [w, comp] : ext_adj[n]) comps.insert(comp);
      if (comps.size() > 1) junction[n] = 1;
    }

    std::set<std::pair<int, int>> used;  // node-pair edges consumed
    for (int n = 0; n < t.node_count(); ++n) {
      if (!junction[n]) continue;
      for (auto [w, comp] : ext_adj[n]) {
        auto key = std::minmax(n, w);
        if (used.count({key.first, key.second})) continue;
        used.insert({key.first, key.second});
        std::vector<int> path{n, w};
        while (!junction[path.back()]) {
          int cur = path.back(), prev = path[path.size() - 2];
          int nxt = -1;
          for (auto [x, c2] : ext_adj[cur])
            if (x != prev) nxt = x;
          auto k2 = std::minmax(cur, nxt);
          used.insert({k2.first, k2.second});
          path.push_back(nxt);
        }
        tree_detail::orient_canonically(t, path);
        t.top_edges.push_back({path, comp});
      }
    }
    std::sort(t.top_edges.begin(), t.top_edges.end(),
              [&](const StableTree::TopEdge& a, const StableTree::TopEdge& b) {
                auto key = [&](const StableTree::TopEdge& te) {
                  std::vector<Vertex> k;
                  for (int nd : te.node_path) k.push_back(t.nodes[nd].xi);
                  return k;
                };
                return key(a) < key(b);
              });
  }
  return t;
}

// measured constants for the quasi-isometry / Hausdorff contract
struct StableTreeReport {
  int total_branching = 0;
  bool leaves_in_f_union_y = true;
  int qi_additive_defect = 0;     // on sampled pairs within external components
  int cluster_hausdorff = 0;      // max over clusters of d_H(mu(C), C)
  int hull_hausdorff = 0;         // d_H(image(T), weak_hull(F))
  int branching_bound = 0;        // 2k - 4
  bool branching_ok = true;
};

inline StableTreeReport measure_stable_tree(const MetricGraph& g, const StableTree& t) {
  StableTreeReport r;
  r.total_branching = t.total_branching();
  int k = int(t.F.size());
  r.branching_bound = std::max(0, 2 * k - 4);
  r.branching_ok = r.total_branching <= r.branching_bound;

  std::set<Vertex> fy(t.F.begin(), t.F.end());
  fy.insert(t.Y.begin(), t.Y.end());
  for (int leaf : t.leaves())
    if (!fy.count(t.nodes[leaf].xi)) r.leaves_in_f_union_y = false;

  // additive defect of the embedding on external components, sampled pairs
  for (auto& ext : t.external) {
    const auto& ids = ext.node_ids;
    std::vector<int> sample;
    for (size_t i = 0; i < ids.size(); i += std::max<size_t>(1, ids.size() / 8))
      sample.push_back(ids[i]);
    sample.push_back(ids.back());
    for (int a : sample) {
      auto dt = t.node_distances_from({a});
      auto dz = g.distances_from(t.nodes[a].xi);
      for (int b : ids)
        r.qi_additive_defect =
            std::max(r.qi_additive_defect, std::abs(dt[b] - (*dz)[t.nodes[b].xi]));
    }
  }

  for (size_t c = 0; c < t.clusters.clusters.size(); ++c) {
    const auto& net = t.cluster_networks[c];
    if (net.vertices.empty()) continue;
    r.cluster_hausdorff = std::max(
        r.cluster_hausdorff, hausdorff_distance(g, net.vertices, t.clusters.clusters[c]));
  }
  r.hull_hausdorff = hausdorff_distance(g, t.image(), weak_hull(g, t.F));
  return r;
}

// classification report: bivalent F-free clusters have interval shadows inside
// edges of lambda(F), and shadows on one edge are ordered like the clusters in
// the separation graph
struct ClusterClassification {
  std::vector<bool> is_e0;
  bool interval_shadows_ok = true;
  bool edge_order_ok = true;
  bool shadows_disjoint = true;
  std::string witness;
};

inline ClusterClassification classify_clusters(const MetricGraph& g, const ClusterGraph& cg,
                                               const SeparationGraph& sg,
                                               const EmbeddedNetwork& lambdaF,
                                               const std::vector<Vertex>& F, int eps) {
  ClusterClassification out;
  out.is_e0 = sg.is_e0;
  int nc = int(cg.clusters.size());

  std::vector<Shadow> shadows(nc);
  for (int c = 0; c < nc; ++c) shadows[c] = shadow(g, lambdaF, cg.clusters[c], eps);

  for (int a = 0; a < nc; ++a)
    for (int b = a + 1; b < nc; ++b) {
      if (!(sg.is_e0[a] && sg.is_e0[b])) continue;
      for (Vertex v : shadows[a].vertices)
        if (shadows[b].contains(v)) {
          out.shadows_disjoint = false;
          out.witness = "E0 shadows " + std::to_string(a) + "," + std::to_string(b) + " overlap";
        }
    }

  std::vector<Vertex> marked = F;  // F points are logical leaves of lambda(F)
  auto topo = network_topology(lambdaF, marked);

  // E0 shadow -> (edge index, interval along it)
  std::vector<int> shadow_edge(nc, -1);
  std::vector<std::pair<int, int>> shadow_span(nc, {-1, -1});
  for (int c = 0; c < nc; ++c) {
    if (!sg.is_e0[c] || shadows[c].empty()) continue;
    bool placed = false;
    for (size_t e = 0; e < topo.edge_paths.size() && !placed; ++e) {
      const auto& path = topo.edge_paths[e];
      int lo = -1, hi = -1;
      bool all = true;
      std::set<Vertex> on_path(path.begin(), path.end());
      for (Vertex v : shadows[c].vertices)
        if (!on_path.count(v)) all = false;
      if (!all) continue;
      for (size_t i = 0; i < path.size(); ++i)
        if (shadows[c].contains(path[i])) {
          if (lo < 0) lo = int(i);
          hi = int(i);
        }
      // interval: contiguous, interior of the edge
      bool contiguous = true;
      for (int i = lo; i <= hi; ++i)
        if (!shadows[c].contains(path[i])) contiguous = false;
      if (contiguous && lo > 0 && hi < int(path.size()) - 1) {
        shadow_edge[c] = int(e);
        shadow_span[c] = {lo, hi};
        placed = true;
      }
    }
    if (!placed) {
      out.interval_shadows_ok = false;
      out.witness = "E0 cluster " + std::to_string(c) + " has no interval shadow inside an edge";
    }
  }

  // per edge: clusters in span order must form a path in the separation graph
  for (size_t e = 0; e < topo.edge_paths.size(); ++e) {
    std::vector<std::pair<int, int>> on_edge;  // (lo, cluster)
    for (int c = 0; c < nc; ++c)
      if (shadow_edge[c] == int(e)) on_edge.push_back({shadow_span[c].first, c});
    if (on_edge.size() < 2) continue;
    std::sort(on_edge.begin(), on_edge.end());
    for (size_t i = 0; i + 1 < on_edge.size(); ++i)
      if (!sg.has_edge(on_edge[i].second, on_edge[i + 1].second)) {
        out.edge_order_ok = false;
        out.witness = "edge order broken between clusters " + std::to_string(on_edge[i].second) +
                      " and " + std::to_string(on_edge[i + 1].second);
      }
    for (size_t i = 0; i + 2 < on_edge.size(); ++i)
      if (sg.has_edge(on_edge[i].second, on_edge[i + 2].second)) out.edge_order_ok = false;
  }
  return out;
}

}  // namespace stablecubes
