#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "stablecubes/cube_complex.hpp"
#include "stablecubes/hhs.hpp"
#include "stablecubes/stable_tree.hpp"
#include "stablecubes/tree_correspondence.hpp"

namespace stablecubes {

struct CubulationParams {
  int K = 8;         // relevance threshold
  int theta = 2;     // hull threshold
  int M = 4;         // requested subdivision spacing (raised to the floor)
  int Mp = -1;       // default 8*M
  StableTreeParams tree;
  int wall_bound = 4096;

  CubulationParams resolved() const {
    CubulationParams p = *this;
    if (p.Mp < 0) p.Mp = 8 * std::max(1, p.M);
    return p;
  }
};

// a subdivision point: interior position on a topological edge of some T_e
struct SubdivisionPoint {
  int domain = -1;
  int top_edge = -1;
  int offset = 0;  // node-path index along the edge

  auto key() const { return std::tuple{domain, top_edge, offset}; }
  bool operator<(const SubdivisionPoint& o) const { return key() < o.key(); }
  bool operator==(const SubdivisionPoint& o) const { return key() == o.key(); }
};

struct SubdivisionSet {
  int M = 0, Mp = 0;
  std::vector<SubdivisionPoint> points;  // sorted
};

struct CubulationMetrics {
  int m_floor = 0;          // calibrated spacing floor
  int m_used = 0;
  int kappa_rhos = 0;       // transverse rho distance to the projected set
  int tree_qi_defect = 0;
  int xi_coordinate_diam = 0;  // max diameter of a coordinate set b_Y
  int hull_size = 0;
  int wall_count = 0;
  int q_vertices = 0;
  int q_dimension = 0;
  int psi_defect = 0;       // max d_X(phi(psi(f)), f)
  int hausdorff_defect = 0; // d_Haus(phi(Q), hull)
  double qi_distortion = 1.0;  // max two-sided multiplicative distortion vs M*l1
  int median_defect = 0;
  int dropped_degenerate = 0;  // walls with an empty side (below-floor symptom)
  int dropped_duplicate = 0;   // walls equal to an earlier wall
  std::vector<std::string> warnings;
};

struct CubulationResult {
  std::vector<Vertex> F;       // sorted, deduplicated
  CubulationParams params;
  std::vector<Vertex> hull;    // H_theta(F), sorted
  std::vector<int> hull_pos;   // X-vertex -> hull position or -1
  std::vector<int> rel;        // relevant domains, sorted

  std::map<int, StableTree> trees;
  std::map<int, std::vector<int>> beta;       // C(V)-vertex -> tree node id
  std::map<int, Bits> beta_leafish;           // unused slot kept empty

  SubdivisionSet subdivision;
  std::vector<int> wall_of_point;    // point index -> wall index or -1 (dropped)
  std::vector<int> point_of_wall;    // wall index -> point index
  std::vector<Bits> wall_minus_tree; // per point: node-mask of the minus side in T^V
  std::vector<Bits> wall_minus_hull; // per point: hull-position mask of the minus side

  CubeComplex Q;
  std::vector<Vertex> phi;  // per Q-vertex
  std::vector<int> psi;     // per F member: Q-vertex index
  CubulationMetrics metrics;

  int hull_position(Vertex x) const {
    if (x < 0 || x >= int(hull_pos.size()) || hull_pos[x] < 0)
      throw input_error("vertex not in the hull");
    return hull_pos[x];
  }
};

namespace cub_detail {

// closest-point projection table onto the embedded tree: per C(V)-vertex the
// nearest tree node, ties broken by (image id, structural key)
inline std::vector<int> beta_table(const MetricGraph& CV, const StableTree& t) {
  int n = CV.vertex_count();
  // structural key per node: (xi, kind-ish, least image in its piece)
  std::vector<std::tuple<Vertex, int, Vertex, int>> key(t.node_count());
  {
    std::vector<Vertex> comp_min(t.node_count(), -1);
    // least image among tree neighbors including self, a cheap stable signature
    for (int nd = 0; nd < t.node_count(); ++nd) {
      Vertex mn = t.nodes[nd].xi;
      for (int w : t.adj[nd]) mn = std::min(mn, t.nodes[w].xi);
      comp_min[nd] = mn;
    }
    for (int nd = 0; nd < t.node_count(); ++nd)
      key[nd] = {t.nodes[nd].xi, 0, comp_min[nd], nd};
  }

  std::vector<int> dist(n, -1);
  std::vector<int> best(n, -1);
  std::vector<std::vector<Vertex>> layer;
  {
    std::vector<Vertex> q;
    for (int nd = 0; nd < t.node_count(); ++nd) {
      Vertex v = t.nodes[nd].xi;
      if (dist[v] != 0) {
        dist[v] = 0;
        q.push_back(v);
      }
      if (best[v] < 0 || key[nd] < key[best[v]]) best[v] = nd;
    }
    layer.push_back(q);
  }
  while (!layer.back().empty()) {
    std::vector<Vertex> next;
    for (Vertex v : layer.back())
      for (Vertex w : CV.neighbors(v))
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          next.push_back(w);
        }
    layer.push_back(next);
  }
  for (size_t d = 1; d < layer.size(); ++d)
    for (Vertex v : layer[d]) {
      for (Vertex w : CV.neighbors(v))
        if (dist[w] == dist[v] - 1 && best[w] >= 0)
          if (best[v] < 0 || key[best[w]] < key[best[v]]) best[v] = best[w];
    }
  return best;
}

// hull of a node set inside the tree: prune leaves not marked
inline Bits tree_hull_mask(const StableTree& t, const Bits& marked) {
  Bits alive(t.node_count());
  if (marked.none()) return alive;
  std::vector<int> deg(t.node_count(), 0);
  for (auto& e : t.edges) {
    deg[e.a]++;
    deg[e.b]++;
  }
  for (int n = 0; n < t.node_count(); ++n) alive.set(n);
  std::vector<int> stack;
  for (int n = 0; n < t.node_count(); ++n)
    if (deg[n] <= 1 && !marked.test(n)) stack.push_back(n);
  while (!stack.empty()) {
    int n = stack.back();
    stack.pop_back();
    if (!alive.test(n) || marked.test(n)) continue;
    if (deg[n] > 1) continue;
    alive.reset(n);
    for (int w : t.adj[n])
      if (alive.test(w)) {
        deg[w]--;
        if (deg[w] <= 1 && !marked.test(w)) stack.push_back(w);
      }
  }
  return alive;
}

inline int subtree_diameter(const StableTree& t, const Bits& mask) {
  int start = mask.first();
  if (start < 0) return -1;
  auto bfs = [&](int s) {
    std::vector<int> d(t.node_count(), -1);
    std::vector<int> q{s};
    d[s] = 0;
    int far = s;
    for (size_t i = 0; i < q.size(); ++i)
      for (int w : t.adj[q[i]])
        if (mask.test(w) && d[w] < 0) {
          d[w] = d[q[i]] + 1;
          if (d[w] > d[far]) far = w;
          q.push_back(w);
        }
    return std::pair{far, d};
  };
  auto [far, _] = bfs(start);
  auto [far2, d2] = bfs(far);
  return d2[far2];
}

// the two sides of the tree at an interior node p: minus = side containing the
// canonically least leaf, plus p itself
inline Bits minus_side_mask(const StableTree& t, int pnode) {
  // find least leaf by (xi, node)
  int least_leaf = -1;
  for (int n = 0; n < t.node_count(); ++n) {
    if (t.valence(n) > 1 || n == pnode) continue;
    if (least_leaf < 0 || std::pair{t.nodes[n].xi, n} < std::pair{t.nodes[least_leaf].xi, least_leaf})
      least_leaf = n;
  }
  Bits side(t.node_count());
  if (least_leaf < 0) {  // degenerate: no leaf other than p
    side.set(pnode);
    return side;
  }
  std::vector<int> q{least_leaf};
  side.set(least_leaf);
  for (size_t i = 0; i < q.size(); ++i)
    for (int w : t.adj[q[i]]) {
      if (w == pnode || side.test(w)) continue;
      side.set(w);
      q.push_back(w);
    }
  side.set(pnode);
  return side;
}

}  // namespace cub_detail

// Stable trees for every relevant domain: F^V = projections of F, Y^V = the
// relative projections of the other relevant domains strictly nested in V.
inline std::map<int, StableTree> build_domain_trees(const HHSInstance& h,
                                                    const std::vector<Vertex>& F,
                                                    const CubulationParams& params,
                                                    std::vector<std::string>* warnings = nullptr) {
  auto rs = rel_set(h, F, params.K);
  std::map<int, StableTree> trees;
  for (size_t i = 0; i < rs.domains.size(); ++i) {
    int V = rs.domains[i];
    std::vector<Vertex> FV;
    for (Vertex f : F) FV.push_back(h.pi[V][f]);
    std::sort(FV.begin(), FV.end());
    FV.erase(std::unique(FV.begin(), FV.end()), FV.end());
    std::vector<Vertex> YV;
    for (int W : rs.nested_in[i]) YV.push_back(h.rho(W, V));
    std::sort(YV.begin(), YV.end());
    YV.erase(std::unique(YV.begin(), YV.end()), YV.end());
    if (warnings && !YV.empty()) {
      auto hd = h.factors[V].distances_from_set(weak_hull(h.factors[V], FV));
      for (Vertex y : YV)
        if (hd[y] > h.kappa0)
          warnings->push_back("rho-point " + std::to_string(y) + " in " + h.domain_name[V] +
                              " lies " + std::to_string(hd[y]) + " from the factor hull");
    }
    trees.emplace(V, build_stable_tree(h.factors[V], FV, YV, params.tree));
  }
  return trees;
}

// canonical evenly spaced subdivision: on an edge of length L, points at
// offsets M, 2M, ... from the canonical anchor, last gap at least M
inline SubdivisionSet subdivide(const std::map<int, StableTree>& trees, int M, int Mp) {
  if (Mp < 8 * M) throw param_error("subdivide: requires M' >= 8M");
  if (M < 1) throw param_error("subdivide: M must be positive");
  SubdivisionSet out;
  out.M = M;
  out.Mp = Mp;
  for (auto& [V, t] : trees) {
    for (size_t e = 0; e < t.top_edges.size(); ++e) {
      int L = t.top_edges[e].length();
      int k = L >= 2 * M ? (L - M) / M : 0;
      for (int i = 1; i <= k; ++i) out.points.push_back({V, int(e), i * M});
    }
  }
  std::sort(out.points.begin(), out.points.end());
  return out;
}

// tree point nearest to a coordinate-space vertex (vertex granularity)
inline int beta_project(const MetricGraph& CV, const StableTree& t, Vertex c) {
  auto table = cub_detail::beta_table(CV, t);
  return table[c];
}

inline std::pair<int, int> calibrate_m_floor(const HHSInstance& h,
                                             const std::map<int, StableTree>& trees,
                                             int eps) {
  // floor = 4 * max(tree additive defect, transverse rho defect, 2*eps)
  int tree_defect = 0;
  for (auto& [V, t] : trees) {
    auto rep = measure_stable_tree(h.factors[V], t);
    tree_defect = std::max(tree_defect, rep.qi_additive_defect);
  }
  int kappa = 0;
  std::vector<int> rel;
  for (auto& [V, t] : trees) rel.push_back(V);
  for (int U : rel)
    for (int V : rel) {
      if (!h.transverse(U, V)) continue;
      std::vector<Vertex> FV;
      for (Vertex f : trees.at(V).F) FV.push_back(f);
      auto d = h.factors[V].distances_from_set(FV);
      kappa = std::max(kappa, d[h.rho(U, V)]);
    }
  int floor = 4 * std::max({tree_defect, kappa, 2 * eps, 1});
  return {floor, kappa};
}

// Full pipeline over a supplied subdivision: walls on the hull, the dual
// complex, the realization map phi, and psi on F.
inline CubulationResult cubulate_with_points(const HHSInstance& h, const std::vector<Vertex>& F,
                                             CubulationParams params,
                                             std::map<int, StableTree> trees,
                                             const SubdivisionSet& subdivision) {
  CubulationResult r;
  r.F = F;
  std::sort(r.F.begin(), r.F.end());
  r.F.erase(std::unique(r.F.begin(), r.F.end()), r.F.end());
  r.params = params;
  r.trees = std::move(trees);
  for (auto& [V, t] : r.trees) r.rel.push_back(V);
  std::sort(r.rel.begin(), r.rel.end());
  r.subdivision = subdivision;
  r.metrics.m_used = subdivision.M;

  r.hull = hull_theta(h, r.F, params.theta);
  r.hull_pos.assign(h.X.vertex_count(), -1);
  for (size_t i = 0; i < r.hull.size(); ++i) r.hull_pos[r.hull[i]] = int(i);
  r.metrics.hull_size = int(r.hull.size());
  const int H = int(r.hull.size());

  for (int V : r.rel) r.beta[V] = cub_detail::beta_table(h.factors[V], r.trees.at(V));

  // walls
  const auto& pts = r.subdivision.points;
  r.wall_of_point.assign(pts.size(), -1);
  r.wall_minus_tree.resize(pts.size());
  r.wall_minus_hull.resize(pts.size());
  std::vector<std::pair<Bits, Bits>> walls;
  std::map<Bits, int, std::less<Bits>> seen_minus;
  for (size_t pi = 0; pi < pts.size(); ++pi) {
    const auto& p = pts[pi];
    const StableTree& t = r.trees.at(p.domain);
    int pnode = t.top_edges[p.top_edge].node_path[p.offset];
    Bits minus_nodes = cub_detail::minus_side_mask(t, pnode);
    r.wall_minus_tree[pi] = minus_nodes;
    Bits minus(H);
    const auto& bt = r.beta.at(p.domain);
    for (int hi = 0; hi < H; ++hi) {
      Vertex c = h.pi[p.domain][r.hull[hi]];
      if (minus_nodes.test(bt[c])) minus.set(hi);
    }
    r.wall_minus_hull[pi] = minus;
    if (minus.none() || minus.count() == H) {
      r.metrics.dropped_degenerate++;
      r.metrics.warnings.push_back("degenerate wall at domain " + h.domain_name[p.domain] +
                                   " offset " + std::to_string(p.offset) + " (M below floor?)");
      continue;
    }
    Bits plus = ~minus;  // over H bits; ~ trims to size
    {
      Bits plus_fixed(H);
      for (int hi = 0; hi < H; ++hi)
        if (!minus.test(hi)) plus_fixed.set(hi);
      plus = plus_fixed;
    }
    if (seen_minus.count(minus) || seen_minus.count(plus)) {
      r.metrics.dropped_duplicate++;
      r.metrics.warnings.push_back("duplicate wall at domain " + h.domain_name[p.domain] +
                                   " offset " + std::to_string(p.offset));
      continue;
    }
    seen_minus[minus] = int(walls.size());
    r.wall_of_point[pi] = int(walls.size());
    r.point_of_wall.push_back(int(pi));
    walls.push_back({minus, plus});
  }
  r.metrics.wall_count = int(walls.size());

  if (walls.empty()) {
    r.Q = CubeComplex::from_orientations(0, {Bits(0)});
  } else {
    auto ws = Wallspace::make(H, walls);
    r.Q = dual_complex(ws, params.wall_bound);
  }
  r.metrics.q_vertices = r.Q.vertex_count();
  r.metrics.q_dimension = r.Q.wall_count() ? r.Q.dimension() : 0;

  // coordinate masks: S[wall][side][V] = tree-hull of the beta image of that halfspace
  std::map<int, std::vector<std::array<Bits, 2>>> smask;  // per domain: per wall
  for (int V : r.rel) {
    const StableTree& t = r.trees.at(V);
    const auto& bt = r.beta.at(V);
    std::vector<std::array<Bits, 2>> marks(walls.size(),
                                           {Bits(t.node_count()), Bits(t.node_count())});
    for (int hi = 0; hi < H; ++hi) {
      int bnode = bt[h.pi[V][r.hull[hi]]];
      for (size_t w = 0; w < walls.size(); ++w)
        marks[w][walls[w].first.test(hi) ? 0 : 1].set(bnode);
    }
    for (size_t w = 0; w < walls.size(); ++w) {
      marks[w][0] = cub_detail::tree_hull_mask(t, marks[w][0]);
      marks[w][1] = cub_detail::tree_hull_mask(t, marks[w][1]);
    }
    smask[V] = std::move(marks);
  }

  // phi: realize each 0-cube inside the hull
  r.phi.assign(r.Q.vertex_count(), -1);
  for (int q = 0; q < r.Q.vertex_count(); ++q) {
    // coordinates b_V
    std::vector<std::vector<int>> dist_to_bv;  // per rel domain: distance rows
    dist_to_bv.reserve(r.rel.size());
    for (int V : r.rel) {
      const StableTree& t = r.trees.at(V);
      Bits bv(t.node_count());
      bool first = true;
      for (size_t w = 0; w < walls.size(); ++w) {
        int side = r.Q.vertex(q).test(int(w)) ? 1 : 0;  // bit set = plus side
        const Bits& sm = smask.at(V)[w][side];
        if (first) {
          bv = sm;
          first = false;
        } else {
          bv &= sm;
        }
      }
      if (first) {  // no walls at all: the whole tree
        for (int n = 0; n < t.node_count(); ++n) bv.set(n);
      }
      if (bv.none())
        throw construction_error("empty coordinate set b_V in domain " + h.domain_name[V] +
                                 " (raise M or K)");
      r.metrics.xi_coordinate_diam =
          std::max(r.metrics.xi_coordinate_diam, cub_detail::subtree_diameter(t, bv));
      std::vector<Vertex> images;
      bv.for_each([&](int nd) { images.push_back(t.nodes[nd].xi); });
      std::sort(images.begin(), images.end());
      images.erase(std::unique(images.begin(), images.end()), images.end());
      dist_to_bv.push_back(h.factors[V].distances_from_set(images));
    }
    int best = -1, best_score = 1 << 30;
    for (int hi = 0; hi < H; ++hi) {
      int score = 0;
      for (size_t vi = 0; vi < r.rel.size(); ++vi)
        score = std::max(score, dist_to_bv[vi][h.pi[r.rel[vi]][r.hull[hi]]]);
      if (score < best_score) {
        best_score = score;
        best = hi;
      }
    }
    r.phi[q] = r.hull[best];
  }

  // psi: orientation induced by each F point
  for (Vertex f : r.F) {
    int hp = r.hull_position(f);
    Bits sigma(int(walls.size()));
    for (size_t w = 0; w < walls.size(); ++w)
      if (!walls[w].first.test(hp)) sigma.set(int(w));
    int q = walls.empty() ? 0 : r.Q.vertex_index(sigma);
    if (q < 0) throw invariant_error("psi image is not a vertex");
    r.psi.push_back(q);
    r.metrics.psi_defect = std::max(r.metrics.psi_defect, h.X.distance(r.phi[q], f));
  }

  // quality metrics
  {
    std::vector<Vertex> img = r.phi;
    std::sort(img.begin(), img.end());
    img.erase(std::unique(img.begin(), img.end()), img.end());
    r.metrics.hausdorff_defect = hausdorff_distance(h.X, img, r.hull);
    double dist = 1.0;
    int step = std::max(1, r.Q.vertex_count() / 24);
    for (int a = 0; a < r.Q.vertex_count(); a += step) {
      auto da = h.X.distances_from(r.phi[a]);
      for (int b = 0; b < r.Q.vertex_count(); b += step) {
        if (a == b) continue;
        int l1 = r.Q.l1_distance(a, b);
        int dx = (*da)[r.phi[b]];
        double scale = double(std::max(1, subdivision.M));
        double up = double(dx) / (scale * l1 + 1.0);
        double dn = (scale * l1) / double(dx + 1.0);
        dist = std::max({dist, up, dn});
      }
    }
    r.metrics.qi_distortion = dist;
  }
  return r;
}

inline CubulationResult cubulate(const HHSInstance& h, const std::vector<Vertex>& F,
                                 CubulationParams params_in) {
  CubulationParams params = params_in.resolved();
  std::vector<std::string> warn;
  auto trees = build_domain_trees(h, F, params, &warn);
  auto [floor, kappa] = calibrate_m_floor(h, trees, params.tree.resolved().eps);
  int M = std::max(params.M, floor);
  int Mp = std::max(params.Mp, 8 * M);
  params.M = M;
  params.Mp = Mp;
  auto sub = subdivide(trees, M, Mp);
  auto r = cubulate_with_points(h, F, params, std::move(trees), sub);
  r.metrics.m_floor = floor;
  r.metrics.kappa_rhos = kappa;
  for (auto& w : warn) r.metrics.warnings.push_back(w);
  return r;
}

// The five-case intersection criterion for two halfspaces, checked against the
// set-theoretic ground truth by the caller. Sides: 0 = minus, 1 = plus.
struct IntersectDecision {
  bool intersect = false;
  int fired_case = 0;  // 1..5, 0 when no case fires
};

inline IntersectDecision halfspaces_intersect(const HHSInstance& h, const CubulationResult& r,
                                              int pi, int side_i, int pj, int side_j) {
  const auto& P = r.subdivision.points;
  int V = P[pi].domain, Z = P[pj].domain;
  const StableTree& tv = r.trees.at(V);
  const StableTree& tz = r.trees.at(Z);
  auto side_mask = [&](int p, int side) {
    Bits m = r.wall_minus_tree[p];
    if (side == 1) {
      Bits flip(m.size());
      for (int n = 0; n < m.size(); ++n)
        if (!m.test(n)) flip.set(n);
      return flip;
    }
    return m;
  };
  IntersectDecision d;
  if (V != Z && h.orthogonal(V, Z)) {
    d.intersect = true;
    d.fired_case = 1;
    return d;
  }
  if (V == Z) {
    Bits a = side_mask(pi, side_i);
    Bits b = side_mask(pj, side_j);
    if (a.intersects(b)) {
      d.intersect = true;
      d.fired_case = 2;
    }
    return d;
  }
  if (h.transverse(V, Z)) {
    int bz = r.beta.at(Z)[h.rho(V, Z)];
    if (side_mask(pj, side_j).test(bz)) {
      d.intersect = true;
      d.fired_case = 3;
      return d;
    }
    int bv = r.beta.at(V)[h.rho(Z, V)];
    if (side_mask(pi, side_i).test(bv)) {
      d.intersect = true;
      d.fired_case = 3;
      return d;
    }
    return d;
  }
  // nested: arrange V strictly inside Z
  bool swapped = false;
  int qi = pi, qside = side_i, wi = pj, wside = side_j;
  int Vin = V, Zout = Z;
  if (h.nested_strict(Z, V)) {
    std::swap(qi, wi);
    std::swap(qside, wside);
    Vin = Z;
    Zout = V;
    swapped = true;
  }
  (void)swapped;
  // now Vin strictly nested in Zout; (qi,qside) lives in Vin; (wi,wside) in Zout
  const StableTree& tin = r.trees.at(Vin);
  const StableTree& tout = r.trees.at(Zout);
  int b_up = r.beta.at(Zout)[h.rho(Vin, Zout)];
  if (side_mask(wi, wside).test(b_up)) {
    d.intersect = true;
    d.fired_case = 4;
    return d;
  }
  int wnode = tout.top_edges[P[wi].top_edge].node_path[P[wi].offset];
  Vertex q_image = tout.nodes[wnode].xi;
  int b_dn = r.beta.at(Vin)[h.rho_down(Zout, Vin, q_image)];
  if (side_mask(qi, qside).test(b_dn)) {
    d.intersect = true;
    d.fired_case = 5;
    return d;
  }
  (void)tv;
  (void)tz;
  return d;
}

// ground truth: do the hull halfspaces intersect?
inline bool halfspaces_intersect_ground_truth(const CubulationResult& r, int pi, int side_i,
                                              int pj, int side_j) {
  int H = int(r.hull.size());
  auto mask = [&](int p, int side) {
    if (side == 0) return r.wall_minus_hull[p];
    Bits out(H);
    for (int i = 0; i < H; ++i)
      if (!r.wall_minus_hull[p].test(i)) out.set(i);
    return out;
  };
  return mask(pi, side_i).intersects(mask(pj, side_j));
}

// Rebuild over a subset of the subdivision points; h is the deletion map on
// orientations. Reports the commutation defect.
struct PointDeletionResult {
  CubulationResult result;
  std::vector<int> vertex_map;  // Q vertex -> Q' vertex
  int commutation_defect = 0;
};

inline PointDeletionResult delete_subdivision_points(const HHSInstance& h,
                                                     const CubulationResult& r,
                                                     const SubdivisionSet& keep) {
  for (auto& p : keep.points)
    if (!std::binary_search(r.subdivision.points.begin(), r.subdivision.points.end(), p))
      throw input_error("delete_subdivision_points: keep is not a subset");
  PointDeletionResult out;
  out.result = cubulate_with_points(h, r.F, r.params, r.trees, keep);
  // restriction of orientations
  std::map<SubdivisionPoint, int> new_wall;
  for (size_t pi = 0; pi < keep.points.size(); ++pi)
    if (out.result.wall_of_point[pi] >= 0)
      new_wall[keep.points[pi]] = out.result.wall_of_point[pi];
  out.vertex_map.assign(r.Q.vertex_count(), -1);
  int mk = out.result.Q.wall_count();
  for (int q = 0; q < r.Q.vertex_count(); ++q) {
    Bits img(mk);
    for (size_t pi = 0; pi < r.subdivision.points.size(); ++pi) {
      int w_old = r.wall_of_point[pi];
      if (w_old < 0) continue;
      auto it = new_wall.find(r.subdivision.points[pi]);
      if (it == new_wall.end()) continue;
      if (r.Q.vertex(q).test(w_old)) img.set(it->second);
    }
    int nq = out.result.Q.vertex_index(img);
    if (nq < 0) throw invariant_error("restricted orientation is not a vertex");
    out.vertex_map[q] = nq;
    out.commutation_defect =
        std::max(out.commutation_defect, h.X.distance(r.phi[q], out.result.phi[nq]));
  }
  return out;
}

}  // namespace stablecubes
