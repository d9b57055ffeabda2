#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "stablecubes/stable_tree.hpp"

namespace stablecubes {

// A stable subsegment: node-index interval inside one topological edge of T_e.
struct TreePiece {
  int top_edge = -1;
  int lo = 0, hi = 0;  // node-path index range, inclusive
  bool from_unchanged = false;

  int length() const { return hi - lo; }
};

// Correspondence between the stable parts of two trees built from perturbed
// data: a bijection of stable subsegments, identical outside a bounded
// exceptional set, with every constant measured and reported.
struct TreeCorrespondence {
  std::vector<std::pair<TreePiece, TreePiece>> matched;  // T-piece <-> T'-piece
  std::vector<bool> identical;   // per matched pair: equal as vertex/edge sets (after g)
  std::vector<bool> reversed;    // orientation of the T'-piece relative to the T-piece

  int exceptions = 0;            // matched pairs not from unchanged components
  int max_hausdorff = 0;         // over non-identical matched pairs
  int unmatched_dropped = 0;     // large candidates without a partner
  int complement_pieces[2] = {0, 0};
  int complement_max_diam[2] = {0, 0};
  int carve_scale = 0;           // K_m
  int min_candidate_diam = 0;    // L1
  int match_tolerance = 0;       // L2

  int changed_components[2] = {0, 0};
};

namespace corr_detail {

inline std::vector<Vertex> piece_zpath(const StableTree& t, const TreePiece& p) {
  std::vector<Vertex> out;
  for (int i = p.lo; i <= p.hi; ++i) out.push_back(t.nodes[t.top_edges[p.top_edge].node_path[i]].xi);
  return out;
}

inline std::vector<Edge> piece_zedges(const StableTree& t, const TreePiece& p,
                                      const std::vector<Vertex>* gmap) {
  auto zp = piece_zpath(t, p);
  std::vector<Edge> out;
  for (size_t i = 0; i + 1 < zp.size(); ++i) {
    Vertex a = gmap ? (*gmap)[zp[i]] : zp[i];
    Vertex b = gmap ? (*gmap)[zp[i + 1]] : zp[i + 1];
    out.push_back(make_edge(a, b));
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<Edge> comp_zedges(const StableTree::ExternalComponent& c,
                                     const std::vector<Vertex>* gmap) {
  std::vector<Edge> out;
  for (auto [u, v] : c.zedges) {
    Vertex a = gmap ? (*gmap)[u] : u;
    Vertex b = gmap ? (*gmap)[v] : v;
    out.push_back(make_edge(a, b));
  }
  std::sort(out.begin(), out.end());
  return out;
}

// carve, inside one external component, the tree-hulls of the K_m-balls around
// the given ambient sources; returns the carved node set
inline std::set<int> carve_component(const MetricGraph& g, const StableTree& t, int comp,
                                     const std::vector<Vertex>& sources, int K) {
  std::set<int> carved;
  const auto& ids = t.external[comp].node_ids;
  std::set<int> idset(ids.begin(), ids.end());
  for (Vertex y : sources) {
    auto row = g.distances_from(y);
    std::vector<int> marked;
    for (int n : ids)
      if ((*row)[t.nodes[n].xi] <= K) marked.push_back(n);
    if (marked.empty()) continue;
    // hull within the component: prune leaves not marked (component is a tree)
    std::set<int> alive(ids.begin(), ids.end());
    std::set<int> markset(marked.begin(), marked.end());
    bool changed = true;
    while (changed) {
      changed = false;
      for (auto it = alive.begin(); it != alive.end();) {
        int deg = 0;
        for (int w : t.adj[*it])
          if (alive.count(w) && idset.count(w)) deg++;
        if (deg <= 1 && !markset.count(*it)) {
          it = alive.erase(it);
          changed = true;
        } else {
          ++it;
        }
      }
    }
    carved.insert(alive.begin(), alive.end());
  }
  return carved;
}

inline int piece_hausdorff(const MetricGraph& g, const std::vector<Vertex>& a,
                           const std::vector<Vertex>& b) {
  auto da = g.distances_from_set(a);
  auto db = g.distances_from_set(b);
  int h = 0;
  for (Vertex v : a) h = std::max(h, db[v]);
  for (Vertex v : b) h = std::max(h, da[v]);
  return h;
}

}  // namespace corr_detail

// Builds the correspondence of Theorem-style stability: unchanged external
// components contribute their topological edges verbatim; changed components
// are carved around the perturbed points and the surviving long segments are
// matched greedily by Hausdorff distance.
inline TreeCorrespondence compare_stable_trees(const MetricGraph& g, const StableTree& T,
                                               const StableTree& Tp, int N,
                                               const std::vector<Vertex>* g_iso = nullptr) {
  // preconditions, with the measured violation in the message
  {
    std::vector<Vertex> gY = T.Y;
    if (g_iso)
      for (auto& y : gY) y = (*g_iso)[y];
    std::sort(gY.begin(), gY.end());
    std::vector<int> sym;
    std::set_symmetric_difference(gY.begin(), gY.end(), Tp.Y.begin(), Tp.Y.end(),
                                  std::back_inserter(sym));
    if (int(sym.size()) > N)
      throw input_error("compare_stable_trees: |Y sym-diff Y'| = " + std::to_string(sym.size()) +
                        " exceeds N = " + std::to_string(N));
    std::vector<Vertex> gF = T.F;
    if (g_iso)
      for (auto& f : gF) f = (*g_iso)[f];
    int hf = hausdorff_distance(g, gF, Tp.F);
    if (hf > 1)
      throw input_error("compare_stable_trees: d_Haus(gF, F') = " + std::to_string(hf));
  }

  std::vector<Vertex> ginv;
  if (g_iso) {
    ginv.resize(g_iso->size());
    for (size_t i = 0; i < g_iso->size(); ++i) ginv[(*g_iso)[i]] = Vertex(i);
  }

  TreeCorrespondence out;
  {
    auto it = T.image();
    auto itp = Tp.image();
    if (g_iso)
      for (auto& v : it) v = (*g_iso)[v];
    out.carve_scale = std::max(1, corr_detail::piece_hausdorff(g, it, itp));
  }
  const int K = out.carve_scale;
  out.min_candidate_diam = 4 * K + 4;
  out.match_tolerance = 2 * K + 2;

  // component identification by g-mapped edge sets (multimap: abstract copies
  // of the same subgraph may coexist)
  std::map<std::vector<Edge>, std::vector<int>> comp_index_p;
  for (size_t j = 0; j < Tp.external.size(); ++j)
    comp_index_p[corr_detail::comp_zedges(Tp.external[j], nullptr)].push_back(int(j));
  std::vector<int> match_comp(T.external.size(), -1);
  std::vector<char> comp_used_p(Tp.external.size(), 0);
  for (size_t i = 0; i < T.external.size(); ++i) {
    auto key = corr_detail::comp_zedges(T.external[i], g_iso);
    auto it = comp_index_p.find(key);
    if (it != comp_index_p.end() && !it->second.empty()) {
      match_comp[i] = it->second.front();
      it->second.erase(it->second.begin());
      comp_used_p[match_comp[i]] = 1;
    }
  }
  for (int m : match_comp)
    if (m < 0) out.changed_components[0]++;
  for (size_t j = 0; j < Tp.external.size(); ++j)
    if (!comp_used_p[j]) out.changed_components[1]++;

  // carve sources: the other configuration's Y u F, in this tree's frame
  std::vector<Vertex> src_T, src_Tp;
  for (Vertex y : Tp.Y) src_T.push_back(g_iso ? ginv[y] : y);
  for (Vertex f : Tp.F) src_T.push_back(g_iso ? ginv[f] : f);
  for (Vertex y : T.Y) src_Tp.push_back(g_iso ? (*g_iso)[y] : y);
  for (Vertex f : T.F) src_Tp.push_back(g_iso ? (*g_iso)[f] : f);

  auto collect_pieces = [&](const StableTree& t, const std::vector<char>& comp_unchanged,
                            const std::vector<Vertex>& sources) {
    std::vector<TreePiece> stable, candidates;
    std::map<int, std::set<int>> carved_by_comp;
    for (size_t c = 0; c < t.external.size(); ++c)
      if (!comp_unchanged[c])
        carved_by_comp[int(c)] = corr_detail::carve_component(g, t, int(c), sources, K);
    for (size_t e = 0; e < t.top_edges.size(); ++e) {
      const auto& te = t.top_edges[e];
      if (comp_unchanged[te.comp]) {
        stable.push_back({int(e), 0, int(te.node_path.size()) - 1, true});
        continue;
      }
      const auto& carved = carved_by_comp[te.comp];
      int i = 0, n = int(te.node_path.size());
      while (i < n) {
        if (carved.count(te.node_path[i])) {
          ++i;
          continue;
        }
        int j = i;
        while (j + 1 < n && !carved.count(te.node_path[j + 1])) ++j;
        TreePiece p{int(e), i, j, false};
        if (p.length() >= out.min_candidate_diam) candidates.push_back(p);
        i = j + 1;
      }
    }
    return std::pair{stable, candidates};
  };

  std::vector<char> unchanged_T(T.external.size(), 0), unchanged_Tp(Tp.external.size(), 0);
  for (size_t i = 0; i < T.external.size(); ++i)
    if (match_comp[i] >= 0) {
      unchanged_T[i] = 1;
      unchanged_Tp[match_comp[i]] = 1;
    }

  auto [stable_T, cand_T] = collect_pieces(T, unchanged_T, src_T);
  auto [stable_Tp, cand_Tp] = collect_pieces(Tp, unchanged_Tp, src_Tp);

  // unchanged pieces: identical by construction; match by edge-set key
  std::map<std::vector<Edge>, std::vector<TreePiece>> stable_p_by_key;
  for (auto& p : stable_Tp)
    stable_p_by_key[corr_detail::piece_zedges(Tp, p, nullptr)].push_back(p);
  size_t stable_p_left = stable_Tp.size();
  for (auto& p : stable_T) {
    auto key = corr_detail::piece_zedges(T, p, g_iso);
    auto it = stable_p_by_key.find(key);
    if (it == stable_p_by_key.end() || it->second.empty())
      throw invariant_error("unchanged component lost its topological edge");
    TreePiece partner = it->second.front();
    it->second.erase(it->second.begin());
    stable_p_left--;
    // orientation: compare the mapped forward path with the partner's
    auto fwd = corr_detail::piece_zpath(T, p);
    if (g_iso)
      for (auto& v : fwd) v = (*g_iso)[v];
    auto fwd_p = corr_detail::piece_zpath(Tp, partner);
    out.matched.push_back({p, partner});
    out.identical.push_back(true);
    out.reversed.push_back(fwd != fwd_p);
  }
  if (stable_p_left != 0)
    throw invariant_error("unchanged component mismatch between the trees");

  // changed candidates: greedy Hausdorff matching
  {
    std::vector<std::tuple<int, int, int>> cands;  // (dH, i, j)
    std::vector<std::vector<Vertex>> zs_T, zs_Tp;
    for (auto& p : cand_T) {
      auto z = corr_detail::piece_zpath(T, p);
      if (g_iso)
        for (auto& v : z) v = (*g_iso)[v];
      zs_T.push_back(z);
    }
    for (auto& p : cand_Tp) zs_Tp.push_back(corr_detail::piece_zpath(Tp, p));
    for (size_t i = 0; i < cand_T.size(); ++i)
      for (size_t j = 0; j < cand_Tp.size(); ++j) {
        int dh = corr_detail::piece_hausdorff(g, zs_T[i], zs_Tp[j]);
        if (dh <= out.match_tolerance) cands.push_back({dh, int(i), int(j)});
      }
    std::sort(cands.begin(), cands.end());
    std::vector<char> used_i(cand_T.size(), 0), used_j(cand_Tp.size(), 0);
    for (auto [dh, i, j] : cands) {
      if (used_i[i] || used_j[j]) continue;
      used_i[i] = used_j[j] = 1;
      TreePiece pa = cand_T[i], pb = cand_Tp[j];
      bool ident = false, rev = false;
      // trim to the longest common subpath; where the perturbed trees overlap,
      // the stable subsets should agree exactly
      {
        std::set<Edge> eb;
        for (size_t s = 0; s + 1 < zs_Tp[j].size(); ++s)
          eb.insert(make_edge(zs_Tp[j][s], zs_Tp[j][s + 1]));
        int best_lo = -1, best_len = 0, run_lo = -1;
        for (size_t s = 0; s + 1 < zs_T[i].size(); ++s) {
          if (eb.count(make_edge(zs_T[i][s], zs_T[i][s + 1]))) {
            if (run_lo < 0) run_lo = int(s);
            if (int(s) - run_lo + 1 > best_len) {
              best_len = int(s) - run_lo + 1;
              best_lo = run_lo;
            }
          } else {
            run_lo = -1;
          }
        }
        if (best_len >= out.min_candidate_diam) {
          Vertex a = zs_T[i][best_lo], b = zs_T[i][best_lo + best_len];
          int ia = -1, ib = -1;
          for (size_t s = 0; s < zs_Tp[j].size(); ++s) {
            if (zs_Tp[j][s] == a) ia = int(s);
            if (zs_Tp[j][s] == b) ib = int(s);
          }
          if (ia >= 0 && ib >= 0 && std::abs(ia - ib) == best_len) {
            pa = TreePiece{pa.top_edge, pa.lo + best_lo, pa.lo + best_lo + best_len, false};
            pb = TreePiece{pb.top_edge, pb.lo + std::min(ia, ib), pb.lo + std::max(ia, ib), false};
            ident = true;
            rev = ia > ib;
          }
        }
      }
      out.matched.push_back({pa, pb});
      out.identical.push_back(ident);
      if (!ident) {
        // orient by endpoint proximity
        int straight = g.distance(zs_T[i].front(), zs_Tp[j].front()) +
                       g.distance(zs_T[i].back(), zs_Tp[j].back());
        int crossed = g.distance(zs_T[i].front(), zs_Tp[j].back()) +
                      g.distance(zs_T[i].back(), zs_Tp[j].front());
        rev = crossed < straight;
        out.exceptions++;
        out.max_hausdorff = std::max(out.max_hausdorff, dh);
      }
      out.reversed.push_back(rev);
    }
    for (size_t i = 0; i < cand_T.size(); ++i)
      if (!used_i[i]) out.unmatched_dropped++;
    for (size_t j = 0; j < cand_Tp.size(); ++j)
      if (!used_j[j]) out.unmatched_dropped++;
  }

  // complement statistics: external edges not inside a matched piece
  auto complement_stats = [&](const StableTree& t, int side) {
    std::set<std::pair<int, int>> stable_edges;  // (top_edge, position)
    for (size_t m = 0; m < out.matched.size(); ++m) {
      const TreePiece& p = side == 0 ? out.matched[m].first : out.matched[m].second;
      for (int i = p.lo; i < p.hi; ++i) stable_edges.insert({p.top_edge, i});
    }
    // build the leftover subgraph on nodes
    std::map<int, std::vector<int>> rest;  // node adjacency via leftover edges
    int rest_edges = 0;
    for (size_t e = 0; e < t.top_edges.size(); ++e)
      for (size_t i = 0; i + 1 < t.top_edges[e].node_path.size(); ++i)
        if (!stable_edges.count({int(e), int(i)})) {
          int a = t.top_edges[e].node_path[i], b = t.top_edges[e].node_path[i + 1];
          rest[a].push_back(b);
          rest[b].push_back(a);
          rest_edges++;
        }
    std::set<int> seen;
    for (auto& [start, _] : rest) {
      if (seen.count(start)) continue;
      std::vector<int> comp{start};
      seen.insert(start);
      for (size_t qi = 0; qi < comp.size(); ++qi)
        for (int w : rest[comp[qi]])
          if (!seen.count(w)) {
            seen.insert(w);
            comp.push_back(w);
          }
      out.complement_pieces[side]++;
      // diameter within the component (tree, so BFS from an extreme point twice)
      auto bfs = [&](int s) {
        std::map<int, int> d{{s, 0}};
        std::vector<int> q{s};
        int far = s;
        for (size_t qi = 0; qi < q.size(); ++qi)
          for (int w : rest[q[qi]])
            if (!d.count(w)) {
              d[w] = d[q[qi]] + 1;
              if (d[w] > d[far]) far = w;
              q.push_back(w);
            }
        return std::pair{far, d[far]};
      };
      auto [far, _d] = bfs(comp[0]);
      auto [_f2, diam] = bfs(far);
      out.complement_max_diam[side] = std::max(out.complement_max_diam[side], diam);
    }
    (void)rest_edges;
  };
  complement_stats(T, 0);
  complement_stats(Tp, 1);
  return out;
}

}  // namespace stablecubes
