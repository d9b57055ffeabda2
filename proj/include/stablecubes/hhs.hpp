#pragma once

#include <algorithm>
#include <bit>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "stablecubes/metric_graph.hpp"
#include "stablecubes/rng.hpp"

namespace stablecubes {

enum class Rel : uint8_t { Equal, NestedIn, Contains, Orth, Trans };

inline Rel flip_rel(Rel r) {
  if (r == Rel::NestedIn) return Rel::Contains;
  if (r == Rel::Contains) return Rel::NestedIn;
  return r;
}

// Automorphism of an instance: a permutation of domains, compatible per-factor
// isometries, and an isometry of the ambient graph.
struct HHSAutomorphism {
  std::vector<int> domain_perm;                  // V -> gV
  std::vector<std::vector<Vertex>> factor_map;   // per V: C(V)-vertex -> C(gV)-vertex
  std::vector<Vertex> x_map;                     // X-vertex -> X-vertex
};

// Explicit finite hierarchically hyperbolic instance. Instances are data: the
// structure (relations, factor graphs, projection tables, constants) is
// supplied or built, then validated; nothing here constructs projections.
// All pi and rho values are single vertices.
struct HHSInstance {
  MetricGraph X;
  std::vector<std::string> domain_name;
  std::vector<MetricGraph> factors;       // C(V)
  std::vector<std::vector<Rel>> rel;      // rel[u][v], Equal on diagonal
  std::vector<std::vector<Vertex>> pi;    // pi[V][x] -> C(V)-vertex

  // rho_point[U][V] -> C(V)-vertex, for U strictly nested in V or U transverse V
  std::vector<std::vector<Vertex>> rho_point;  // -1 where undefined
  // rho_map[W][V] -> map C(W)-vertex -> C(V)-vertex, for V strictly nested in W
  std::map<std::pair<int, int>, std::vector<Vertex>> rho_map;

  // constants (integer-valued; distances are integers throughout)
  int kappa0 = 0;       // consistency + bounded geodesic image
  int xi = 0;           // projection diameter bound (0: projections are points)
  int lambda_ll = 3;    // large links multiplier
  int E_ll = 1;         // large links threshold, >= max(xi, kappa0)
  int alpha = 0;        // partial realization
  int theta_bbfs = 2;   // stable-projection contract / order threshold
  int delta_factors = 0;  // max hyperbolicity constant over the factors (declared)

  std::vector<int> color;
  std::optional<HHSAutomorphism> automorphism;

  int domain_count() const { return int(factors.size()); }

  bool nested_strict(int u, int v) const { return rel[u][v] == Rel::NestedIn; }
  bool orthogonal(int u, int v) const { return rel[u][v] == Rel::Orth; }
  bool transverse(int u, int v) const { return rel[u][v] == Rel::Trans; }

  Vertex proj(int V, Vertex x) const { return pi[V][x]; }

  int dV(int V, Vertex a, Vertex b) const { return factors[V].distance(a, b); }
  int dV_points(int V, Vertex x, Vertex y) const { return dV(V, pi[V][x], pi[V][y]); }

  Vertex rho(int U, int V) const {
    Vertex r = rho_point[U][V];
    if (r < 0) throw input_error("rho point undefined for (" + domain_name[U] + "," +
                                 domain_name[V] + ")");
    return r;
  }
  Vertex rho_down(int W, int V, Vertex cw) const {
    auto it = rho_map.find({W, V});
    if (it == rho_map.end()) throw input_error("rho map undefined");
    return it->second[cw];
  }

  int maximal_domain() const {
    for (int v = 0; v < domain_count(); ++v) {
      bool max = true;
      for (int u = 0; u < domain_count(); ++u)
        if (u != v && rel[u][v] != Rel::NestedIn) max = false;
      if (max) return v;
    }
    throw input_error("no unique maximal domain");
  }
};

// ---------------------------------------------------------------------------
// validation
// ---------------------------------------------------------------------------

struct AxiomCheck {
  std::string name;
  bool pass = true;
  bool applicable = true;
  std::string witness;   // minimal violating witness, empty if pass
  long long measured = 0;  // measured constant where meaningful
};

struct ValidationReport {
  std::vector<AxiomCheck> checks;
  bool pass = true;
  int measured_kappa0 = 0;

  const AxiomCheck* find(const std::string& name) const {
    for (auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
};

struct ValidateOptions {
  bool strict_large_links = false;  // exhaustive pairs instead of samples
  int sample_pairs = 400;
  uint64_t seed = 1;
};

namespace hhs_detail {

inline void shape_check(const HHSInstance& h, ValidationReport& rep) {
  AxiomCheck c{"shape"};
  int m = h.domain_count();
  auto fail = [&](const std::string& w) {
    c.pass = false;
    if (c.witness.empty()) c.witness = w;
  };
  if (int(h.pi.size()) != m || int(h.rel.size()) != m || int(h.color.size()) != m)
    fail("table sizes");
  for (int v = 0; v < m && c.pass; ++v) {
    if (int(h.pi[v].size()) != h.X.vertex_count()) fail("pi table size at " + h.domain_name[v]);
    for (Vertex x = 0; x < h.X.vertex_count() && c.pass; ++x)
      if (h.pi[v][x] < 0 || h.pi[v][x] >= h.factors[v].vertex_count())
        fail("pi value out of range at " + h.domain_name[v]);
  }
  for (int u = 0; u < m && c.pass; ++u)
    for (int v = 0; v < m && c.pass; ++v) {
      if (h.rel[u][v] != flip_rel(h.rel[v][u])) fail("relation table not consistent");
      if ((u == v) != (h.rel[u][v] == Rel::Equal)) fail("diagonal relation");
      bool need_pt = u != v && (h.rel[u][v] == Rel::NestedIn || h.rel[u][v] == Rel::Trans);
      if (need_pt) {
        if (h.rho_point[u][v] < 0 || h.rho_point[u][v] >= h.factors[v].vertex_count())
          fail("rho point missing/out of range (" + h.domain_name[u] + "," + h.domain_name[v] + ")");
      }
      if (h.rel[v][u] == Rel::NestedIn) {  // v strictly nested in u: need map u->v
        auto it = h.rho_map.find({u, v});
        if (it == h.rho_map.end() || int(it->second.size()) != h.factors[u].vertex_count())
          fail("rho map missing (" + h.domain_name[u] + "->" + h.domain_name[v] + ")");
      }
    }
  rep.checks.push_back(c);
}

}  // namespace hhs_detail

// Exhaustive (desk-scale) check of every finitely-checkable axiom clause, plus
// the stable-projection contract; per-axiom pass/fail with a minimal witness.
inline ValidationReport validate_instance(const HHSInstance& h, ValidateOptions opts = {}) {
  ValidationReport rep;
  const int m = h.domain_count();
  const int n = h.X.vertex_count();

  hhs_detail::shape_check(h, rep);
  if (!rep.checks.back().pass) {
    rep.pass = false;
    return rep;
  }

  {  // projections: measure the coarse-Lipschitz constant over X-edges
    AxiomCheck c{"projections"};
    int K = 0;
    for (auto [u, v] : h.X.edges())
      for (int V = 0; V < m; ++V) K = std::max(K, h.dV_points(V, u, v));
    c.measured = K;
    rep.checks.push_back(c);
  }

  {  // nesting: strict partial order with a unique maximum
    AxiomCheck c{"nesting"};
    for (int u = 0; u < m && c.pass; ++u)
      for (int v = 0; v < m && c.pass; ++v) {
        if (u != v && h.nested_strict(u, v) && h.nested_strict(v, u)) {
          c.pass = false;
          c.witness = "mutual nesting " + h.domain_name[u] + "," + h.domain_name[v];
        }
        for (int w = 0; w < m && c.pass; ++w)
          if (h.nested_strict(u, v) && h.nested_strict(v, w) && u != w && !h.nested_strict(u, w)) {
            c.pass = false;
            c.witness = "nesting not transitive at " + h.domain_name[u] + "," + h.domain_name[v] +
                        "," + h.domain_name[w];
          }
      }
    if (c.pass) {
      try {
        h.maximal_domain();
      } catch (const input_error&) {
        c.pass = false;
        c.witness = "no unique maximal domain";
      }
    }
    rep.checks.push_back(c);
  }

  {  // orthogonality: inheritance and container axiom; orth => not nested
    AxiomCheck c{"orthogonality"};
    for (int v = 0; v < m && c.pass; ++v)
      for (int w = 0; w < m && c.pass; ++w) {
        if (h.orthogonal(v, w) && (h.nested_strict(v, w) || h.nested_strict(w, v))) {
          c.pass = false;
          c.witness = "orthogonal and nested: " + h.domain_name[v] + "," + h.domain_name[w];
        }
        for (int u = 0; u < m && c.pass; ++u)
          if (h.nested_strict(v, w) && h.orthogonal(w, u) && !h.orthogonal(v, u)) {
            c.pass = false;
            c.witness = "orthogonality not inherited: " + h.domain_name[v] + " in " +
                        h.domain_name[w] + " perp " + h.domain_name[u];
          }
      }
    // container: for T and U nested in T with an orthogonal partner inside T,
    // some W properly nested in T contains every V in T orthogonal to U
    for (int T = 0; T < m && c.pass; ++T)
      for (int U = 0; U < m && c.pass; ++U) {
        if (!(U == T || h.nested_strict(U, T))) continue;
        std::vector<int> partners;
        for (int V = 0; V < m; ++V)
          if ((V == T || h.nested_strict(V, T)) && h.orthogonal(V, U)) partners.push_back(V);
        if (partners.empty()) continue;
        bool found = false;
        for (int W = 0; W < m && !found; ++W) {
          if (!h.nested_strict(W, T)) continue;
          bool all = true;
          for (int V : partners)
            if (!(V == W || h.nested_strict(V, W))) all = false;
          if (all) found = true;
        }
        if (!found) {
          c.pass = false;
          c.witness = "no container for " + h.domain_name[U] + " inside " + h.domain_name[T];
        }
      }
    rep.checks.push_back(c);
  }

  int worst_consistency = 0;
  {  // transverse + nested consistency over all X-vertices, and rho-consistency
    AxiomCheck c{"consistency"};
    for (int V = 0; V < m; ++V)
      for (int W = 0; W < m; ++W) {
        if (V >= W) continue;
        if (h.transverse(V, W)) {
          for (Vertex x = 0; x < n; ++x) {
            int a = h.dV(W, h.pi[W][x], h.rho(V, W));
            int b = h.dV(V, h.pi[V][x], h.rho(W, V));
            int mn = std::min(a, b);
            worst_consistency = std::max(worst_consistency, mn);
            if (mn > h.kappa0 && c.pass) {
              c.pass = false;
              c.witness = "transverse consistency at x=" + std::to_string(x) + " (" +
                          h.domain_name[V] + "," + h.domain_name[W] + "), min=" +
                          std::to_string(mn);
            }
          }
        }
      }
    for (int V = 0; V < m; ++V)
      for (int W = 0; W < m; ++W) {
        if (!h.nested_strict(V, W)) continue;
        for (Vertex x = 0; x < n; ++x) {
          int a = h.dV(W, h.pi[W][x], h.rho(V, W));
          int b = h.dV(V, h.pi[V][x], h.rho_down(W, V, h.pi[W][x]));
          int mn = std::min(a, b);
          worst_consistency = std::max(worst_consistency, mn);
          if (mn > h.kappa0 && c.pass) {
            c.pass = false;
            c.witness = "nested consistency at x=" + std::to_string(x) + " (" + h.domain_name[V] +
                        " in " + h.domain_name[W] + "), min=" + std::to_string(mn);
          }
        }
      }
    // rho-consistency: U nested in V, W sees both
    for (int U = 0; U < m; ++U)
      for (int V = 0; V < m; ++V) {
        if (!h.nested_strict(U, V)) continue;
        for (int W = 0; W < m; ++W) {
          if (W == U || W == V) continue;
          bool applies = h.nested_strict(V, W) || (h.transverse(V, W) && !h.orthogonal(W, U));
          if (!applies) continue;
          if (h.rho_point[U][W] < 0 || h.rho_point[V][W] < 0) continue;
          int d = h.dV(W, h.rho(U, W), h.rho(V, W));
          worst_consistency = std::max(worst_consistency, d);
          if (d > h.kappa0 && c.pass) {
            c.pass = false;
            c.witness = "rho consistency (" + h.domain_name[U] + " in " + h.domain_name[V] +
                        " seen from " + h.domain_name[W] + ") = " + std::to_string(d);
          }
        }
      }
    c.measured = worst_consistency;
    rep.measured_kappa0 = worst_consistency;
    rep.checks.push_back(c);
  }

  {  // finite complexity: longest nesting chain
    AxiomCheck c{"complexity"};
    std::vector<int> depth(m, 1);
    bool changed = true;
    while (changed) {
      changed = false;
      for (int u = 0; u < m; ++u)
        for (int v = 0; v < m; ++v)
          if (h.nested_strict(u, v) && depth[u] + 1 > depth[v]) {
            depth[v] = depth[u] + 1;
            changed = true;
          }
    }
    c.measured = *std::max_element(depth.begin(), depth.end());
    rep.checks.push_back(c);
  }

  {  // large links, canonical witness family: maximal domains above threshold
    AxiomCheck c{"large_links"};
    Rng rng(opts.seed);
    std::vector<std::pair<Vertex, Vertex>> pairs;
    if (opts.strict_large_links || (long long)n * n <= 2LL * opts.sample_pairs) {
      for (Vertex x = 0; x < n; ++x)
        for (Vertex y = x + 1; y < n; ++y) pairs.push_back({x, y});
    } else {
      for (int i = 0; i < opts.sample_pairs; ++i)
        pairs.push_back({Vertex(rng.below(n)), Vertex(rng.below(n))});
    }
    for (auto [x, y] : pairs) {
      for (int W = 0; W < m && c.pass; ++W) {
        std::vector<int> inside;
        for (int T = 0; T < m; ++T)
          if (h.nested_strict(T, W)) inside.push_back(T);
        if (inside.empty()) continue;
        long long N = (long long)h.lambda_ll * h.dV_points(W, x, y) + h.lambda_ll;
        std::vector<int> big;
        for (int T : inside)
          if (h.dV_points(T, x, y) >= h.E_ll) big.push_back(T);
        std::vector<int> maximal;
        for (int T : big) {
          bool is_max = true;
          for (int T2 : big)
            if (T2 != T && h.nested_strict(T, T2)) is_max = false;
          if (is_max) maximal.push_back(T);
        }
        if ((long long)maximal.size() > N) {
          c.pass = false;
          c.witness = "too many link domains at (" + std::to_string(x) + "," + std::to_string(y) +
                      ") in " + h.domain_name[W];
        }
        for (int T : maximal)
          if (h.dV(W, h.pi[W][x], h.rho(T, W)) > N && c.pass) {
            c.pass = false;
            c.witness = "link domain " + h.domain_name[T] + " too far in " + h.domain_name[W];
          }
      }
    }
    rep.checks.push_back(c);
  }

  {  // bounded geodesic image, exact refinement of the union check
    AxiomCheck c{"bounded_geodesic_image"};
    for (int W = 0; W < m && c.pass; ++W)
      for (int V = 0; V < m && c.pass; ++V) {
        if (!h.nested_strict(V, W)) continue;
        const MetricGraph& CW = h.factors[W];
        Vertex rv = h.rho(V, W);
        auto drho = CW.distances_from(rv);
        const auto& rmap = h.rho_map.at({W, V});
        int nw = CW.vertex_count();
        for (Vertex a = 0; a < nw && c.pass; ++a) {
          auto da = CW.distances_from(a);
          for (Vertex b = 0; b < nw && c.pass; ++b) {
            // vertices on geodesics a->b avoiding the kappa0-ball around rho
            auto db = CW.distances_from(b);
            std::vector<Vertex> on;
            for (Vertex u = 0; u < nw; ++u)
              if ((*da)[u] + (*db)[u] == (*da)[b] && (*drho)[u] > h.kappa0) on.push_back(u);
            // feasibility: u reachable from a through allowed vertices only
            std::vector<char> reach_a(nw, 0), reach_b(nw, 0);
            for (Vertex u : on) {
              if (u == a) reach_a[u] = 1;
              if (u == b) reach_b[u] = 1;
            }
            bool grown = true;
            while (grown) {
              grown = false;
              for (Vertex u : on) {
                if (!reach_a[u]) {
                  for (Vertex w : CW.neighbors(u))
                    if ((*da)[w] + 1 == (*da)[u] && (*da)[w] + (*db)[w] == (*da)[b] &&
                        (*drho)[w] > h.kappa0 && reach_a[w])
                      reach_a[u] = 1, grown = true;
                }
                if (!reach_b[u]) {
                  for (Vertex w : CW.neighbors(u))
                    if ((*db)[w] + 1 == (*db)[u] && (*da)[w] + (*db)[w] == (*da)[b] &&
                        (*drho)[w] > h.kappa0 && reach_b[w])
                      reach_b[u] = 1, grown = true;
                }
              }
            }
            if (!(reach_a[a] && reach_b[b])) continue;  // no avoiding geodesic at all
            for (Vertex u : on) {
              if (!(reach_a[u] && reach_b[u])) continue;
              for (Vertex v2 : on) {
                if (!(reach_a[v2] && reach_b[v2])) continue;
                if ((*da)[u] + CW.distance(u, v2) + (*db)[v2] != (*da)[b]) continue;
                if (h.dV(V, rmap[u], rmap[v2]) > h.kappa0) {
                  c.pass = false;
                  c.witness = "BGI (" + h.domain_name[V] + " in " + h.domain_name[W] +
                              ") geodesic " + std::to_string(a) + "-" + std::to_string(b);
                  break;
                }
              }
              if (!c.pass) break;
            }
          }
        }
      }
    rep.checks.push_back(c);
  }

  {  // partial realization, existential vertex search over pairwise-orthogonal families
    AxiomCheck c{"partial_realization"};
    std::vector<std::vector<int>> families;
    std::vector<int> cur;
    // enumerate inclusion-maximal pairwise-orthogonal families (checking those suffices:
    // a realization point for a family works for subfamilies of it only if projections
    // match, so we enumerate all nonempty families but cap the blowup)
    std::vector<std::vector<int>> all;
    std::function<void(int)> grow = [&](int start) {
      if (!cur.empty()) all.push_back(cur);
      if (all.size() > 64) return;
      for (int v = start; v < m; ++v) {
        bool ok = true;
        for (int u : cur)
          if (!h.orthogonal(u, v)) ok = false;
        if (!ok) continue;
        cur.push_back(v);
        grow(v + 1);
        cur.pop_back();
      }
    };
    grow(0);
    // tuple entries range over the projection images, per the axiom
    std::vector<std::vector<Vertex>> image(m);
    for (int V = 0; V < m; ++V) {
      std::set<Vertex> im(h.pi[V].begin(), h.pi[V].end());
      image[V].assign(im.begin(), im.end());
    }
    for (auto& fam : all) {
      long long tuples = 1;
      for (int v : fam) tuples *= (long long)image[v].size();
      if (tuples > 200000) continue;  // skip oversized enumerations, report stays honest
      std::vector<size_t> idx(fam.size(), 0);
      while (c.pass) {
        // realize the tuple idx
        bool found = false;
        for (Vertex x = 0; x < n && !found; ++x) {
          bool ok = true;
          for (size_t j = 0; j < fam.size() && ok; ++j)
            if (h.dV(fam[j], h.pi[fam[j]][x], image[fam[j]][idx[j]]) > h.alpha) ok = false;
          for (size_t j = 0; j < fam.size() && ok; ++j) {
            for (int V = 0; V < m && ok; ++V) {
              if (h.nested_strict(fam[j], V) && h.dV(V, h.pi[V][x], h.rho(fam[j], V)) > h.alpha)
                ok = false;
              if (h.transverse(V, fam[j]) && h.dV(V, h.pi[V][x], h.rho(fam[j], V)) > h.alpha)
                ok = false;
            }
          }
          if (ok) found = true;
        }
        if (!found) {
          c.pass = false;
          c.witness = "unrealized tuple in family of size " + std::to_string(fam.size());
        }
        // next tuple
        size_t j = 0;
        while (j < fam.size()) {
          if (++idx[j] < image[fam[j]].size()) break;
          idx[j] = 0;
          ++j;
        }
        if (j == fam.size()) break;
      }
      if (!c.pass) break;
    }
    rep.checks.push_back(c);
  }

  {  // uniqueness: measured theta_u at kappa = 2*E_ll (report-only)
    AxiomCheck c{"uniqueness"};
    int kappa = 2 * h.E_ll;
    int theta_u = 0;
    for (Vertex x = 0; x < n; ++x) {
      auto dx = h.X.distances_from(x);
      for (Vertex y = x + 1; y < n; ++y) {
        int mx = 0;
        for (int V = 0; V < m; ++V) mx = std::max(mx, h.dV_points(V, x, y));
        if (mx < kappa) theta_u = std::max(theta_u, (*dx)[y]);
      }
    }
    c.measured = theta_u;
    rep.checks.push_back(c);
  }

  {  // colorability: each color class pairwise transverse
    AxiomCheck c{"colorable"};
    for (int u = 0; u < m && c.pass; ++u)
      for (int v = u + 1; v < m && c.pass; ++v)
        if (h.color[u] == h.color[v] && !h.transverse(u, v)) {
          c.pass = false;
          c.witness = "same color, not transverse: " + h.domain_name[u] + "," + h.domain_name[v];
        }
    rep.checks.push_back(c);
  }

  {  // stable-projection contract items (4) and (5); items (1)-(3) compare
    // refined to standard projections and are not applicable to instances that
    // carry a single projection table
    AxiomCheck c4{"stable_projections_rho"};
    AxiomCheck c5{"stable_projections_pi"};
    for (int X1 = 0; X1 < m; ++X1)
      for (int Y = 0; Y < m; ++Y)
        for (int Z = 0; Z < m; ++Z) {
          if (X1 == Y || Y == Z || X1 == Z) continue;
          if (h.color[X1] != h.color[Y] || h.color[Y] != h.color[Z]) continue;
          if (h.dV(Y, h.rho(X1, Y), h.rho(Z, Y)) > h.theta_bbfs) {
            if (h.rho(X1, Z) != h.rho(Y, Z) && c4.pass) {
              c4.pass = false;
              c4.witness = "rho(" + h.domain_name[X1] + "->" + h.domain_name[Z] +
                           ") != rho(" + h.domain_name[Y] + "->" + h.domain_name[Z] + ")";
            }
          }
        }
    for (Vertex x = 0; x < n; ++x)
      for (int Y = 0; Y < m; ++Y)
        for (int Z = 0; Z < m; ++Z) {
          if (Y == Z || h.color[Y] != h.color[Z]) continue;
          if (h.dV(Y, h.pi[Y][x], h.rho(Z, Y)) > h.theta_bbfs) {
            if (h.pi[Z][x] != h.rho(Y, Z) && c5.pass) {
              c5.pass = false;
              c5.witness = "pi_" + h.domain_name[Z] + "(x=" + std::to_string(x) +
                           ") != rho(" + h.domain_name[Y] + "->" + h.domain_name[Z] + ")";
            }
          }
        }
    bool any_same_color_pair = false;
    for (int u = 0; u < m; ++u)
      for (int v = u + 1; v < m; ++v)
        if (h.color[u] == h.color[v]) any_same_color_pair = true;
    c4.applicable = c5.applicable = any_same_color_pair;
    rep.checks.push_back(c4);
    rep.checks.push_back(c5);
  }

  for (auto& c : rep.checks)
    if (c.applicable && !c.pass) rep.pass = false;
  return rep;
}

// ---------------------------------------------------------------------------
// relevant domains, order, hulls, involved domains
// ---------------------------------------------------------------------------

// Rel_K(x,y), partitioned by color, each class sorted by the projection order.
// The four equivalent order conditions are cross-checked; a contradiction means
// the instance is unusable at this K.
inline std::vector<std::vector<int>> rel_domains(const HHSInstance& h, Vertex x, Vertex y, int K) {
  int ncol = *std::max_element(h.color.begin(), h.color.end()) + 1;
  std::vector<std::vector<int>> per_color(ncol);
  for (int V = 0; V < h.domain_count(); ++V)
    if (h.dV_points(V, x, y) > K) per_color[h.color[V]].push_back(V);

  const int th = h.theta_bbfs;
  auto before = [&](int A, int B) {  // A < B in the order toward y
    bool c1 = h.dV(B, h.pi[B][x], h.rho(A, B)) <= th;
    bool c2 = h.dV(A, h.rho(B, A), h.pi[A][y]) <= th;
    bool c3 = h.dV(B, h.rho(A, B), h.pi[B][y]) >= K - th;
    bool c4 = h.dV(A, h.pi[A][x], h.rho(B, A)) >= K - th;
    if (c1 != c2 || c1 != c3 || c1 != c4)
      throw construction_error("projection order conditions disagree for " + h.domain_name[A] +
                               "," + h.domain_name[B]);
    return c1;
  };

  for (auto& cls : per_color) {
    if (cls.size() < 2) continue;
    // verify strict totality, then order by predecessor counts (avoids relying
    // on transitivity that we have not certified)
    for (size_t i = 0; i < cls.size(); ++i)
      for (size_t j = i + 1; j < cls.size(); ++j) {
        bool ab = before(cls[i], cls[j]);
        bool ba = before(cls[j], cls[i]);
        if (ab == ba)
          throw construction_error("projection order not total between " + h.domain_name[cls[i]] +
                                   " and " + h.domain_name[cls[j]]);
      }
    std::vector<std::pair<int, int>> keyed;  // (predecessor count, domain)
    for (int A : cls) {
      int wins = 0;
      for (int B : cls)
        if (B != A && before(B, A)) wins++;
      keyed.push_back({wins, A});
    }
    std::sort(keyed.begin(), keyed.end());
    for (size_t i = 0; i < keyed.size(); ++i) {
      if (keyed[i].first != int(i))
        throw construction_error("projection order not transitive in color class");
      cls[i] = keyed[i].second;
    }
  }
  return per_color;
}

// Rel_K(F) = union over pairs, plus the strictly-nested restriction per domain.
struct RelSet {
  std::vector<int> domains;  // sorted
  std::vector<std::vector<int>> nested_in;  // per listed domain: members nested in it

  bool contains(int v) const { return std::binary_search(domains.begin(), domains.end(), v); }
};

inline RelSet rel_set(const HHSInstance& h, const std::vector<Vertex>& F, int K) {
  if (F.empty()) throw input_error("rel_set: empty F");
  std::set<int> ds;
  for (size_t i = 0; i < F.size(); ++i)
    for (size_t j = i + 1; j < F.size(); ++j)
      for (int V = 0; V < h.domain_count(); ++V)
        if (h.dV_points(V, F[i], F[j]) > K) ds.insert(V);
  RelSet out;
  out.domains.assign(ds.begin(), ds.end());
  out.nested_in.resize(out.domains.size());
  for (size_t i = 0; i < out.domains.size(); ++i)
    for (int W : out.domains)
      if (h.nested_strict(W, out.domains[i])) out.nested_in[i].push_back(W);
  return out;
}

// H_theta(F): X-vertices whose every projection lies within theta of the weak
// hull of the projected set.
inline std::vector<Vertex> hull_theta(const HHSInstance& h, const std::vector<Vertex>& F,
                                      int theta) {
  if (F.empty()) throw input_error("hull_theta: empty F");
  std::vector<std::vector<int>> hull_dist(h.domain_count());
  for (int V = 0; V < h.domain_count(); ++V) {
    std::vector<Vertex> pf;
    for (Vertex f : F) pf.push_back(h.pi[V][f]);
    auto hv = weak_hull(h.factors[V], pf);
    hull_dist[V] = h.factors[V].distances_from_set(hv);
  }
  std::vector<Vertex> out;
  for (Vertex x = 0; x < h.X.vertex_count(); ++x) {
    bool in = true;
    for (int V = 0; V < h.domain_count() && in; ++V)
      if (hull_dist[V][h.pi[V][x]] > theta) in = false;
    if (in) out.push_back(x);
  }
  return out;
}

// measured density constant: how far points of the factor hulls can be from
// the projections of the hierarchical hull
inline int hull_projection_density(const HHSInstance& h, const std::vector<Vertex>& F, int theta,
                                   const std::vector<Vertex>& hull) {
  int kappa = 0;
  for (int V = 0; V < h.domain_count(); ++V) {
    std::vector<Vertex> pf, ph;
    for (Vertex f : F) pf.push_back(h.pi[V][f]);
    for (Vertex x : hull) ph.push_back(h.pi[V][x]);
    std::sort(ph.begin(), ph.end());
    ph.erase(std::unique(ph.begin(), ph.end()), ph.end());
    auto d = h.factors[V].distances_from_set(ph);
    for (Vertex u : weak_hull(h.factors[V], pf)) kappa = std::max(kappa, d[u]);
  }
  return kappa;
}

// Domains involved in the transition between F and F' (projection sets differ,
// or the strictly-nested relevant subsets differ).
inline std::vector<int> involved_domains(const HHSInstance& h, const std::vector<Vertex>& F,
                                         const std::vector<Vertex>& Fp, int K) {
  if (hausdorff_distance(h.X, F, Fp) > 1)
    throw input_error("involved_domains: sets are not 1-Hausdorff close");
  auto UF = rel_set(h, F, K);
  auto UFp = rel_set(h, Fp, K);
  std::set<int> all(UF.domains.begin(), UF.domains.end());
  all.insert(UFp.domains.begin(), UFp.domains.end());
  auto proj_set = [&](int V, const std::vector<Vertex>& S) {
    std::set<Vertex> ps;
    for (Vertex f : S) ps.insert(h.pi[V][f]);
    return ps;
  };
  std::vector<int> out;
  for (int V : all) {
    bool inv = proj_set(V, F) != proj_set(V, Fp);
    if (!inv) {
      std::set<int> a, b;
      for (int W : UF.domains)
        if (h.nested_strict(W, V)) a.insert(W);
      for (int W : UFp.domains)
        if (h.nested_strict(W, V)) b.insert(W);
      inv = a != b;
    }
    if (inv) out.push_back(V);
  }
  return out;
}

// sum of s-truncated projection distances vs. true distance
struct DistanceFormulaSample {
  long long truncated_sum = 0;
  int distance = 0;
};

inline DistanceFormulaSample distance_formula_ratio(const HHSInstance& h, int s, Vertex x,
                                                    Vertex y) {
  DistanceFormulaSample out;
  out.distance = h.X.distance(x, y);
  for (int V = 0; V < h.domain_count(); ++V) {
    int d = h.dV_points(V, x, y);
    if (d >= s) out.truncated_sum += d;
  }
  return out;
}

// ---------------------------------------------------------------------------
// builders (instances are data; these are the two stock families plus a
// segmented path used to exercise same-color transverse chains)
// ---------------------------------------------------------------------------

inline HHSInstance make_trivial_hhs(const MetricGraph& g, int delta = -1) {
  HHSInstance h;
  h.X = g;
  h.domain_name = {"S"};
  h.factors = {g};
  h.rel = {{Rel::Equal}};
  h.pi.resize(1);
  h.pi[0].resize(g.vertex_count());
  std::iota(h.pi[0].begin(), h.pi[0].end(), 0);
  h.rho_point.assign(1, std::vector<Vertex>(1, -1));
  h.color = {0};
  h.kappa0 = 0;
  h.xi = 0;
  h.lambda_ll = 3;
  h.E_ll = 1;
  h.alpha = 0;
  h.theta_bbfs = 2;
  h.delta_factors = delta >= 0 ? delta : int(four_point_delta(g).value() + 0.999);
  return h;
}

// Product of 2 or 3 trees. Domains: one per nonempty factor subset; coordinate
// spaces of non-singleton subsets are single vertices.
inline HHSInstance make_tree_product_hhs(const std::vector<MetricGraph>& trees) {
  int d = int(trees.size());
  if (d < 2 || d > 3) throw input_error("tree product: need 2 or 3 factors");
  for (auto& t : trees)
    if (!t.is_tree()) throw input_error("tree product: factor is not a tree");

  HHSInstance h;
  // X = product graph, vertex = mixed-radix tuple
  std::vector<int> sizes;
  for (auto& t : trees) sizes.push_back(t.vertex_count());
  int n = 1;
  for (int s : sizes) n *= s;
  auto decode = [&](int x) {
    std::vector<int> c(d);
    for (int i = 0; i < d; ++i) {
      c[i] = x % sizes[i];
      x /= sizes[i];
    }
    return c;
  };
  auto encode = [&](const std::vector<int>& c) {
    int x = 0;
    for (int i = d - 1; i >= 0; --i) x = x * sizes[i] + c[i];
    return x;
  };
  std::vector<Edge> xedges;
  for (int x = 0; x < n; ++x) {
    auto c = decode(x);
    for (int i = 0; i < d; ++i)
      for (Vertex w : trees[i].neighbors(c[i])) {
        auto c2 = c;
        c2[i] = w;
        int y = encode(c2);
        if (y > x) xedges.push_back({x, y});
      }
  }
  h.X = MetricGraph::from_edges(n, xedges);

  // domains indexed by nonempty subsets of factors
  std::vector<int> subsets;
  for (int A = 1; A < (1 << d); ++A) subsets.push_back(A);
  int m = int(subsets.size());
  MetricGraph point = MetricGraph::from_edges(1, {});
  auto subset_name = [&](int A) {
    std::string s = "V";
    for (int i = 0; i < d; ++i)
      if ((A >> i) & 1) s += std::to_string(i + 1);
    return s;
  };
  h.domain_name.resize(m);
  h.factors.resize(m);
  h.color.resize(m);
  for (int i = 0; i < m; ++i) {
    int A = subsets[i];
    h.domain_name[i] = subset_name(A);
    bool single = (A & (A - 1)) == 0;
    h.factors[i] = single ? trees[std::countr_zero(unsigned(A))] : point;
    h.color[i] = i;  // every domain its own pairwise-transverse (vacuous) class
  }
  h.rel.assign(m, std::vector<Rel>(m, Rel::Equal));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      int A = subsets[i], B = subsets[j];
      if ((A & B) == A && A != B) h.rel[i][j] = Rel::NestedIn;
      else if ((A & B) == B && A != B) h.rel[i][j] = Rel::Contains;
      else if ((A & B) == 0) h.rel[i][j] = Rel::Orth;
      else h.rel[i][j] = Rel::Trans;
    }
  h.pi.assign(m, std::vector<Vertex>(n, 0));
  for (int i = 0; i < m; ++i) {
    int A = subsets[i];
    if ((A & (A - 1)) == 0) {
      int f = std::countr_zero(unsigned(A));
      for (int x = 0; x < n; ++x) h.pi[i][x] = decode(x)[f];
    }
  }
  h.rho_point.assign(m, std::vector<Vertex>(m, -1));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (h.rel[i][j] == Rel::NestedIn || h.rel[i][j] == Rel::Trans)
        h.rho_point[i][j] = 0;  // targets are single-vertex coordinate spaces
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (h.rel[j][i] == Rel::NestedIn) {
        // map C(V_i) -> C(V_j), constant to a root
        h.rho_map[{i, j}] = std::vector<Vertex>(h.factors[i].vertex_count(), 0);
      }
  h.kappa0 = 0;
  h.xi = 0;
  h.lambda_ll = 3;
  h.E_ll = 1;
  h.alpha = 0;
  h.theta_bbfs = 2;
  h.delta_factors = 0;
  return h;
}

// Path of m segments of length L: domains U_1 ... U_m (subpaths, pairwise
// transverse, one shared color) nested in S with C(S) the segment-quotient
// path. Exercises same-color chains and their total order.
inline HHSInstance make_segmented_path_hhs(int segments, int seg_len) {
  if (segments < 2 || seg_len < 2) throw input_error("segmented path: need >=2 segments, len >=2");
  HHSInstance h;
  int n = segments * seg_len + 1;
  std::vector<Edge> pe;
  for (int i = 0; i + 1 < n; ++i) pe.push_back({i, i + 1});
  h.X = MetricGraph::from_edges(n, pe);

  int m = segments + 1;  // U_1..U_m, S last
  h.domain_name.resize(m);
  h.factors.resize(m);
  h.color.assign(m, 0);
  for (int i = 0; i < segments; ++i) {
    h.domain_name[i] = "U" + std::to_string(i + 1);
    std::vector<Edge> se;
    for (int j = 0; j < seg_len; ++j) se.push_back({j, j + 1});
    h.factors[i] = MetricGraph::from_edges(seg_len + 1, se);
    h.color[i] = 0;
  }
  h.domain_name[segments] = "S";
  std::vector<Edge> qe;
  for (int i = 0; i + 1 < segments; ++i) qe.push_back({i, i + 1});
  h.factors[segments] = MetricGraph::from_edges(segments, qe);
  h.color[segments] = 1;

  h.rel.assign(m, std::vector<Rel>(m, Rel::Equal));
  for (int i = 0; i < segments; ++i) {
    for (int j = 0; j < segments; ++j)
      if (i != j) h.rel[i][j] = Rel::Trans;
    h.rel[i][segments] = Rel::NestedIn;
    h.rel[segments][i] = Rel::Contains;
  }

  auto clamp_local = [&](int i, Vertex x) {
    int lo = i * seg_len, hi = (i + 1) * seg_len;
    return std::clamp<int>(x, lo, hi) - lo;
  };
  h.pi.assign(m, {});
  for (int i = 0; i < segments; ++i) {
    h.pi[i].resize(n);
    for (Vertex x = 0; x < n; ++x) h.pi[i][x] = clamp_local(i, x);
  }
  h.pi[segments].resize(n);
  for (Vertex x = 0; x < n; ++x)
    h.pi[segments][x] = std::min(x / seg_len, segments - 1);

  h.rho_point.assign(m, std::vector<Vertex>(m, -1));
  for (int i = 0; i < segments; ++i) {
    for (int j = 0; j < segments; ++j) {
      if (i == j) continue;
      h.rho_point[i][j] = i < j ? 0 : seg_len;  // nearest endpoint of U_j
    }
    h.rho_point[i][segments] = i;  // U_i sits over quotient vertex i
    // downward map C(S) -> C(U_i)
    std::vector<Vertex> rm(segments);
    for (int k = 0; k < segments; ++k)
      rm[k] = k < i ? 0 : (k > i ? seg_len : seg_len / 2);
    h.rho_map[{segments, i}] = rm;
  }
  h.kappa0 = 1;  // quotient projection wobbles by one at segment boundaries
  h.xi = 0;
  h.lambda_ll = 4;
  h.E_ll = 2;
  h.alpha = 1;
  h.theta_bbfs = 2;
  h.delta_factors = 0;
  return h;
}

// apply an automorphism to an X-vertex / domain / factor vertex
inline Vertex apply_auto_x(const HHSAutomorphism& g, Vertex x) { return g.x_map[x]; }

inline std::vector<Vertex> apply_auto_set(const HHSAutomorphism& g, const std::vector<Vertex>& F) {
  std::vector<Vertex> out;
  out.reserve(F.size());
  for (Vertex f : F) out.push_back(g.x_map[f]);
  std::sort(out.begin(), out.end());
  return out;
}

// reflection automorphism of a trivial instance on a path graph
inline HHSAutomorphism path_reflection_automorphism(const HHSInstance& h) {
  int n = h.X.vertex_count();
  HHSAutomorphism g;
  g.domain_perm = {0};
  g.x_map.resize(n);
  for (int i = 0; i < n; ++i) g.x_map[i] = n - 1 - i;
  g.factor_map = {g.x_map};
  return g;
}

}  // namespace stablecubes
