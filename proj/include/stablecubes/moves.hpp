#pragma once

#include <algorithm>
#include <array>
#include <string>
#include <vector>

#include "stablecubes/cube_complex.hpp"

namespace stablecubes {

// f : P -> vertices of a complex, P = {0, .., size-1}
using PointConfig = std::vector<int>;

inline void check_config(const CubeComplex& cc, const PointConfig& f) {
  if (f.empty()) throw input_error("point config must be nonempty");
  for (int v : f)
    if (v < 0 || v >= cc.vertex_count()) throw input_error("point config: bad vertex");
}

// walls with f-images on both sides
inline Bits separating_walls(const CubeComplex& cc, const PointConfig& f) {
  check_config(cc, f);
  Bits diff(cc.wall_count());
  for (size_t i = 1; i < f.size(); ++i) diff |= cc.vertex(f[i]) ^ cc.vertex(f[0]);
  return diff;
}

struct WallClassification {
  Bits separating;    // H_f
  Bits extremal;      // Ext(f)
  Bits transitional;  // T(f)
  // for transitional walls: the side where every f(P)-point is adjacent, else -1
  std::vector<int> adjacent_side;
  // point indices whose image lies on the adjacent side, per transitional wall
  std::vector<std::vector<int>> p0;
};

inline WallClassification classify_walls(const CubeComplex& cc, const PointConfig& f) {
  WallClassification out;
  out.separating = separating_walls(cc, f);
  out.extremal = Bits(cc.wall_count());
  out.transitional = Bits(cc.wall_count());
  out.adjacent_side.assign(cc.wall_count(), -1);
  out.p0.assign(cc.wall_count(), {});

  out.separating.for_each([&](int w) {
    bool all_adj[2] = {true, true};
    for (int v : f) {
      int side = cc.vertex(v).test(w) ? 1 : 0;
      if (!cc.adjacent_to_wall(v, w)) all_adj[side] = false;
    }
    if (!(all_adj[0] || all_adj[1])) return;
    out.extremal.set(w);
    if (all_adj[0] && all_adj[1]) return;  // extremal, not transitional
    out.transitional.set(w);
    int s = all_adj[0] ? 0 : 1;
    out.adjacent_side[w] = s;
    for (size_t p = 0; p < f.size(); ++p)
      if ((cc.vertex(f[p]).test(w) ? 1 : 0) == s) out.p0[w].push_back(int(p));
  });
  return out;
}

// One move: every point on the all-adjacent side of a transitional wall crosses it.
inline PointConfig move_step(const CubeComplex& cc, const PointConfig& f,
                             const WallClassification& cls) {
  PointConfig next(f.size());
  for (size_t p = 0; p < f.size(); ++p) {
    std::vector<int> jumps;
    cls.transitional.for_each([&](int w) {
      if ((cc.vertex(f[p]).test(w) ? 1 : 0) == cls.adjacent_side[w]) jumps.push_back(w);
    });
    for (size_t a = 0; a < jumps.size(); ++a)
      for (size_t b = a + 1; b < jumps.size(); ++b)
        if (!cc.crosses(jumps[a], jumps[b]))
          throw invariant_error("move_step: J(p) is not mutually crossing");
    Bits img = cc.vertex(f[p]);
    for (int w : jumps) img.flip(w);
    int idx = cc.vertex_index(img);
    if (idx < 0) throw invariant_error("move_step: flipped orientation is not a vertex");
    next[p] = idx;
  }
  Bits expect = cls.separating ^ cls.transitional;
  if (!(separating_walls(cc, next) == expect))
    throw invariant_error("move_step: separator set after move is wrong");
  return next;
}

inline PointConfig move_step(const CubeComplex& cc, const PointConfig& f) {
  return move_step(cc, f, classify_walls(cc, f));
}

inline int linf_diameter(const CubeComplex& cc, const PointConfig& f) {
  int d = 0;
  for (size_t i = 0; i < f.size(); ++i)
    for (size_t j = i + 1; j < f.size(); ++j) d = std::max(d, cc.linf_distance(f[i], f[j]));
  return d;
}

// f_0 = f, f_{i+1} = Move(f_i), until no transitional walls remain.
inline std::vector<PointConfig> move_sequence(const CubeComplex& cc, const PointConfig& f) {
  std::vector<PointConfig> seq{f};
  int guard = separating_walls(cc, f).count();
  while (true) {
    auto cls = classify_walls(cc, seq.back());
    if (cls.separating.any() && cls.extremal.none())
      throw invariant_error("move_sequence: Ext empty with nonempty separator set");
    if (cls.transitional.none()) break;
    seq.push_back(move_step(cc, seq.back(), cls));
    if (int(seq.size()) - 1 > guard) throw invariant_error("move_sequence: did not stabilize");
  }
  if (linf_diameter(cc, seq.back()) > 1)
    throw invariant_error("move_sequence: terminal image not in a single cube");
  return seq;
}

// Final image plus a canonical representative: per-wall majority over the image
// multiset's distinct vertices, ties to side 0. The result is a vertex of the
// terminal cube, and a pure function of the image set.
struct BarycentricCube {
  std::vector<int> image;  // distinct final vertices, sorted
  int representative = -1;
  int steps = 0;
};

inline BarycentricCube barycentric_cube(const CubeComplex& cc, const PointConfig& f) {
  auto seq = move_sequence(cc, f);
  BarycentricCube out;
  out.steps = int(seq.size()) - 1;
  out.image = seq.back();
  std::sort(out.image.begin(), out.image.end());
  out.image.erase(std::unique(out.image.begin(), out.image.end()), out.image.end());
  Bits rep(cc.wall_count());
  for (int w = 0; w < cc.wall_count(); ++w) {
    int ones = 0;
    for (int v : out.image)
      if (cc.vertex(v).test(w)) ones++;
    if (2 * ones > int(out.image.size())) rep.set(w);
  }
  out.representative = cc.vertex_index(rep);
  if (out.representative < 0)
    throw invariant_error("barycentric_cube: majority representative is not a vertex");
  return out;
}

//
// -- verification helpers (exact lemma-level checks used by tests and suites) --
//

struct ContractionReport {
  bool terminal_diameter_ok = true;   // diam_inf(f_n(P)) <= 1
  bool step_size_ok = true;           // d_inf(f_i(p), f_{i+1}(p)) <= 1
  bool geodesic_ok = true;            // no wall crossed twice per point
  bool separation_ok = true;          // no wall separates f(P) from f_n(P)
  bool image_dependence_ok = true;    // f_i . g = (f . g)_i for surjective g
  bool deletion_ok = true;            // |n - n'| <= 1 and pointwise d_inf <= 1
  std::string witness;
  int steps = 0;

  bool all_ok() const {
    return terminal_diameter_ok && step_size_ok && geodesic_ok && separation_ok &&
           image_dependence_ok && deletion_ok;
  }
};

// Runs the full move sequence and checks items (1)-(5) of the stability
// contract; each entry of `deletions` is a mutually-crossing wall set for
// item (6) / fellow-traveling.
inline ContractionReport verify_contraction(const CubeComplex& cc, const PointConfig& f,
                                            const std::vector<std::vector<int>>& deletions = {}) {
  ContractionReport rep;
  auto seq = move_sequence(cc, f);
  rep.steps = int(seq.size()) - 1;

  if (linf_diameter(cc, seq.back()) > 1) {
    rep.terminal_diameter_ok = false;
    rep.witness = "terminal diameter";
  }

  std::vector<Bits> crossed(f.size(), Bits(cc.wall_count()));
  for (size_t i = 0; i + 1 < seq.size(); ++i) {
    for (size_t p = 0; p < f.size(); ++p) {
      Bits d = cc.vertex(seq[i][p]) ^ cc.vertex(seq[i + 1][p]);
      if (cc.linf_distance(seq[i][p], seq[i + 1][p]) > 1) {
        rep.step_size_ok = false;
        rep.witness = "step size at step " + std::to_string(i);
      }
      if (crossed[p].intersects(d)) {
        rep.geodesic_ok = false;
        rep.witness = "wall crossed twice by point " + std::to_string(p);
      }
      crossed[p] |= d;
    }
  }

  Bits hf = separating_walls(cc, f);
  for (int w = 0; w < cc.wall_count(); ++w) {
    if (hf.test(w)) continue;  // images on both sides, cannot separate all of f(P)
    int side = cc.vertex(f[0]).test(w) ? 1 : 0;
    for (int q : seq.back())
      if ((cc.vertex(q).test(w) ? 1 : 0) != side) {
        rep.separation_ok = false;
        rep.witness = "wall " + std::to_string(w) + " separates f(P) from terminal image";
      }
  }

  {  // duplicate every point through a surjection
    PointConfig fg;
    std::vector<int> g;
    for (size_t r = 0; r < 2; ++r)
      for (size_t p = 0; p < f.size(); ++p) {
        fg.push_back(f[p]);
        g.push_back(int(p));
      }
    auto seq2 = move_sequence(cc, fg);
    if (seq2.size() != seq.size()) {
      rep.image_dependence_ok = false;
      rep.witness = "surjection changed sequence length";
    } else {
      for (size_t i = 0; i < seq.size(); ++i)
        for (size_t q = 0; q < fg.size(); ++q)
          if (seq2[i][q] != seq[i][g[q]]) {
            rep.image_dependence_ok = false;
            rep.witness = "surjection changed step " + std::to_string(i);
          }
    }
  }

  for (const auto& G : deletions) {
    for (size_t a = 0; a < G.size(); ++a)
      for (size_t b = a + 1; b < G.size(); ++b)
        if (!cc.crosses(G[a], G[b]))
          throw input_error("verify_contraction: deletion set must be mutually crossing");
    auto del = delete_hyperplanes(cc, G);
    PointConfig f2(f.size());
    for (size_t p = 0; p < f.size(); ++p) f2[p] = del.vertex_map[f[p]];
    auto seq2 = move_sequence(del.complex, f2);
    int n1 = int(seq.size()) - 1, n2 = int(seq2.size()) - 1;
    if (std::abs(n1 - n2) > 1) {
      rep.deletion_ok = false;
      rep.witness = "sequence lengths differ by " + std::to_string(std::abs(n1 - n2));
    }
    for (int i = 0; i <= std::max(n1, n2); ++i) {
      const PointConfig& a = seq[std::min(i, n1)];
      const PointConfig& b = seq2[std::min(i, n2)];
      for (size_t p = 0; p < f.size(); ++p)
        if (del.complex.linf_distance(del.vertex_map[a[p]], b[p]) > 1) {
          rep.deletion_ok = false;
          rep.witness = "fellow traveling fails at step " + std::to_string(i);
        }
    }
  }
  return rep;
}

// Lemma-level helpers for property tests.

// when G avoids Ext(f), Move and deletion commute exactly
inline bool easy_commute_holds(const CubeComplex& cc, const PointConfig& f,
                               const std::vector<int>& G) {
  auto cls = classify_walls(cc, f);
  for (int w : G)
    if (cls.extremal.test(w)) throw input_error("easy_commute: G meets Ext(f)");
  auto del = delete_hyperplanes(cc, G);
  PointConfig f_del(f.size());
  for (size_t p = 0; p < f.size(); ++p) f_del[p] = del.vertex_map[f[p]];
  PointConfig lhs0 = move_step(cc, f);
  PointConfig lhs(f.size());
  for (size_t p = 0; p < f.size(); ++p) lhs[p] = del.vertex_map[lhs0[p]];
  PointConfig rhs = move_step(del.complex, f_del);
  return lhs == rhs;
}

// first index i with w in Ext(f_i); -1 if never
inline int first_extremal_time(const CubeComplex& cc, const PointConfig& f, int w) {
  PointConfig cur = f;
  for (int i = 0;; ++i) {
    auto cls = classify_walls(cc, cur);
    if (!cls.separating.test(w)) return cls.extremal.test(w) ? i : -1;
    if (cls.extremal.test(w)) return i;
    if (cls.transitional.none()) return -1;
    cur = move_step(cc, cur, cls);
  }
}

}  // namespace stablecubes
