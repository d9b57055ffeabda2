#pragma once

#include <algorithm>
#include <array>
#include <numeric>
#include <optional>
#include <queue>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "stablecubes/bits.hpp"
#include "stablecubes/errors.hpp"

namespace stablecubes {

// A finite set with a family of two-sided partitions. Side 0 is "left".
struct Wallspace {
  int ground_size = 0;
  std::vector<std::pair<Bits, Bits>> walls;  // (left, right), complementary

  static Wallspace make(int ground_size, std::vector<std::pair<Bits, Bits>> walls) {
    Wallspace ws;
    ws.ground_size = ground_size;
    ws.walls = std::move(walls);
    for (auto& [l, r] : ws.walls) {
      if (l.size() != ground_size || r.size() != ground_size)
        throw input_error("wallspace: side size mismatch");
      if ((l & r).any() || (l | r).count() != ground_size)
        throw input_error("wallspace: sides are not complementary");
      if (l.none() || r.none()) throw input_error("wallspace: degenerate wall (empty side)");
    }
    for (size_t i = 0; i < ws.walls.size(); ++i)
      for (size_t j = i + 1; j < ws.walls.size(); ++j)
        if (ws.walls[i].first == ws.walls[j].first || ws.walls[i].first == ws.walls[j].second)
          throw input_error("wallspace: duplicate wall");
    return ws;
  }

  int wall_count() const { return int(walls.size()); }

  // side of wall w containing ground point x (0 = left)
  int side_of(int w, int x) const { return walls[w].second.test(x) ? 1 : 0; }
};

// Vertex model of a finite CAT(0) cube complex: orientations of a wall family,
// stored as bitmasks (bit w = 1 means the right side of wall w). All structural
// predicates (crossing, adjacency to a wall, halfspaces) are computed
// set-theoretically over the complex's own vertex set, which makes wallspace
// duals and synthetic complexes uniform.
class CubeComplex {
 public:
  static constexpr int kDefaultWallBound = 20;

  static CubeComplex from_orientations(int wall_count, std::vector<Bits> vertices) {
    if (vertices.empty()) throw input_error("cube complex needs at least one vertex");
    std::sort(vertices.begin(), vertices.end());
    vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
    CubeComplex cc;
    cc.m_ = wall_count;
    cc.verts_ = std::move(vertices);
    cc.index_.reserve(cc.verts_.size() * 2);
    for (size_t i = 0; i < cc.verts_.size(); ++i) cc.index_.emplace(cc.verts_[i], int(i));
    cc.build_tables();
    return cc;
  }

  int wall_count() const { return m_; }
  int vertex_count() const { return int(verts_.size()); }
  const Bits& vertex(int i) const { return verts_[i]; }
  const std::vector<Bits>& vertices() const { return verts_; }

  int vertex_index(const Bits& b) const {
    auto it = index_.find(b);
    return it == index_.end() ? -1 : it->second;
  }
  bool is_vertex(const Bits& b) const { return index_.count(b) != 0; }

  bool crosses(int w1, int w2) const { return crossing_.test(w1 * m_ + w2); }

  // vertices lying on `side` of wall w, as a bitset over vertex indices
  const Bits& halfspace(int w, int side) const { return half_[w][side]; }

  int l1_distance(int x, int y) const { return (verts_[x] ^ verts_[y]).count(); }

  // walls separating x from y
  Bits separators(int x, int y) const { return verts_[x] ^ verts_[y]; }

  // longest chain of pairwise non-crossing separating walls; equals the minimal
  // number of cube moves between x and y
  int linf_distance(int x, int y) const {
    Bits diff = separators(x, y);
    std::vector<int> walls = diff.to_indices();
    if (walls.empty()) return 0;
    // order by containment of the y-side halfspaces; non-crossing separators
    // are always comparable in this order
    int k = int(walls.size());
    std::vector<int> ord(k);
    std::iota(ord.begin(), ord.end(), 0);
    std::vector<int> side_y(k);
    for (int i = 0; i < k; ++i) side_y[i] = verts_[y].test(walls[i]) ? 1 : 0;
    std::vector<int> cnt(k);
    for (int i = 0; i < k; ++i) cnt[i] = half_[walls[i]][side_y[i]].count();
    std::sort(ord.begin(), ord.end(), [&](int a, int b) { return cnt[a] < cnt[b]; });
    std::vector<int> best(k, 1);
    int ans = 1;
    for (int ii = 0; ii < k; ++ii) {
      int i = ord[ii];
      for (int jj = 0; jj < ii; ++jj) {
        int j = ord[jj];
        if (!crosses(walls[i], walls[j]) &&
            half_[walls[j]][side_y[j]].subset_of(half_[walls[i]][side_y[i]]))
          best[i] = std::max(best[i], best[j] + 1);
      }
      ans = std::max(ans, best[i]);
    }
    return ans;
  }

  // per-wall majority orientation of a triple; a vertex in any dual complex
  int median(int x, int y, int z) const {
    Bits m = (verts_[x] & verts_[y]) | (verts_[y] & verts_[z]) | (verts_[x] & verts_[z]);
    int idx = vertex_index(m);
    if (idx < 0) throw invariant_error("median of a vertex triple is not a vertex");
    return idx;
  }

  // no wall separates vertex v from wall w; equivalently the flip of v across w
  // is again a vertex
  bool adjacent_to_wall(int v, int w) const {
    Bits flipped = verts_[v];
    flipped.flip(w);
    return is_vertex(flipped);
  }

  // set-theoretic variant: some wall w2 has the halfspace missing v containing
  // one entire side of w
  bool wall_separates_vertex_from_wall(int w2, int v, int w) const {
    if (w2 == w) return false;
    int side_v = verts_[v].test(w2) ? 1 : 0;
    const Bits& other = half_[w2][1 - side_v];
    return half_[w][0].subset_of(other) || half_[w][1].subset_of(other);
  }

  std::vector<std::pair<int, int>> skeleton_edges() const {
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < vertex_count(); ++i) {
      for (int w = 0; w < m_; ++w) {
        Bits f = verts_[i];
        f.flip(w);
        int j = vertex_index(f);
        if (j > i) out.push_back({i, j});
      }
    }
    return out;
  }

  int dimension() const {
    // max size of a mutually-crossing separator family over vertex pairs equals
    // the max mutually-crossing wall family realized by some pair; for finite
    // duals this is the max clique of the crossing graph restricted to walls
    // with both halfspaces nonempty, found by branch and bound (wall counts are
    // capped, and crossing graphs here are small)
    std::vector<int> ws;
    for (int w = 0; w < m_; ++w)
      if (half_[w][0].any() && half_[w][1].any()) ws.push_back(w);
    int best = 0;
    std::vector<int> cur;
    max_clique(ws, 0, cur, best);
    return best;
  }

 private:
  void max_clique(const std::vector<int>& ws, size_t start, std::vector<int>& cur,
                  int& best) const {
    best = std::max(best, int(cur.size()));
    if (cur.size() + (ws.size() - start) <= size_t(best)) return;
    for (size_t i = start; i < ws.size(); ++i) {
      bool ok = true;
      for (int c : cur)
        if (!crosses(ws[i], c)) {
          ok = false;
          break;
        }
      if (!ok) continue;
      cur.push_back(ws[i]);
      max_clique(ws, i + 1, cur, best);
      cur.pop_back();
    }
  }

  void build_tables() {
    half_.assign(m_, {Bits(vertex_count()), Bits(vertex_count())});
    for (int i = 0; i < vertex_count(); ++i)
      for (int w = 0; w < m_; ++w) half_[w][verts_[i].test(w) ? 1 : 0].set(i);
    crossing_ = Bits(m_ * m_);
    for (int a = 0; a < m_; ++a)
      for (int b = a + 1; b < m_; ++b) {
        bool cross = half_[a][0].intersects(half_[b][0]) && half_[a][0].intersects(half_[b][1]) &&
                     half_[a][1].intersects(half_[b][0]) && half_[a][1].intersects(half_[b][1]);
        if (cross) {
          crossing_.set(a * m_ + b);
          crossing_.set(b * m_ + a);
        }
      }
  }

  int m_ = 0;
  std::vector<Bits> verts_;
  std::unordered_map<Bits, int, BitsHash> index_;
  std::vector<std::array<Bits, 2>> half_;  // per wall: vertex sets of the two sides
  Bits crossing_;
};

// Sageev dual: vertices are the coherent orientations, enumerated as the flip
// closure of the orientations induced by ground points (for finite wallspaces
// this is the full canonical-coherent set).
inline CubeComplex dual_complex(const Wallspace& ws, int wall_bound = CubeComplex::kDefaultWallBound,
                                size_t vertex_bound = size_t(1) << 22) {
  const int m = ws.wall_count();
  if (wall_bound > 0 && m > wall_bound)
    throw resource_error("dual_complex: wall count " + std::to_string(m) + " exceeds bound " +
                         std::to_string(wall_bound));

  // bad_[w][s] = walls w2 such that choosing side s of w conflicts with the
  // current side of w2 -- split by that side for word-parallel checks
  std::vector<std::array<std::array<Bits, 2>, 2>> bad(m);
  for (int w = 0; w < m; ++w)
    for (int s = 0; s < 2; ++s)
      for (int t = 0; t < 2; ++t) {
        Bits b(m);
        const Bits& sw = s ? ws.walls[w].second : ws.walls[w].first;
        for (int w2 = 0; w2 < m; ++w2) {
          if (w2 == w) continue;
          const Bits& tw = t ? ws.walls[w2].second : ws.walls[w2].first;
          if (!sw.intersects(tw)) b.set(w2);
        }
        bad[w][s][t] = b;
      }

  auto coherent_flip = [&](const Bits& sigma, int w, int new_side) {
    // conflicts with walls currently on side 1: sigma & bad[w][new_side][1]
    // conflicts with walls currently on side 0: ~sigma & bad[w][new_side][0]
    if (sigma.intersects(bad[w][new_side][1])) return false;
    Bits not_sigma = ~sigma;
    return !not_sigma.intersects(bad[w][new_side][0]);
  };

  std::unordered_set<Bits, BitsHash> seen;
  std::queue<Bits> todo;
  for (int x = 0; x < ws.ground_size; ++x) {
    Bits sigma(m);
    for (int w = 0; w < m; ++w)
      if (ws.side_of(w, x) == 1) sigma.set(w);
    if (seen.insert(sigma).second) todo.push(sigma);
  }
  while (!todo.empty()) {
    Bits sigma = todo.front();
    todo.pop();
    for (int w = 0; w < m; ++w) {
      int ns = sigma.test(w) ? 0 : 1;
      if (!coherent_flip(sigma, w, ns)) continue;
      Bits nxt = sigma;
      nxt.flip(w);
      if (seen.insert(nxt).second) {
        if (seen.size() > vertex_bound) throw resource_error("dual_complex: vertex bound exceeded");
        todo.push(nxt);
      }
    }
  }

  std::vector<Bits> verts(seen.begin(), seen.end());
  return CubeComplex::from_orientations(m, std::move(verts));
}

// Restriction of orientations to a wall subset. Returns the restricted complex
// and the vertex map (surjective, 1-Lipschitz in l1).
struct HyperplaneDeletion {
  CubeComplex complex;
  std::vector<int> kept_walls;     // old wall index per new wall
  std::vector<int> vertex_map;     // old vertex index -> new vertex index
  std::vector<int> wall_map;       // old wall index -> new index or -1
};

inline HyperplaneDeletion delete_hyperplanes(const CubeComplex& cc, const std::vector<int>& doomed) {
  std::vector<bool> drop(cc.wall_count(), false);
  for (int w : doomed) {
    if (w < 0 || w >= cc.wall_count()) throw input_error("delete_hyperplanes: bad wall index");
    drop[w] = true;
  }
  HyperplaneDeletion out;
  out.wall_map.assign(cc.wall_count(), -1);
  for (int w = 0; w < cc.wall_count(); ++w)
    if (!drop[w]) {
      out.wall_map[w] = int(out.kept_walls.size());
      out.kept_walls.push_back(w);
    }
  int mk = int(out.kept_walls.size());
  std::vector<Bits> restricted(cc.vertex_count(), Bits(mk));
  for (int i = 0; i < cc.vertex_count(); ++i)
    for (int k = 0; k < mk; ++k)
      if (cc.vertex(i).test(out.kept_walls[k])) restricted[i].set(k);
  std::vector<Bits> verts = restricted;
  out.complex = CubeComplex::from_orientations(mk, std::move(verts));
  out.vertex_map.resize(cc.vertex_count());
  for (int i = 0; i < cc.vertex_count(); ++i)
    out.vertex_map[i] = out.complex.vertex_index(restricted[i]);
  return out;
}

// A halfspace of a complex: (wall, side).
struct Halfspace {
  int wall = -1;
  int side = 0;
  bool operator==(const Halfspace& o) const { return wall == o.wall && side == o.side; }
  bool operator<(const Halfspace& o) const {
    return wall != o.wall ? wall < o.wall : side < o.side;
  }
};

struct HalfspaceBijectionResult {
  bool ok = false;
  std::string failure;                     // empty when ok
  std::optional<std::pair<Halfspace, Halfspace>> violating_pair;
  std::vector<int> vertex_map;             // cc1 vertex index -> cc2 vertex index
};

// Lemma-style check: a bijection of halfspaces preserving complements and
// disjointness induces a cube isomorphism h(x) = iota . x . j^{-1}. `iota` maps
// each halfspace of cc1 to one of cc2; we verify the preservation conditions
// set-theoretically, build h on vertices, and certify it is a graph isomorphism.
inline HalfspaceBijectionResult apply_halfspace_bijection(
    const CubeComplex& cc1, const CubeComplex& cc2,
    const std::vector<std::array<Halfspace, 2>>& iota) {
  HalfspaceBijectionResult res;
  if (int(iota.size()) != cc1.wall_count()) throw input_error("iota: wrong wall count");
  std::vector<bool> hit(cc2.wall_count() * 2, false);
  for (auto& pair : iota)
    for (int s = 0; s < 2; ++s) {
      auto h = pair[s];
      if (h.wall < 0 || h.wall >= cc2.wall_count()) throw input_error("iota: bad wall");
      if (hit[h.wall * 2 + h.side]) throw input_error("iota: not a bijection of halfspaces");
      hit[h.wall * 2 + h.side] = true;
    }

  // complements: iota must send the two sides of a wall to the two sides of one wall
  for (int w = 0; w < cc1.wall_count(); ++w) {
    if (iota[w][0].wall != iota[w][1].wall || iota[w][0].side == iota[w][1].side) {
      res.failure = "complement not preserved at wall " + std::to_string(w);
      res.violating_pair = {{Halfspace{w, 0}, Halfspace{w, 1}}};
      return res;
    }
  }

  // disjointness both ways: halfspaces H, H' are disjoint iff their vertex sets are
  for (int a = 0; a < cc1.wall_count(); ++a)
    for (int b = a + 1; b < cc1.wall_count(); ++b)
      for (int sa = 0; sa < 2; ++sa)
        for (int sb = 0; sb < 2; ++sb) {
          bool dis1 = !cc1.halfspace(a, sa).intersects(cc1.halfspace(b, sb));
          auto ha = iota[a][sa];
          auto hb = iota[b][sb];
          bool dis2 = !cc2.halfspace(ha.wall, ha.side).intersects(cc2.halfspace(hb.wall, hb.side));
          if (dis1 != dis2) {
            res.failure = "disjointness not preserved";
            res.violating_pair = {{Halfspace{a, sa}, Halfspace{b, sb}}};
            return res;
          }
        }

  // induced vertex map
  res.vertex_map.assign(cc1.vertex_count(), -1);
  std::vector<int> seen(cc2.vertex_count(), 0);
  for (int i = 0; i < cc1.vertex_count(); ++i) {
    Bits img(cc2.wall_count());
    for (int w = 0; w < cc1.wall_count(); ++w) {
      auto h = iota[w][cc1.vertex(i).test(w) ? 1 : 0];
      if (h.side == 1) img.set(h.wall);
    }
    int j = cc2.vertex_index(img);
    if (j < 0) {
      res.failure = "image of vertex " + std::to_string(i) + " is not a vertex";
      return res;
    }
    res.vertex_map[i] = j;
    seen[j]++;
  }
  if (cc1.vertex_count() != cc2.vertex_count()) {
    res.failure = "vertex counts differ";
    return res;
  }
  for (int c : seen)
    if (c != 1) {
      res.failure = "vertex map is not a bijection";
      return res;
    }
  // adjacency is automatic (flips map to flips), but certify anyway
  for (auto [u, v] : cc1.skeleton_edges()) {
    if ((cc2.vertex(res.vertex_map[u]) ^ cc2.vertex(res.vertex_map[v])).count() != 1) {
      res.failure = "adjacency not preserved";
      return res;
    }
  }
  res.ok = true;
  return res;
}

}  // namespace stablecubes
