#include <catch2/catch_amalgamated.hpp>

#include "stablecubes/cube_complex.hpp"
#include "stablecubes/oracles.hpp"
#include "stablecubes/rng.hpp"

using namespace stablecubes;

namespace {

Bits bits_of(int n, std::initializer_list<int> idx) {
  Bits b(n);
  for (int i : idx) b.set(i);
  return b;
}

// wallspace with n pairwise-crossing walls over 2^n ground points
Wallspace crossing_walls(int n) {
  int ground = 1 << n;
  std::vector<std::pair<Bits, Bits>> walls;
  for (int w = 0; w < n; ++w) {
    Bits l(ground), r(ground);
    for (int x = 0; x < ground; ++x) ((x >> w) & 1 ? r : l).set(x);
    walls.push_back({l, r});
  }
  return Wallspace::make(ground, walls);
}

// n nested walls over a path-like ground set 0..n
Wallspace nested_walls(int n) {
  int ground = n + 1;
  std::vector<std::pair<Bits, Bits>> walls;
  for (int w = 0; w < n; ++w) {
    Bits l(ground), r(ground);
    for (int x = 0; x < ground; ++x) (x <= w ? l : r).set(x);
    walls.push_back({l, r});
  }
  return Wallspace::make(ground, walls);
}

Wallspace random_wallspace(Rng& rng, int ground, int walls) {
  std::vector<std::pair<Bits, Bits>> out;
  int guard = 0;
  while (int(out.size()) < walls && guard++ < 1000) {
    Bits l(ground), r(ground);
    for (int x = 0; x < ground; ++x) (rng.coin() ? l : r).set(x);
    if (l.none() || r.none()) continue;
    bool dup = false;
    for (auto& [pl, pr] : out)
      if (pl == l || pr == l) dup = true;
    if (!dup) out.push_back({l, r});
  }
  return Wallspace::make(ground, out);
}

}  // namespace

TEST_CASE("dual of pairwise-crossing walls is a cube") {
  auto cc = dual_complex(crossing_walls(3));
  CHECK(cc.vertex_count() == 8);
  CHECK(cc.dimension() == 3);
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b) CHECK(cc.crosses(a, b));
}

TEST_CASE("dual of nested walls is a path") {
  auto cc = dual_complex(nested_walls(5));
  CHECK(cc.vertex_count() == 6);
  CHECK(cc.dimension() == 1);
  // endpoints: all-left and all-right orientations
  int ends = 0;
  for (int v = 0; v < cc.vertex_count(); ++v) {
    int deg = 0;
    for (int w = 0; w < 5; ++w)
      if (cc.adjacent_to_wall(v, w)) deg++;
    if (deg == 1) ends++;
  }
  CHECK(ends == 2);
}

TEST_CASE("dual vertices equal brute-force coherent enumeration (mixed nesting)") {
  // 2 crossing walls + 1 wall nested under one of them
  int ground = 6;
  auto mk = [&](std::initializer_list<int> l) { return bits_of(ground, l); };
  std::vector<std::pair<Bits, Bits>> walls;
  walls.push_back({mk({0, 1, 2}), mk({3, 4, 5})});
  walls.push_back({mk({0, 3}), mk({1, 2, 4, 5})});
  walls.push_back({mk({0, 1, 3, 4}), mk({2, 5})});
  auto ws = Wallspace::make(ground, walls);
  auto cc = dual_complex(ws);
  auto brute = oracle::enumerate_coherent_orientations(ws);
  CHECK(cc.vertices() == brute);
}

TEST_CASE("dual vertices equal brute force on random wallspaces") {
  Rng rng(123);
  for (int trial = 0; trial < 40; ++trial) {
    auto ws = random_wallspace(rng, 5 + int(rng.below(5)), 2 + int(rng.below(7)));
    auto cc = dual_complex(ws);
    CHECK(cc.vertices() == oracle::enumerate_coherent_orientations(ws));
  }
}

TEST_CASE("l1 and linf metrics") {
  auto cube = dual_complex(crossing_walls(3));
  int lo = cube.vertex_index(bits_of(3, {}));
  int hi = cube.vertex_index(bits_of(3, {0, 1, 2}));
  CHECK(cube.l1_distance(lo, hi) == 3);
  CHECK(cube.linf_distance(lo, hi) == 1);

  auto chain = dual_complex(nested_walls(5));
  int a = chain.vertex_index(bits_of(5, {}));
  int b = chain.vertex_index(bits_of(5, {0, 1, 2, 3, 4}));
  CHECK(chain.l1_distance(a, b) == 5);
  CHECK(chain.linf_distance(a, b) == 5);

  CHECK(cube.l1_distance(lo, cube.vertex_index(bits_of(3, {1}))) == 1);
}

TEST_CASE("metrics agree with BFS oracles on random complexes") {
  Rng rng(321);
  for (int trial = 0; trial < 25; ++trial) {
    auto ws = random_wallspace(rng, 6 + int(rng.below(4)), 2 + int(rng.below(6)));
    auto cc = dual_complex(ws);
    for (int rep = 0; rep < 8; ++rep) {
      int x = int(rng.below(cc.vertex_count()));
      int y = int(rng.below(cc.vertex_count()));
      CHECK(cc.l1_distance(x, y) == oracle::skeleton_distance(cc, x, y));
      CHECK(cc.linf_distance(x, y) == oracle::cube_move_distance(cc, x, y));
    }
  }
}

TEST_CASE("median") {
  auto cc = dual_complex(crossing_walls(2));
  int a = cc.vertex_index(bits_of(2, {}));
  int b = cc.vertex_index(bits_of(2, {1}));
  int c = cc.vertex_index(bits_of(2, {0}));
  CHECK(cc.median(a, a, b) == a);
  CHECK(cc.median(a, b, c) == a);  // corners (0,0),(0,1),(1,0) -> (0,0)

  Rng rng(55);
  for (int trial = 0; trial < 20; ++trial) {
    auto ws = random_wallspace(rng, 7, 2 + int(rng.below(6)));
    auto cx = dual_complex(ws);
    int x = int(rng.below(cx.vertex_count()));
    int y = int(rng.below(cx.vertex_count()));
    int z = int(rng.below(cx.vertex_count()));
    int m = cx.median(x, y, z);
    CHECK(m == oracle::brute_median(cx, x, y, z));
  }
}

TEST_CASE("hyperplane deletion") {
  SECTION("delete all walls leaves a point") {
    auto cc = dual_complex(crossing_walls(3));
    auto del = delete_hyperplanes(cc, {0, 1, 2});
    CHECK(del.complex.vertex_count() == 1);
  }
  SECTION("3-cube minus one wall is a square") {
    auto cc = dual_complex(crossing_walls(3));
    auto del = delete_hyperplanes(cc, {1});
    CHECK(del.complex.vertex_count() == 4);
    // res collapses pairs
    std::vector<int> count(4, 0);
    for (int i = 0; i < cc.vertex_count(); ++i) count[del.vertex_map[i]]++;
    for (int c : count) CHECK(c == 2);
  }
  SECTION("nested chain minus middle wall is a shorter path, res monotone") {
    auto cc = dual_complex(nested_walls(5));
    auto del = delete_hyperplanes(cc, {2});
    CHECK(del.complex.vertex_count() == 5);
    // order along the chain by number of right-sides
    std::vector<int> pos(cc.vertex_count());
    for (int i = 0; i < cc.vertex_count(); ++i) pos[i] = cc.vertex(i).count();
    for (int i = 0; i < cc.vertex_count(); ++i)
      for (int j = 0; j < cc.vertex_count(); ++j)
        if (pos[i] < pos[j])
          CHECK(del.complex.vertex(del.vertex_map[i]).count() <=
                del.complex.vertex(del.vertex_map[j]).count());
  }
  SECTION("res is 1-lipschitz and surjective, deletions compose") {
    Rng rng(77);
    auto ws = random_wallspace(rng, 8, 7);
    auto cc = dual_complex(ws);
    auto d1 = delete_hyperplanes(cc, {1});
    auto d2 = delete_hyperplanes(d1.complex, {d1.wall_map[4]});
    auto d12 = delete_hyperplanes(cc, {1, 4});
    for (int i = 0; i < cc.vertex_count(); ++i)
      CHECK(d12.complex.vertex(d12.vertex_map[i]) ==
            d2.complex.vertex(d2.vertex_map[d1.vertex_map[i]]));
    for (int i = 0; i < cc.vertex_count(); ++i)
      for (int j = 0; j < cc.vertex_count(); ++j)
        CHECK(d1.complex.l1_distance(d1.vertex_map[i], d1.vertex_map[j]) <=
              cc.l1_distance(i, j));
  }
}

TEST_CASE("halfspace bijection") {
  SECTION("identity") {
    auto cc = dual_complex(nested_walls(4));
    std::vector<std::array<Halfspace, 2>> iota;
    for (int w = 0; w < 4; ++w) iota.push_back({Halfspace{w, 0}, Halfspace{w, 1}});
    auto res = apply_halfspace_bijection(cc, cc, iota);
    REQUIRE(res.ok);
    for (int i = 0; i < cc.vertex_count(); ++i) CHECK(res.vertex_map[i] == i);
  }
  SECTION("swapping two crossing walls of a square is an automorphism") {
    auto cc = dual_complex(crossing_walls(2));
    std::vector<std::array<Halfspace, 2>> iota{{Halfspace{1, 0}, Halfspace{1, 1}},
                                               {Halfspace{0, 0}, Halfspace{0, 1}}};
    auto res = apply_halfspace_bijection(cc, cc, iota);
    REQUIRE(res.ok);
  }
  SECTION("violating disjointness on a nested pair fails with the pair named") {
    auto cc = dual_complex(nested_walls(2));
    // swap the sides of wall 1 only: left of wall0 and (old) left of wall1
    // intersect, but left of wall0 and right of wall1 do not
    std::vector<std::array<Halfspace, 2>> iota{{Halfspace{0, 0}, Halfspace{0, 1}},
                                               {Halfspace{1, 1}, Halfspace{1, 0}}};
    auto res = apply_halfspace_bijection(cc, cc, iota);
    REQUIRE_FALSE(res.ok);
    CHECK(res.violating_pair.has_value());
  }
  SECTION("non-bijective iota rejected") {
    auto cc = dual_complex(nested_walls(2));
    std::vector<std::array<Halfspace, 2>> iota{{Halfspace{0, 0}, Halfspace{0, 1}},
                                               {Halfspace{0, 0}, Halfspace{0, 1}}};
    CHECK_THROWS_AS(apply_halfspace_bijection(cc, cc, iota), input_error);
  }
}

TEST_CASE("wallspace validation") {
  Bits l(4), r(4);
  l.set(0);
  l.set(1);
  r.set(2);
  r.set(3);
  CHECK_THROWS_AS(Wallspace::make(4, {{l, l}}), input_error);
  Bits empty(4), all(4);
  all = ~empty;
  CHECK_THROWS_AS(Wallspace::make(4, {{empty, all}}), input_error);
  CHECK_THROWS_AS(Wallspace::make(4, {{l, r}, {l, r}}), input_error);
}
