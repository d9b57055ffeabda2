#include <catch2/catch_amalgamated.hpp>

#include "stablecubes/rng.hpp"
#include "stablecubes/stable_tree.hpp"
#include "stablecubes/tree_correspondence.hpp"

using namespace stablecubes;

namespace {

MetricGraph path_graph(int len) {
  std::vector<Edge> e;
  for (int i = 0; i < len; ++i) e.push_back({i, i + 1});
  return MetricGraph::from_edges(len + 1, e);
}

// star with `legs` legs of length `len`; center is 0, leg i occupies
// 1+i*len .. (i+1)*len with the leaf at the end
MetricGraph star_graph(int legs, int len) {
  std::vector<Edge> e;
  for (int i = 0; i < legs; ++i) {
    int base = 1 + i * len;
    e.push_back(make_edge(0, base));
    for (int j = 0; j + 1 < len; ++j) e.push_back({base + j, base + j + 1});
  }
  return MetricGraph::from_edges(1 + legs * len, e);
}

StableTreeParams line_params() {
  // E = 8, eps' = 1, eps = 0
  StableTreeParams p;
  p.delta = 0;
  p.eps = 0;
  p.epsp = 1;
  p.E = 8;
  return p;
}

}  // namespace

TEST_CASE("build_clusters") {
  auto g = path_graph(100);
  SECTION("far pair of F points gives singletons") {
    auto cg = build_clusters(g, {0, 100}, {}, 8);
    REQUIRE(cg.clusters.size() == 2);
    CHECK(cg.clusters[0] == std::vector<Vertex>{0});
    CHECK(cg.clusters[1] == std::vector<Vertex>{100});
  }
  SECTION("everything close gives one cluster") {
    auto cg = build_clusters(g, {50, 52}, {51, 54}, 8);
    CHECK(cg.clusters.size() == 1);
  }
  SECTION("the line instance") {
    auto cg = build_clusters(g, {0, 100}, {30, 34, 70}, 8);
    REQUIRE(cg.clusters.size() == 4);
    CHECK(cg.clusters[0] == std::vector<Vertex>{0});
    CHECK(cg.clusters[1] == std::vector<Vertex>{30, 34});
    CHECK(cg.clusters[2] == std::vector<Vertex>{70});
    CHECK(cg.clusters[3] == std::vector<Vertex>{100});
  }
  SECTION("empty F rejected, off-hull Y warned") {
    CHECK_THROWS_AS(build_clusters(g, {}, {}, 8), input_error);
    auto g2 = star_graph(3, 10);
    auto cg = build_clusters(g2, {1, 10}, {15}, 4, /*eps=*/2);  // Y on another leg
    CHECK_FALSE(cg.warnings.empty());
  }
}

TEST_CASE("separation graph") {
  SECTION("two clusters are always joined") {
    auto g = path_graph(60);
    auto cg = build_clusters(g, {0, 60}, {}, 8);
    auto sg = separation_graph(g, cg, 1);
    CHECK(sg.has_edge(0, 1));
    CHECK(sg.connected);
  }
  SECTION("middle cluster separates the ends of a line") {
    auto g = path_graph(80);
    auto cg = build_clusters(g, {0, 80}, {40}, 8);
    auto sg = separation_graph(g, cg, 1);
    CHECK(sg.has_edge(0, 1));
    CHECK(sg.has_edge(1, 2));
    CHECK_FALSE(sg.has_edge(0, 2));
  }
  SECTION("three leaf-end clusters of a big star match the direct separation scan") {
    auto g = star_graph(3, 30);
    std::vector<Vertex> F{30, 60, 90};  // the three leaves
    auto cg = build_clusters(g, F, {}, 8);
    auto sg = separation_graph(g, cg, 1);
    // independent scan: cluster c separates (a,b) iff some vertex on a geodesic
    // between closest points is within 2 of c
    for (int a = 0; a < 3; ++a)
      for (int b = a + 1; b < 3; ++b) {
        bool sep = false;
        for (int c = 0; c < 3; ++c) {
          if (c == a || c == b) continue;
          for (Vertex x : cg.clusters[a])
            for (Vertex y : cg.clusters[b])
              if (g.distance(x, y) == g.distance(cg.clusters[a][0], cg.clusters[b][0]))
                for (Vertex u = 0; u < g.vertex_count(); ++u)
                  if (g.on_geodesic(x, u, y) && g.distance(u, cg.clusters[c][0]) <= 2) sep = true;
        }
        CHECK(sg.has_edge(a, b) == !sep);
      }
  }
  SECTION("parameter precondition") {
    auto g = path_graph(20);
    auto cg = build_clusters(g, {0, 20}, {}, 8);
    CHECK_THROWS_AS(separation_graph(g, cg, 2), param_error);
  }
}

TEST_CASE("shadow") {
  auto g = path_graph(100);
  auto lambdaF = steiner_network(g, {{0}, {100}});
  SECTION("single network vertex at eps 0") {
    auto s = shadow(g, lambdaF, {42}, 0);
    CHECK(s.vertices == std::vector<Vertex>{42});
  }
  SECTION("shadow of F covers the network") {
    auto s = shadow(g, lambdaF, {0, 100}, 0);
    CHECK(s.vertices.size() == 101);
  }
  SECTION("line instance cluster shadow") {
    auto s = shadow(g, lambdaF, {30, 34}, 2);
    std::vector<Vertex> expect;
    for (Vertex v = 28; v <= 36; ++v) expect.push_back(v);
    CHECK(s.vertices == expect);
  }
  SECTION("empty shadow when nothing is close") {
    auto g2 = star_graph(2, 10);
    auto net = steiner_network(g2, {{1}, {5}});
    auto s = shadow(g2, net, {20}, 1);  // far leaf of the other leg
    CHECK(s.empty());
  }
}

TEST_CASE("stable tree on a bare path") {
  auto g = path_graph(40);
  auto t = build_stable_tree(g, {0, 40}, {}, line_params());
  CHECK(t.node_count() == 41);
  CHECK(t.edges.size() == 40);
  CHECK(t.total_branching() == 0);
  CHECK(t.external.size() == 1);
  int tc_edges = 0;
  for (auto& e : t.edges)
    if (e.kind == ForestKind::Cluster) tc_edges++;
  CHECK(tc_edges == 0);
  auto rep = measure_stable_tree(g, t);
  CHECK(rep.branching_ok);
  CHECK(rep.leaves_in_f_union_y);
  CHECK(rep.hull_hausdorff == 0);
}

TEST_CASE("one cluster collapses the tree to an internal network") {
  auto g = path_graph(10);
  auto t = build_stable_tree(g, {2, 6}, {4}, line_params());
  CHECK(t.external.empty());
  // T = lambda(F cap C) = the geodesic [2..6]
  CHECK(t.node_count() == 5);
  for (auto& e : t.edges) CHECK(e.kind == ForestKind::Cluster);
}

TEST_CASE("the line instance tree") {
  auto g = path_graph(100);
  auto t = build_stable_tree(g, {0, 100}, {30, 34, 70}, line_params());
  CHECK(t.node_count() == 101);
  CHECK(t.total_branching() == 0);
  CHECK(t.external.size() == 3);
  int tc_edges = 0;
  for (auto& e : t.edges)
    if (e.kind == ForestKind::Cluster) tc_edges++;
  CHECK(tc_edges == 4);  // mu({30,34}) = [30..34]
  auto rep = measure_stable_tree(g, t);
  CHECK(rep.branching_ok);
  CHECK(rep.leaves_in_f_union_y);
  REQUIRE(t.top_edges.size() == 3);  // [0..30], [34..70], [70..100]
  CHECK(t.top_edges[0].length() == 30);
  CHECK(t.top_edges[1].length() == 36);
  CHECK(t.top_edges[2].length() == 30);
}

TEST_CASE("cluster classification") {
  auto g = path_graph(100);
  SECTION("middle F-free bivalent cluster is E0 with an interval shadow") {
    auto cg = build_clusters(g, {0, 100}, {50}, 8);
    auto sg = separation_graph(g, cg, 1);
    CHECK(sg.is_e0 == std::vector<bool>{false, true, false});
    auto lambdaF = steiner_network(g, {{0}, {100}});
    auto rep = classify_clusters(g, cg, sg, lambdaF, {0, 100}, 0);
    CHECK(rep.interval_shadows_ok);
    CHECK(rep.shadows_disjoint);
  }
  SECTION("clusters that all contain F points leave E0 empty") {
    auto cg = build_clusters(g, {0, 50, 100}, {}, 8);
    auto sg = separation_graph(g, cg, 1);
    for (bool b : sg.is_e0) CHECK_FALSE(b);
  }
  SECTION("a chain of four interior clusters is a path in edge order") {
    auto cg = build_clusters(g, {0, 100}, {20, 40, 60, 80}, 8);
    auto sg = separation_graph(g, cg, 1);
    auto lambdaF = steiner_network(g, {{0}, {100}});
    auto rep = classify_clusters(g, cg, sg, lambdaF, {0, 100}, 0);
    CHECK(rep.interval_shadows_ok);
    CHECK(rep.edge_order_ok);
    CHECK(rep.shadows_disjoint);
  }
}

TEST_CASE("stable tree on random trees keeps the branching bound") {
  Rng rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    int n = 30 + int(rng.below(40));
    std::vector<Edge> e;
    for (int v = 1; v < n; ++v) e.push_back(make_edge(int(rng.below(v)), v));
    auto g = MetricGraph::from_edges(n, e);
    int k = 2 + int(rng.below(4));
    std::set<Vertex> fs;
    while (int(fs.size()) < k) fs.insert(int(rng.below(n)));
    std::vector<Vertex> F(fs.begin(), fs.end());
    auto hull = weak_hull(g, F);
    std::vector<Vertex> Y;
    for (int i = 0; i < 3; ++i) Y.push_back(hull[rng.below(hull.size())]);
    StableTreeParams p;
    p.delta = 0;
    p.eps = 2;
    p.epsp = 4;
    p.E = 32;
    auto t = build_stable_tree(g, F, Y, p);
    auto rep = measure_stable_tree(g, t);
    INFO("trial " << trial << " branching " << rep.total_branching << " bound "
                  << rep.branching_bound);
    CHECK(rep.branching_ok);
    CHECK(rep.leaves_in_f_union_y);
    int e0 = int(std::count(t.sep.is_e0.begin(), t.sep.is_e0.end(), true));
    CHECK(int(t.clusters.clusters.size()) - e0 <= 2 * k - 2);
    CHECK(t.sep.connected);
  }
}

TEST_CASE("tree correspondence") {
  auto g = path_graph(100);
  std::vector<Vertex> F{0, 100};
  std::vector<Vertex> Y{30, 34, 70};
  auto T = build_stable_tree(g, F, Y, line_params());

  SECTION("identity perturbation: everything identical, no exceptions") {
    auto Tp = build_stable_tree(g, F, Y, line_params());
    auto corr = compare_stable_trees(g, T, Tp, 3);
    CHECK(corr.exceptions == 0);
    CHECK(corr.unmatched_dropped == 0);
    for (size_t i = 0; i < corr.matched.size(); ++i) CHECK(corr.identical[i]);
  }
  SECTION("moving one Y point by 1") {
    auto Tp = build_stable_tree(g, F, {30, 34, 71}, line_params());
    auto corr = compare_stable_trees(g, T, Tp, 3);
    CHECK(corr.exceptions <= 1);
    CHECK(corr.max_hausdorff <= corr.carve_scale);
    CHECK(corr.unmatched_dropped == 0);
    int ident = 0;
    for (bool b : corr.identical) ident += b;
    CHECK(ident >= int(corr.matched.size()) - 1);
  }
  SECTION("deleting one Y point") {
    auto Tp = build_stable_tree(g, F, {30, 34}, line_params());
    auto corr = compare_stable_trees(g, T, Tp, 3);
    CHECK(corr.exceptions <= 2);
    CHECK(corr.complement_pieces[0] <= 8);
    CHECK(corr.complement_pieces[1] <= 8);
  }
  SECTION("precondition violations reported with measurements") {
    auto Tp = build_stable_tree(g, F, {10, 20, 30, 40, 50}, line_params());
    CHECK_THROWS_AS(compare_stable_trees(g, T, Tp, 1), input_error);
    auto Tf = build_stable_tree(g, {0, 90}, Y, line_params());
    CHECK_THROWS_AS(compare_stable_trees(g, T, Tf, 3), input_error);
  }
}

TEST_CASE("correspondence through a graph automorphism") {
  auto g = path_graph(100);
  std::vector<Vertex> refl(101);
  for (int i = 0; i <= 100; ++i) refl[i] = 100 - i;
  auto T = build_stable_tree(g, {0, 100}, {30, 34, 70}, line_params());
  auto Tp = build_stable_tree(g, {0, 100}, {70, 66, 30}, line_params());
  auto corr = compare_stable_trees(g, T, Tp, 3, &refl);
  CHECK(corr.exceptions == 0);
  for (size_t i = 0; i < corr.matched.size(); ++i) CHECK(corr.identical[i]);
}

TEST_CASE("interior points of external components stay far from Y and F") {
  // qualitative form of the non-overlap bound: distance to Y u F grows with
  // the distance to the component boundary
  auto g = path_graph(200);
  auto t = build_stable_tree(g, {0, 200}, {60, 140}, line_params());
  std::vector<Vertex> yf{0, 200, 60, 140};
  auto dyf = g.distances_from_set(yf);
  for (size_t c = 0; c < t.external.size(); ++c) {
    const auto& ext = t.external[c];
    std::set<int> inside(ext.node_ids.begin(), ext.node_ids.end());
    std::vector<int> boundary;  // nodes of the component touching anything else
    for (auto& e : t.edges) {
      bool mine = e.kind == ForestKind::External && e.comp == int(c);
      if (mine) continue;
      if (inside.count(e.a)) boundary.push_back(e.a);
      if (inside.count(e.b)) boundary.push_back(e.b);
    }
    for (int n : ext.node_ids)
      if (t.valence(n) == 1) boundary.push_back(n);
    if (boundary.empty()) continue;
    auto dbound = t.node_distances_from(boundary);
    for (int n : ext.node_ids) {
      CHECK(dyf[t.nodes[n].xi] >= dbound[n] - t.params.E);
    }
  }
}
