#include <catch2/catch_amalgamated.hpp>

#include "stablecubes/oracles.hpp"
#include "stablecubes/rng.hpp"
#include "stablecubes/steiner.hpp"

using namespace stablecubes;

namespace {

MetricGraph path_graph(int len) {
  std::vector<Edge> e;
  for (int i = 0; i < len; ++i) e.push_back({i, i + 1});
  return MetricGraph::from_edges(len + 1, e);
}

MetricGraph random_sparse_graph(Rng& rng, int n, int extra) {
  std::vector<Edge> e;
  for (int v = 1; v < n; ++v) e.push_back(make_edge(int(rng.below(v)), v));
  for (int i = 0; i < extra; ++i) {
    int u = int(rng.below(n)), v = int(rng.below(n));
    if (u != v) e.push_back(make_edge(u, v));
  }
  std::sort(e.begin(), e.end());
  e.erase(std::unique(e.begin(), e.end()), e.end());
  return MetricGraph::from_edges(n, e);
}

}  // namespace

TEST_CASE("steiner on a path spans the whole path") {
  auto g = path_graph(6);
  auto net = steiner_network(g, {{0}, {6}});
  CHECK(net.total_length == 6);
  CHECK(net.vertices.size() == 7);
  CHECK(net.exact);
}

TEST_CASE("steiner on a 3-leg star is the whole star") {
  auto g = MetricGraph::from_edges(4, {{0, 1}, {0, 2}, {0, 3}});
  auto net = steiner_network(g, {{1}, {2}, {3}});
  CHECK(net.total_length == 3);
  CHECK(net.vertices == std::vector<Vertex>{0, 1, 2, 3});
}

TEST_CASE("steiner on a 4-cycle picks the canonical geodesic") {
  std::vector<Edge> e{{0, 1}, {1, 2}, {2, 3}, {0, 3}};
  auto g = MetricGraph::from_edges(4, e);
  auto net = steiner_network(g, {{0}, {2}});
  CHECK(net.total_length == 2);
  CHECK(net.edges == std::vector<Edge>{{0, 1}, {1, 2}});
  // minimality confirmed by enumerating all spanning subgraphs
  CHECK(oracle::brute_min_network_length(g, {{0}, {2}}) == 2);
}

TEST_CASE("singleton terminal set gives a point network") {
  auto g = path_graph(4);
  auto net = steiner_network(g, {{2}});
  CHECK(net.total_length == 0);
  CHECK(net.vertices == std::vector<Vertex>{2});
}

TEST_CASE("single multi-point terminal set gives an empty network") {
  auto g = path_graph(4);
  auto net = steiner_network(g, {{0, 4}});
  CHECK(net.total_length == 0);
}

TEST_CASE("empty terminal list rejected") {
  auto g = path_graph(2);
  CHECK_THROWS_AS(steiner_network(g, {}), input_error);
  CHECK_THROWS_AS(steiner_network(g, {{}}), input_error);
}

TEST_CASE("exact steiner matches brute force on small random instances") {
  Rng rng(20240601);
  for (int trial = 0; trial < 60; ++trial) {
    int n = 4 + int(rng.below(8));  // <= 12 vertices
    auto g = random_sparse_graph(rng, n, int(rng.below(4)));
    if (g.edge_count() > 20) continue;
    int t = 2 + int(rng.below(3));
    std::vector<std::vector<Vertex>> terms;
    for (int i = 0; i < t; ++i) {
      std::vector<Vertex> A{int(rng.below(n))};
      if (rng.coin()) A.push_back(int(rng.below(n)));
      terms.push_back(A);
    }
    auto net = steiner_network(g, terms);
    REQUIRE(net.exact);
    CHECK(net.total_length == oracle::brute_min_network_length(g, terms));
  }
}

TEST_CASE("steiner is deterministic") {
  Rng rng(7);
  auto g = random_sparse_graph(rng, 30, 10);
  std::vector<std::vector<Vertex>> terms{{3, 5}, {17}, {25, 28}, {9}};
  auto a = steiner_network(g, terms);
  auto b = steiner_network(g, terms);
  CHECK(a.edges == b.edges);
  CHECK(a.vertices == b.vertices);
}

TEST_CASE("approximate mode is flagged and still a tree after collapse") {
  Rng rng(99);
  auto g = random_sparse_graph(rng, 40, 12);
  std::vector<std::vector<Vertex>> terms;
  for (int i = 0; i < 6; ++i) terms.push_back({int(rng.below(40))});
  auto net = steiner_network(g, terms, /*exact_limit=*/3);
  CHECK_FALSE(net.exact);
  CHECK(detail::collapse_is_tree(g, net));
}
