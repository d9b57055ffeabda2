#include <catch2/catch_amalgamated.hpp>

#include "stablecubes/hhs.hpp"

using namespace stablecubes;

namespace {

MetricGraph path_graph(int len) {
  std::vector<Edge> e;
  for (int i = 0; i < len; ++i) e.push_back({i, i + 1});
  return MetricGraph::from_edges(len + 1, e);
}

MetricGraph caterpillar_tree(int spine, int legs) {
  std::vector<Edge> e;
  for (int i = 0; i < spine; ++i) e.push_back({i, i + 1});
  int next = spine + 1;
  for (int i = 0; i < legs; ++i) e.push_back({(i * 2) % (spine + 1), next++});
  return MetricGraph::from_edges(next, e);
}

std::string failures(const ValidationReport& rep) {
  std::string s;
  for (auto& c : rep.checks)
    if (c.applicable && !c.pass) s += c.name + ": " + c.witness + "; ";
  return s;
}

}  // namespace

TEST_CASE("trivial instance passes every axiom with kappa0 = 0") {
  auto h = make_trivial_hhs(path_graph(20));
  auto rep = validate_instance(h);
  INFO(failures(rep));
  CHECK(rep.pass);
  CHECK(rep.measured_kappa0 == 0);
}

TEST_CASE("products of two and three trees validate") {
  auto h2 = make_tree_product_hhs({path_graph(6), path_graph(5)});
  auto r2 = validate_instance(h2);
  INFO(failures(r2));
  CHECK(r2.pass);

  auto h3 = make_tree_product_hhs({path_graph(3), caterpillar_tree(4, 2), path_graph(2)});
  auto r3 = validate_instance(h3);
  INFO(failures(r3));
  CHECK(r3.pass);
}

TEST_CASE("segmented path instance validates and orders its segments") {
  auto h = make_segmented_path_hhs(5, 10);
  auto rep = validate_instance(h, {.strict_large_links = true});
  INFO(failures(rep));
  CHECK(rep.pass);

  auto rd = rel_domains(h, 0, 50, 4);
  REQUIRE(rd.size() >= 1);
  CHECK(rd[0] == std::vector<int>{0, 1, 2, 3, 4});  // U_1 < ... < U_5 toward y
  // reversing the pair reverses the chain
  auto rd2 = rel_domains(h, 50, 0, 4);
  CHECK(rd2[0] == std::vector<int>{4, 3, 2, 1, 0});
}

TEST_CASE("corrupting one rho value is detected with a witness") {
  auto h = make_segmented_path_hhs(4, 8);
  REQUIRE(validate_instance(h).pass);
  h.rho_point[0][2] = 5;  // rho(U1 -> U3) should be the near endpoint 0
  auto rep = validate_instance(h);
  CHECK_FALSE(rep.pass);
  auto* c = rep.find("consistency");
  REQUIRE(c != nullptr);
  CHECK_FALSE(c->pass);
  CHECK_FALSE(c->witness.empty());
}

TEST_CASE("rel_domains basics") {
  auto h = make_tree_product_hhs({path_graph(60), path_graph(60)});
  Vertex x = 0;
  Vertex y = 55 + 61 * 55;  // coordinates (55, 55)
  SECTION("x = y gives nothing") {
    auto rd = rel_domains(h, x, x, 10);
    for (auto& cls : rd) CHECK(cls.empty());
  }
  SECTION("far pair gives one domain per factor, one per color") {
    auto rd = rel_domains(h, x, y, 10);
    int total = 0, nonempty = 0;
    for (auto& cls : rd) {
      total += int(cls.size());
      if (!cls.empty()) nonempty++;
    }
    CHECK(total == 2);
    CHECK(nonempty == 2);
  }
}

TEST_CASE("trivial instance: far pair is relevant") {
  auto h = make_trivial_hhs(path_graph(50));
  auto rd = rel_domains(h, 0, 50, 10);
  CHECK(rd[0] == std::vector<int>{0});
}

TEST_CASE("rel_set unions pairs") {
  auto h = make_tree_product_hhs({path_graph(40), path_graph(40)});
  SECTION("single point gives empty set") {
    CHECK(rel_set(h, {5}, 10).domains.empty());
  }
  SECTION("three spread points hit both factors") {
    Vertex a = 0, b = 35, c = 41 * 35;
    auto rs = rel_set(h, {a, b, c}, 10);
    CHECK(rs.domains == std::vector<int>{0, 1});
  }
  SECTION("clustered points give nothing") {
    auto rs = rel_set(h, {0, 1, 41}, 10);
    CHECK(rs.domains.empty());
  }
}

TEST_CASE("hull_theta") {
  SECTION("trivial instance at theta=0 is the geodesic hull") {
    auto g = caterpillar_tree(8, 3);
    auto h = make_trivial_hhs(g);
    auto hull = hull_theta(h, {0, 8}, 0);
    CHECK(hull == weak_hull(g, {0, 8}));
  }
  SECTION("rectangle corners at theta=0 give the full rectangle") {
    auto h = make_tree_product_hhs({path_graph(7), path_graph(4)});
    Vertex a = 0, b = 7 + 8 * 4;
    auto hull = hull_theta(h, {a, b}, 0);
    CHECK(int(hull.size()) == 8 * 5);
  }
  SECTION("huge theta gives everything") {
    auto h = make_trivial_hhs(path_graph(10));
    CHECK(int(hull_theta(h, {3, 4}, 100).size()) == 11);
  }
  SECTION("hull contains F and projections are dense") {
    auto h = make_tree_product_hhs({path_graph(9), path_graph(9)});
    std::vector<Vertex> F{2, 9 + 10 * 7, 10 * 3};
    auto hull = hull_theta(h, F, 1);
    for (Vertex f : F) CHECK(std::binary_search(hull.begin(), hull.end(), f));
    CHECK(hull_projection_density(h, F, 1, hull) <= 1);
  }
}

TEST_CASE("involved domains") {
  auto h = make_tree_product_hhs({path_graph(50), path_graph(50)});
  std::vector<Vertex> F{0, 40 + 51 * 40};
  SECTION("identical sets involve nothing") {
    CHECK(involved_domains(h, F, F, 10).empty());
  }
  SECTION("moving one point along one factor involves that factor") {
    std::vector<Vertex> Fp{0, 41 + 51 * 40};  // +1 in first coordinate
    auto inv = involved_domains(h, F, Fp, 10);
    CHECK(inv == std::vector<int>{0});
  }
  SECTION("precondition violation is an error") {
    std::vector<Vertex> Ffar{0, 45 + 51 * 40};
    CHECK_THROWS_AS(involved_domains(h, F, Ffar, 10), input_error);
  }
  SECTION("symmetric difference of relevant sets is small under perturbation") {
    std::vector<Vertex> Fp{51 /* (0,1) */, 40 + 51 * 40};
    auto a = rel_set(h, F, 10);
    auto b = rel_set(h, Fp, 10);
    std::vector<int> sym;
    std::set_symmetric_difference(a.domains.begin(), a.domains.end(), b.domains.begin(),
                                  b.domains.end(), std::back_inserter(sym));
    CHECK(int(sym.size()) < 8 * 2 * 2);  // the 8|F|^2 bound, per color
  }
}

TEST_CASE("distance formula on products and trivial instances") {
  SECTION("trivial: one term, exact") {
    auto h = make_trivial_hhs(path_graph(30));
    auto s = distance_formula_ratio(h, 5, 0, 27);
    CHECK(s.truncated_sum == 27);
    CHECK(s.distance == 27);
  }
  SECTION("product: l1 sum vs graph distance") {
    auto h = make_tree_product_hhs({path_graph(30), path_graph(30)});
    Vertex x = 0, y = 20 + 31 * 15;
    auto s = distance_formula_ratio(h, 5, x, y);
    CHECK(s.distance == 35);
    CHECK(s.truncated_sum == 35);
  }
  SECTION("x = y") {
    auto h = make_trivial_hhs(path_graph(5));
    auto s = distance_formula_ratio(h, 3, 2, 2);
    CHECK(s.truncated_sum == 0);
    CHECK(s.distance == 0);
  }
}

TEST_CASE("stable interval: relevant sets of adjacent pairs differ by at most 2 per color") {
  auto h = make_segmented_path_hhs(6, 8);
  int K = 4;
  for (Vertex y = 20; y < 44; ++y) {
    auto a = rel_domains(h, 3, y, K);
    auto b = rel_domains(h, 3, y + 1, K);
    for (size_t c = 0; c < a.size(); ++c) {
      std::vector<int> av = a[c], bv = b[c], sym;
      std::sort(av.begin(), av.end());
      std::sort(bv.begin(), bv.end());
      std::set_symmetric_difference(av.begin(), av.end(), bv.begin(), bv.end(),
                                    std::back_inserter(sym));
      CHECK(int(sym.size()) <= 2);
    }
  }
}

TEST_CASE("path reflection automorphism maps projections consistently") {
  auto h = make_trivial_hhs(path_graph(12));
  auto g = path_reflection_automorphism(h);
  for (Vertex x = 0; x <= 12; ++x)
    CHECK(g.factor_map[0][h.pi[0][x]] == h.pi[0][apply_auto_x(g, x)]);
}
