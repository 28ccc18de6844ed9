#include <numeric>
#include <random>

#include "doctest.h"
#include "forge/multigraph.hpp"

using namespace forge;

TEST_CASE("build assigns edge ids in list order and supports parallel edges") {
  auto g = MultiGraph::build(2, {{0, 1}, {0, 1}, {0, 1}, {0, 1}});
  CHECK(g.vertex_count() == 2);
  CHECK(g.edge_count() == 4);
  CHECK(g.multiplicity(0, 1) == 4);
  CHECK(g.degree(0) == 4);
  for (EdgeId e = 0; e < 4; ++e) CHECK(g.ends(e) == Endpoints{0, 1});
}

TEST_CASE("a loop counts twice towards the degree") {
  auto g = MultiGraph::build(1, {{0, 0}});
  CHECK(g.degree(0) == 2);
  CHECK(g.is_loop(0));
  CHECK(g.incident(0).size() == 1);
}

TEST_CASE("build rejects out-of-range endpoints naming the entry") {
  try {
    (void)MultiGraph::build(3, {{0, 1}, {1, 3}});
    FAIL("expected InputError");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("entry 1") != std::string::npos);
  }
}

TEST_CASE("degree of an unknown vertex is a query error") {
  auto g = MultiGraph::build(2, {{0, 1}});
  CHECK_THROWS_AS((void)g.degree(2), QueryError);
  CHECK_THROWS_AS((void)g.ends(5), QueryError);
}

TEST_CASE("delete_edges") {
  auto path = MultiGraph::build(3, {{0, 1}, {1, 2}});
  SUBCASE("both edges of a 2-path") {
    auto g = path.delete_edges({0, 1});
    CHECK(g.vertex_count() == 3);
    CHECK(g.edge_count() == 0);
  }
  SUBCASE("empty set is the identity") { CHECK(path.delete_edges({}) == path); }
  SUBCASE("one of four parallel edges") {
    auto four = MultiGraph::build(2, {{0, 1}, {0, 1}, {0, 1}, {0, 1}});
    auto g = four.delete_edges({2});
    CHECK(g.multiplicity(0, 1) == 3);
    CHECK(g.has_edge(3));
    CHECK(g.ends(3) == Endpoints{0, 1});
  }
  SUBCASE("unknown id") { CHECK_THROWS_AS((void)path.delete_edges({7}), QueryError); }
}

TEST_CASE("deleted edge ids are never reused") {
  auto g = MultiGraph::build(2, {{0, 1}, {0, 1}}).delete_edges({1});
  auto [h, id] = g.add_edge(1, 0);
  CHECK(id == 2);
  CHECK_FALSE(h.has_edge(1));
}

TEST_CASE("property: degree sum is twice the edge count and deletion is local") {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    int n = 1 + static_cast<int>(rng() % 7);
    int m = static_cast<int>(rng() % 12);
    std::vector<std::pair<VertexId, VertexId>> es;
    for (int i = 0; i < m; ++i)
      es.emplace_back(static_cast<int>(rng() % n), static_cast<int>(rng() % n));
    auto g = MultiGraph::build(n, es);
    int sum = 0;
    for (VertexId v = 0; v < n; ++v) sum += g.degree(v);
    CHECK(sum == 2 * g.edge_count());

    std::vector<EdgeId> doomed;
    for (EdgeId e : g.edge_ids())
      if (rng() % 3 == 0) doomed.push_back(e);
    auto h = g.delete_edges(doomed);
    for (VertexId v = 0; v < n; ++v) {
      bool touched = false;
      for (EdgeId e : doomed) touched |= g.is_incident(e, v);
      if (!touched) CHECK(h.degree(v) == g.degree(v));
    }
  }
}

TEST_CASE("walk shape predicates") {
  auto c3 = MultiGraph::build(3, {{0, 1}, {1, 2}, {2, 0}});
  Walk cyc{{0, 1, 2, 0}, {0, 1, 2}};
  CHECK(cyc.is_valid_in(c3));
  CHECK(cyc.is_cycle());
  CHECK_FALSE(cyc.is_path());
  Walk p{{0, 1, 2}, {0, 1}};
  CHECK(p.is_path());
  Walk bad{{0, 2}, {0}};
  CHECK_FALSE(bad.is_valid_in(c3));
}

TEST_CASE("shortcut_to_path removes closed sub-walks") {
  Walk w{{0, 1, 2, 1, 3}, {10, 11, 12, 13}};
  Walk p = shortcut_to_path(w);
  CHECK(p.vertices == std::vector<VertexId>{0, 1, 3});
  CHECK(p.edges == std::vector<EdgeId>{10, 13});
  Walk already{{4, 5}, {1}};
  CHECK(shortcut_to_path(already) == already);
}
