#include <limits>

#include "doctest.h"
#include "forge/errors.hpp"
#include "forge/wall.hpp"

using namespace forge;

namespace {

Wall plain_wall(int h) {
  auto lay = wall_layout(h);
  return Wall::from_subdivision_map(identity_immersion(share(lay->graph())), h);
}

// every elementary edge subdivided once; vertex k of the layout stays k
Wall subdivided_wall(int h) {
  auto lay = wall_layout(h);
  const int n = lay->vertex_count();
  std::vector<std::pair<VertexId, VertexId>> es;
  for (std::size_t e = 0; e < lay->edges().size(); ++e) {
    auto [a, b] = lay->edges()[e];
    VertexId x = n + static_cast<VertexId>(e);
    es.emplace_back(a, x);
    es.emplace_back(x, b);
  }
  auto host = share(MultiGraph::build(n + static_cast<int>(lay->edges().size()), es));
  std::vector<VertexId> imgs(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) imgs[k] = k;
  std::vector<Walk> bs;
  for (std::size_t e = 0; e < lay->edges().size(); ++e) {
    auto [a, b] = lay->edges()[e];
    VertexId x = n + static_cast<VertexId>(e);
    bs.push_back(Walk{{a, x, b}, {static_cast<EdgeId>(2 * e), static_cast<EdgeId>(2 * e + 1)}});
  }
  return Wall::from_branches(host, h, imgs, bs);
}

// distance oracle: two plus the hop distance between faces in the graph
// where faces touching at a vertex or an edge are adjacent
int touch_oracle(const Wall& w, VertexId s, VertexId t) {
  if (s == t) return 0;
  const int nf = static_cast<int>(w.faces().size());
  const int inf = std::numeric_limits<int>::max() / 4;
  std::vector<std::vector<int>> d(nf, std::vector<int>(nf, inf));
  for (int a = 0; a < nf; ++a)
    for (int b = 0; b < nf; ++b) {
      if (a == b) {
        d[a][b] = 0;
        continue;
      }
      for (VertexId x : w.faces()[a].boundary.vertices)
        if (w.faces()[b].boundary.contains_vertex(x)) d[a][b] = 1;
    }
  for (int k = 0; k < nf; ++k)
    for (int a = 0; a < nf; ++a)
      for (int b = 0; b < nf; ++b) d[a][b] = std::min(d[a][b], d[a][k] + d[k][b]);
  int best = inf;
  for (int f : w.faces_at(s))
    for (int g : w.faces_at(t)) best = std::min(best, d[f][g]);
  return 2 + best;
}

}  // namespace

TEST_CASE("layout counts and Euler formula") {
  for (int h : {2, 4, 6}) {
    auto lay = wall_layout(h);
    int v = lay->vertex_count();
    int e = static_cast<int>(lay->edges().size());
    int f = static_cast<int>(lay->faces().size());
    CHECK(v == (h + 1) * (2 * h + 2) - 2);
    CHECK(v - e + f == 2);
    CHECK(f == h * h + 1);
    for (int k = 0; k < f; ++k)
      if (k != lay->outer_face()) CHECK(lay->faces()[k].size() == 6);
  }
  auto lay = wall_layout(2);
  CHECK(lay->vertex_count() == 16);
  CHECK(lay->edges().size() == 19);
}

TEST_CASE("odd or small heights are rejected") {
  CHECK_THROWS_AS(WallLayout(3), ParameterError);
  CHECK_THROWS_AS(WallLayout(0), ParameterError);
  CHECK_THROWS_AS((void)wall_layout(2)->index({1, 6}), ParameterError);
}

TEST_CASE("diagonal vertices") {
  Wall w = plain_wall(4);
  auto d = diagonal_vertices(w);
  REQUIRE(d.size() == 3);
  for (int i = 2; i <= 4; ++i) CHECK(w.label_of(d[i - 2]) == WallLabel{i, 2 * i});
}

TEST_CASE("subwall") {
  Wall w = plain_wall(4);
  Wall s = subwall(w, 1, 1, 2);
  CHECK(s.vertices().size() == 16);
  CHECK(s.height() == 2);
  CHECK(subwall(w, 1, 1, 4).vertices() == w.vertices());
  Wall mid = subwall(w, 3, 5, 2);
  CHECK(mid.at({1, 1}) == w.at({3, 5}));
  CHECK_THROWS_AS(subwall(w, 2, 1, 2), ParameterError);
  CHECK_THROWS_AS(subwall(w, 1, 2, 2), ParameterError);
  CHECK_THROWS_AS(subwall(w, 3, 7, 2), ParameterError);
}

TEST_CASE("perimeter is the outer cycle") {
  for (int h : {2, 4}) {
    Wall w = plain_wall(h);
    Walk p = perimeter(w);
    CHECK(p.is_cycle());
    int e = static_cast<int>(w.layout().edges().size());
    CHECK(p.length() == 2 * e - 6 * h * h);
  }
}

TEST_CASE("wall distance matches the face-touch oracle and is symmetric") {
  for (Wall w : {plain_wall(2), plain_wall(4), subdivided_wall(2)}) {
    std::vector<VertexId> vs(w.vertices().begin(), w.vertices().end());
    for (VertexId s : vs) {
      auto from = wall_distances_from(w, s);
      for (VertexId t : vs) {
        CHECK(from.at(t) == touch_oracle(w, s, t));
        CHECK(wall_distance(w, s, t) == wall_distance(w, t, s));
      }
    }
  }
}

TEST_CASE("distance zero exactly on the diagonal of the matrix") {
  Wall w = plain_wall(2);
  VertexId a = w.at({1, 1});
  CHECK(wall_distance(w, a, a) == 0);
  CHECK(wall_distance(w, a, w.at({1, 2})) == 2);
  CHECK(wall_distance_to_set(w, a, {w.at({1, 2}), w.at({3, 6})}) == 2);
}

TEST_CASE("surround collects degree-two vertices next to a diagonal vertex") {
  Wall plain = plain_wall(4);
  VertexId d = plain.at({2, 4});
  CHECK(surround(plain, d) == std::set<VertexId>{d});
  CHECK_THROWS_AS(surround(plain, plain.at({1, 1})), ParameterError);

  Wall sub = subdivided_wall(4);
  VertexId s = sub.at({2, 4});
  auto around = surround(sub, s);
  CHECK(around.size() == 4);
  for (VertexId x : around)
    if (x != s) CHECK(sub.degree(x) == 2);
}

TEST_CASE("neighbours in clockwise order") {
  Wall w = plain_wall(2);
  // (2,2): up (1,2)? 1+2 odd, no; right, down (3,2), left
  auto ns = w.neighbours_clockwise(w.at({2, 2}));
  CHECK(ns == std::vector<VertexId>{w.at({2, 3}), w.at({3, 2}), w.at({2, 1})});
}

TEST_CASE("invalid wall data is rejected") {
  auto lay = wall_layout(2);
  auto host = share(lay->graph());
  std::vector<VertexId> imgs(16);
  for (int k = 0; k < 16; ++k) imgs[k] = k;
  std::vector<Walk> bs;
  for (std::size_t e = 0; e < lay->edges().size(); ++e)
    bs.push_back(Walk{{lay->edges()[e].first, lay->edges()[e].second}, {static_cast<EdgeId>(e)}});
  CHECK_NOTHROW(Wall::from_branches(host, 2, imgs, bs));
  auto dup = imgs;
  dup[1] = 0;
  CHECK_THROWS_AS(Wall::from_branches(host, 2, dup, bs), InputError);
  auto swapped = bs;
  std::swap(swapped[0], swapped[1]);
  CHECK_THROWS_AS(Wall::from_branches(host, 2, imgs, swapped), InputError);
}

TEST_CASE("fin system validation") {
  Wall sub = subdivided_wall(4);
  auto [host, e] = sub.host()->add_edge(sub.at({2, 4}), sub.at({5, 10}));
  auto g = share(host);
  Wall w = Wall::from_branches(g, 4, sub.label_images(), sub.branches());
  auto ws = std::make_shared<const Wall>(w);
  VertexId s = w.at({2, 4}), t = w.at({5, 10});
  FinSystem ok{ws, {Fin{s, Walk{{s, t}, {e}}, t}}};
  CHECK(validate_fin_system(ok).empty());

  int be = w.layout().edge_between(w.layout().index({2, 4}), w.layout().index({2, 5}));
  const Walk& branch = w.branches()[static_cast<std::size_t>(be)];
  Walk along = branch.front() == s ? branch : branch.reversed();
  FinSystem wall_edge{ws, {Fin{s, along, along.back()}}};
  CHECK_FALSE(validate_fin_system(wall_edge).empty());

  auto around = surround(w, s);
  around.erase(s);
  VertexId x = *around.begin();
  auto [host3, e3] = g->add_edge(s, x);
  auto g3 = share(host3);
  auto w3 = std::make_shared<const Wall>(Wall::from_branches(g3, 4, sub.label_images(), sub.branches()));
  FinSystem near{w3, {Fin{s, Walk{{s, x}, {e3}}, x}}};
  auto vs = validate_fin_system(near);
  REQUIRE(vs.size() == 1);
  CHECK(vs[0].message.find("surround") != std::string::npos);

  FinSystem bad_root{ws, {Fin{w.at({1, 1}), Walk{{s, t}, {e}}, t}}};
  CHECK(validate_fin_system(bad_root).at(0).condition == 2);
}

TEST_CASE("find_wall") {
  SUBCASE("in the wall itself") {
    Wall w = plain_wall(2);
    auto r = find_wall(w.host(), 2);
    REQUIRE(r.status == SearchStatus::kFound);
    CHECK(r.wall->vertices().size() == 16);
  }
  SUBCASE("in a subdivision of a larger wall") {
    Wall w = subdivided_wall(4);
    auto r = find_wall(w.host(), 4);
    REQUIRE(r.status == SearchStatus::kFound);
    CHECK(r.wall->height() == 4);
  }
  SUBCASE("not in a small graph") {
    auto k4 = share(MultiGraph::build(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}));
    CHECK(find_wall(k4, 2).status == SearchStatus::kNotFound);
  }
  SUBCASE("budget") {
    Wall w = plain_wall(4);
    CHECK(find_wall(w.host(), 4, 5).status == SearchStatus::kBudgetExhausted);
  }
}

TEST_CASE("distances are invariant under the half-turn symmetry of the labelling") {
  const int h = 4;
  Wall w = plain_wall(h);
  auto turn = [&](WallLabel l) { return WallLabel{h + 2 - l.i, 2 * h + 3 - l.j}; };
  for (WallLabel a : w.layout().labels()) {
    auto from = wall_distances_from(w, w.at(a));
    auto from_turned = wall_distances_from(w, w.at(turn(a)));
    for (WallLabel b : w.layout().labels()) CHECK(from.at(w.at(b)) == from_turned.at(w.at(turn(b))));
  }
}

TEST_CASE("subwalls compose additively") {
  Wall w = plain_wall(6);
  Wall inner = subwall(subwall(w, 3, 3, 4), 1, 3, 2);
  Wall direct = subwall(w, 3, 5, 2);
  CHECK(inner.label_images() == direct.label_images());
}

TEST_CASE("find_wall on a tree") {
  std::vector<std::pair<VertexId, VertexId>> es;
  for (int v = 1; v < 30; ++v) es.emplace_back((v - 1) / 2, v);
  CHECK(find_wall(share(MultiGraph::build(30, es)), 2).status == SearchStatus::kNotFound);
}
