#include <unistd.h>

#include <filesystem>
#include <functional>
#include <random>
#include <regex>
#include <sstream>

#include "doctest.h"
#include "forge/cli.hpp"
#include "forge/connectivity.hpp"
#include "forge/errors.hpp"
#include "forge/formats.hpp"
#include "forge/generators.hpp"
#include "forge/treedecomp.hpp"
#include "support/crossed_wall.hpp"
#include "support/oracles.hpp"

using namespace forge;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path dir;
  TempDir() {
    static int count = 0;
    dir = fs::temp_directory_path() / ("forge_cli_" + std::to_string(::getpid()) + "_" + std::to_string(count++));
    fs::create_directories(dir);
  }
  ~TempDir() { fs::remove_all(dir); }
  std::string put(const std::string& name, const std::string& text) const {
    auto p = (dir / name).string();
    write_text_file(p, text);
    return p;
  }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

struct Result {
  int code;
  std::string out, err;
};

Result forge_run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

int count_matches(const std::string& text, const std::string& re) {
  std::regex r(re);
  return static_cast<int>(std::distance(std::sregex_iterator(text.begin(), text.end(), r), std::sregex_iterator()));
}

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("graph format") {
  SUBCASE("two-line file") {
    auto g = parse_graph("2 1\n0 1\n");
    CHECK(g == MultiGraph::build(2, {{0, 1}}));
  }
  SUBCASE("comments and header are skipped") {
    auto g = parse_graph("# made by hand\n\n# second comment\nformat: 1\n# more\n3 2\n0 1\n2 2\n");
    CHECK(g == MultiGraph::build(3, {{0, 1}, {2, 2}}));
  }
  SUBCASE("errors name the line") {
    auto msg = error_of([] { parse_graph("# c\n3 1\n0 3\n"); });
    CHECK(msg.find("line 3") != std::string::npos);
    CHECK(msg.find("endpoint 3") != std::string::npos);
    CHECK(error_of([] { parse_graph("2 2\n0 1\n"); }).find("line 2") != std::string::npos);
    CHECK(error_of([] { parse_graph("2 1\n0 x\n"); }).find("line 2") != std::string::npos);
    CHECK(error_of([] { parse_graph("2 1\n0 1 1\n"); }).find("line 2") != std::string::npos);
    CHECK(error_of([] { parse_graph("format: 2\n2 1\n0 1\n"); }).find("line 1") != std::string::npos);
    CHECK(!error_of([] { parse_graph(""); }).empty());
  }
  SUBCASE("canonical round trip") {
    std::mt19937 rng(5);
    for (int t = 0; t < 50; ++t) {
      int n = 1 + static_cast<int>(rng() % 8);
      int m = static_cast<int>(rng() % 12);
      std::ostringstream os;
      os << "format: 1\n" << n << " " << m << "\n";
      for (int k = 0; k < m; ++k) os << rng() % n << " " << rng() % n << "\n";
      auto g = parse_graph(os.str());
      CHECK(serialize_graph(g) == os.str());
      CHECK(parse_graph(serialize_graph(g)) == g);
    }
  }
  SUBCASE("holes are renumbered") {
    auto g = MultiGraph::build(3, {{0, 1}, {1, 2}, {0, 2}}).delete_edges({1});
    CHECK(serialize_graph(g) == "format: 1\n3 2\n0 1\n0 2\n");
  }
}

TEST_CASE("map format") {
  auto [host, w] = elementary_wall(2);
  auto m = w.subdivision_map();
  auto text = serialize_map(m);
  auto back = parse_map(text, m.pattern, m.host);
  CHECK(back.vertex_map == m.vertex_map);
  CHECK(back.edge_map == m.edge_map);
  CHECK(serialize_map(back) == text);
  CHECK(serialize_walk(parse_walk("3 7 4 8 5")) == "3 7 4 8 5");
  CHECK(error_of([&] { parse_map("v 0 -> 1\nv 0 -> 2\n", m.pattern, m.host); }).find("line 2") != std::string::npos);
  CHECK(error_of([&] { parse_map("e 0 -> 1 2\n", m.pattern, m.host); }).find("line 1") != std::string::npos);
  CHECK(error_of([&] { parse_map("v 99 -> 1\n", m.pattern, m.host); }).find("no vertex 99") != std::string::npos);
  // a partial map is rejected by the verifier, not the parser
  auto partial = parse_map("v 0 -> 0\n", m.pattern, m.host);
  CHECK_THROWS_AS(verify(partial), InputError);
}

TEST_CASE("labeling and wall side-cars") {
  SUBCASE("grid labeling") {
    auto [g, lab] = grid(3);
    auto parsed = parse_labeling(serialize_grid_labeling(lab));
    REQUIRE(parsed.size() == 9);
    for (int i = 1; i <= 3; ++i)
      for (int j = 1; j <= 3; ++j) CHECK(parsed.at({i, j}) == lab.at(i, j));
  }
  SUBCASE("subdivided wall round trip") {
    auto [base, w] = elementary_wall(4);
    auto [sub, rec] = subdivide_all(base, 2);
    auto host = share(sub);
    Wall wall = Wall::from_subdivision_map(rec.as_immersion(share(base), host), 4);
    auto text = serialize_wall(wall);
    Wall back = parse_wall(text, host);
    CHECK(back.label_images() == wall.label_images());
    CHECK(back.branches() == wall.branches());
    CHECK(serialize_wall(back) == text);
  }
  SUBCASE("reversed branch lines and missing lines") {
    auto [base, w] = elementary_wall(2);
    auto host = w.host();
    auto text = serialize_wall(w);
    // the first branch written backwards
    std::string first = "branch (1,1)-(1,2): 0 0 1";
    REQUIRE(text.find(first) != std::string::npos);
    std::string flipped = text;
    flipped.replace(flipped.find(first), first.size(), "branch (1,2)-(1,1): 1 0 0");
    CHECK(parse_wall(flipped, host).branches() == w.branches());
    std::string missing = text;
    missing.erase(missing.find(first), first.size() + 1);
    CHECK(error_of([&] { parse_wall(missing, host); }).find("no branch line for (1,1)-(1,2)") != std::string::npos);
    CHECK(error_of([&] { parse_wall(text + "label: 1 1 -> 3\n", host); }).find("repeated") != std::string::npos);
    CHECK(!error_of([&] { parse_wall(text + "branch (1,1)-(3,3): 0\n", host); }).empty());
  }
}

TEST_CASE("decomposition format") {
  auto tw = exact_treewidth(oracle::cycle_graph(6));
  auto text = serialize_decomposition(tw.decomposition);
  auto back = parse_decomposition(text);
  CHECK(back.tree == tw.decomposition.tree);
  CHECK(back.bags == tw.decomposition.bags);
  CHECK(serialize_decomposition(back) == text);
  CHECK(verify_decomposition(oracle::cycle_graph(6), back).ok());
  CHECK(parse_decomposition("t 2\nT 0 1\nB 0: 0 1\nB 1:\n").bags.at(1).empty());
  CHECK(error_of([] { parse_decomposition("t 2\nT 0 2\n"); }).find("line 2") != std::string::npos);
  CHECK(error_of([] { parse_decomposition("t 2\nB 0: 1\nT 0 1\n"); }).find("line 3") != std::string::npos);
}

TEST_CASE("lift records and fin side-cars") {
  LiftRecord r{7, 3, 4, 12, 1, 9};
  CHECK(parse_lift_record(to_string(r)) == r);
  std::vector<LiftRecord> hist{r, {2, 0, 1, 13, 5, 5}};
  CHECK(parse_lift_history(serialize_lift_history(hist)) == hist);
  CHECK(error_of([] { parse_lift_history("lift 1: -2 -3 +4(5,6)\nlift x\n"); }).find("line 2") != std::string::npos);

  std::vector<FinSpec> sp;
  for (int row = 2; row <= 6; ++row) sp.push_back({row, FinAttachment::kFar, {}, 2});
  auto [g, fins] = wall_with_fins(6, sp);
  auto text = serialize_fins(fins);
  auto back = parse_fins(text, fins.wall);
  REQUIRE(back.fins.size() == fins.fins.size());
  for (std::size_t i = 0; i < fins.fins.size(); ++i) {
    CHECK(back.fins[i].s == fins.fins[i].s);
    CHECK(back.fins[i].t == fins.fins[i].t);
    CHECK(back.fins[i].path == fins.fins[i].path);
  }
  CHECK(serialize_fins(back) == text);
  CHECK(validate_fin_system(back).empty());
}

TEST_CASE("dot export") {
  auto k2 = MultiGraph::build(2, {{0, 1}});
  auto dot = export_dot(k2);
  CHECK(count_matches(dot, R"(\n  \d+( \[[^\]]*\])?;)") == 2);
  CHECK(count_matches(dot, " -- ") == 1);
  CHECK(count_matches(export_dot(quad_star(1)), " -- ") == 4);
  auto [g, w] = elementary_wall(2);
  auto wd = export_dot(g, &w);
  CHECK(count_matches(wd, R"re(\n  \d+ \[label="\d+ \(\d+,\d+\)"\];)re") == 16);
  CHECK(count_matches(wd, "color=blue") == g.edge_count());
  // overlay ids must exist in the exported graph
  auto small = MultiGraph::build(3, {{0, 1}});
  CHECK(error_of([&] { export_dot(small, &w); }).find("wall overlay") != std::string::npos);
  auto m = w.subdivision_map();
  auto md = export_dot(g, nullptr, &m);
  CHECK(count_matches(md, "shape=box") == 16);
  CHECK(error_of([&] { export_dot(small, nullptr, &m); }).find("map overlay") != std::string::npos);
}

TEST_CASE("command line") {
  TempDir tmp;
  SUBCASE("verify") {
    auto host = tmp.put("host", "2 2\n0 1\n0 1\n");
    auto pat = tmp.put("pat", "2 2\n0 1\n0 1\n");
    auto good = tmp.put("good", "v 0 -> 0\nv 1 -> 1\ne 0 -> 0 0 1\ne 1 -> 0 1 1\n");
    auto shared = tmp.put("shared", "v 0 -> 0\nv 1 -> 1\ne 0 -> 0 0 1\ne 1 -> 0 0 1\n");
    auto r = forge_run({"verify", "--host", host, "--pattern", pat, "--map", good});
    CHECK(r.code == 0);
    r = forge_run({"verify", "--host", host, "--pattern", pat, "--map", shared});
    CHECK(r.code == 2);
    CHECK(r.out.find("violation condition 5") != std::string::npos);
    CHECK(count_matches(r.out, "violation condition [1-4]") == 0);
    auto roots = tmp.put("roots", "0\n");
    CHECK(forge_run({"verify", "--host", host, "--pattern", pat, "--map", good, "--roots", roots}).code == 2);
    CHECK(forge_run({"verify", "--host", host, "--pattern", pat, "--map", tmp.path("absent")}).code == 3);
    auto bad = tmp.put("bad", "2 1\n0 2\n");
    r = forge_run({"verify", "--host", bad, "--pattern", pat, "--map", good});
    CHECK(r.code == 3);
    CHECK(r.err.find("line 2") != std::string::npos);
  }
  SUBCASE("argument errors") {
    CHECK(forge_run({}).code == 3);
    CHECK(forge_run({"frobnicate"}).code == 3);
    CHECK(forge_run({"gen", "grid", "--g", "3", "--colour", "red"}).code == 3);
    CHECK(forge_run({"gen", "grid"}).code == 3);
    CHECK(forge_run({"gen", "wall", "--h", "3"}).code == 3);
    CHECK(forge_run({"gen", "grid", "--g", "x"}).code == 3);
    CHECK(forge_run({"--help"}).code == 0);
  }
  SUBCASE("generators and wall verbs") {
    auto r = forge_run({"gen", "grid", "--g", "3", "--out", tmp.path("j3"), "--labels", tmp.path("j3.lab")});
    REQUIRE(r.code == 0);
    CHECK(parse_graph(read_text_file(tmp.path("j3"))) == grid(3).first);
    CHECK(parse_labeling(read_text_file(tmp.path("j3.lab"))).size() == 9);
    r = forge_run({"gen", "quadstar", "--leaves", "3"});
    CHECK(parse_graph(r.out) == quad_star(3));
    r = forge_run({"gen", "wall", "--h", "2", "--subdivide", "1", "--out", tmp.path("w"), "--labels", tmp.path("w.label")});
    REQUIRE(r.code == 0);
    auto host = share(parse_graph(read_text_file(tmp.path("w"))));
    Wall w = parse_wall(read_text_file(tmp.path("w.label")), host);
    CHECK(w.height() == 2);
    r = forge_run({"wall", "dist", "--graph", tmp.path("w"), "--wall", tmp.path("w.label"), "--s", "2,4", "--t", "2,4"});
    CHECK(r.code == 0);
    CHECK(r.out == "0\n");
    r = forge_run({"wall", "dist", "--graph", tmp.path("w"), "--wall", tmp.path("w.label"), "--s", "2,4", "--t", "9,9"});
    CHECK(r.code == 3);
    r = forge_run({"wall", "find", "--graph", tmp.path("w"), "--h", "2", "--out", tmp.path("found")});
    CHECK(r.code == 0);
    CHECK(parse_wall(read_text_file(tmp.path("found")), host).height() == 2);
    r = forge_run({"wall", "find", "--graph", tmp.path("w"), "--h", "4"});
    CHECK(r.code == 2);
    r = forge_run({"dot", "--graph", tmp.path("w"), "--wall", tmp.path("w.label")});
    CHECK(r.code == 0);
    CHECK(count_matches(r.out, "label=\"\\d+ \\(") == 16);
  }
  SUBCASE("search verbs") {
    auto host = tmp.put("q", serialize_graph(quad_star(4)));
    auto pat = tmp.put("j2", serialize_graph(grid(2).first));
    auto roots = tmp.put("roots", "1, 2, 3, 4\n");
    auto r = forge_run({"find", "--host", host, "--pattern", pat, "--roots", roots, "--out", tmp.path("m")});
    REQUIRE(r.code == 0);
    CHECK(forge_run({"verify", "--host", host, "--pattern", pat, "--map", tmp.path("m"), "--roots", roots}).code == 0);
    CHECK(forge_run({"find", "--host", host, "--pattern", pat, "--budget", "2"}).code == 4);
    auto ten = tmp.put("ten", serialize_graph(MultiGraph::build(2, std::vector<std::pair<int, int>>(10, {0, 1}))));
    CHECK(forge_run({"find", "--host", ten, "--pattern", pat}).code == 2);
    r = forge_run({"dot", "--graph", host, "--pattern", pat, "--map", tmp.path("m")});
    CHECK(count_matches(r.out, "shape=box") == 4);
    CHECK(forge_run({"dot", "--graph", host, "--map", tmp.path("m")}).code == 3);
  }
  SUBCASE("treewidth, connectivity and paths") {
    auto c = tmp.put("c7", serialize_graph(oracle::cycle_graph(7)));
    auto r = forge_run({"tw", "--graph", c, "--exact"});
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("# width: 2\n", 0) == 0);
    auto d = parse_decomposition(r.out);
    CHECK(verify_decomposition(oracle::cycle_graph(7), d).ok());
    r = forge_run({"tw", "--graph", c, "--out", tmp.path("d")});
    CHECK(r.out == "# width: 2\n");
    CHECK(verify_decomposition(oracle::cycle_graph(7), parse_decomposition(read_text_file(tmp.path("d")))).ok());
    CHECK(forge_run({"tw", "--graph", c, "--exact", "--limit", "5"}).code == 3);

    auto q = tmp.put("q", serialize_graph(quad_star(3)));
    r = forge_run({"conn", "--graph", q, "--set", "1,2,3", "--k", "4"});
    CHECK(r.code == 0);
    r = forge_run({"conn", "--graph", q, "--set", "1,2", "--k", "5"});
    CHECK(r.code == 2);
    CHECK(r.out.find("1 2") != std::string::npos);
    CHECK(forge_run({"conn", "--graph", q, "--set", "1,9"}).code == 3);

    r = forge_run({"paths", "--graph", q, "--from", "1", "--targets", "2,3", "--k", "4"});
    REQUIRE(r.code == 0);
    EdgeDisjointBundle b{1, {}};
    std::istringstream is(r.out);
    std::string line;
    while (std::getline(is, line))
      if (line.rfind("path: ", 0) == 0) b.paths.push_back(parse_walk(line.substr(6)));
    CHECK(b.paths.size() == 4);
    CHECK(check_bundle(quad_star(3), b).empty());
    r = forge_run({"paths", "--graph", q, "--from", "1", "--targets", "2", "--k", "5"});
    CHECK(r.code == 2);
    CHECK(r.out.find("cut:") != std::string::npos);
    // 0 is the centre: three ends prescribed among the leaves
    auto k5 = tmp.put("k5", serialize_graph(oracle::complete_graph(5)));
    r = forge_run({"paths", "--graph", k5, "--from", "0", "--targets", "1,2,3,4", "--k", "4", "--prescribe", "1,2,3"});
    REQUIRE(r.code == 0);
    CHECK(count_matches(r.out, "path: ") == 4);
    CHECK(forge_run({"paths", "--graph", k5, "--from", "0", "--targets", "1", "--prescribe", "1,2"}).code == 3);
  }
  SUBCASE("lift and reduce") {
    auto q = tmp.put("q", serialize_graph(quad_star(2)));
    auto r = forge_run({"lift", "--graph", q, "--at", "0", "--edges", "0,4"});
    REQUIRE(r.code == 0);
    auto first_line = r.out.substr(r.out.find("lift"), r.out.find('\n', r.out.find("lift")) - r.out.find("lift"));
    auto rec = parse_lift_record(first_line);
    CHECK(rec.v == 0);
    CHECK(rec.u1 == 1);
    CHECK(rec.u2 == 2);
    CHECK(forge_run({"lift", "--graph", q, "--at", "0", "--edges", "0"}).code == 3);
    CHECK(forge_run({"lift", "--graph", q, "--at", "1", "--edges", "0,4"}).code == 3);

    fixture::CrossedWall cw(2, {{WallLabel{2, 4}, WallLabel{2, 5}, WallLabel{3, 4}}});
    cw.fin({2, 4}, cw.lay->index({3, 2}));
    auto m0 = cw.map();
    auto g = tmp.put("g", serialize_graph(*m0.host));
    auto map = tmp.put("m", serialize_map(m0));
    auto s0 = tmp.put("s0", std::to_string(cw.lay->index({2, 4})) + "\n");
    auto fins = tmp.put("fins", "fin (2,4): " + serialize_walk(cw.fins.begin()->second) + "\n");
    r = forge_run({"reduce", "--graph", g, "--map", map, "--s0", s0, "--fins", fins, "--out-wall", tmp.path("w2"),
                   "--out-fins", tmp.path("f2"), "--out-graph", tmp.path("g2")});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    auto hist = parse_lift_history(r.out);
    REQUIRE(hist.size() == 1);
    CHECK(hist[0].v == cw.hubs[0]);
    auto g2 = share(parse_graph(read_text_file(tmp.path("g2"))));
    CHECK(g2->edge_count() == m0.host->edge_count() - 1);
    auto w2 = std::make_shared<const Wall>(parse_wall(read_text_file(tmp.path("w2")), g2));
    auto f2 = parse_fins(read_text_file(tmp.path("f2")), w2);
    CHECK(f2.fins.size() == 1);
    CHECK(validate_fin_system(f2).empty());
    auto wrong = tmp.put("wrong", "fin (9,9): 0\n");
    CHECK(forge_run({"reduce", "--graph", g, "--map", map, "--s0", s0, "--fins", wrong}).code == 3);
  }
  SUBCASE("grid-immersion") {
    auto q = tmp.put("q", serialize_graph(quad_star(4)));
    auto roots = tmp.put("roots", "1 2 3 4\n");
    auto r = forge_run({"grid-immersion", "--graph", q, "--g", "2", "--roots", roots, "--out", tmp.path("m")});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("outcome: found") != std::string::npos);
    auto j2 = tmp.put("j2", serialize_graph(grid(2).first));
    CHECK(forge_run({"verify", "--host", q, "--pattern", j2, "--map", tmp.path("m"), "--roots", roots}).code == 0);
    // leaves 1 and 2 of a 3-edge-connected graph: two components joined by three edges
    auto thin = tmp.put("thin", "4 7\n0 1\n0 1\n0 1\n0 1\n0 2\n0 2\n0 2\n");
    auto pair = tmp.put("pair", "1 2\n");
    r = forge_run({"grid-immersion", "--graph", thin, "--g", "2", "--roots", pair});
    CHECK(r.code == 5);
    CHECK(r.out.find("violating-pair: 1 2") != std::string::npos);
    r = forge_run({"grid-immersion", "--graph", q, "--g", "2", "--roots", roots, "--set", "fallback_max_vertices=0",
                   "--report", tmp.path("rep")});
    CHECK(r.code == 4);
    CHECK(read_text_file(tmp.path("rep")).find("outcome: exhausted") != std::string::npos);
    CHECK(forge_run({"grid-immersion", "--graph", q, "--g", "2", "--roots", roots, "--set", "bogus=1"}).code == 3);
    CHECK(forge_run({"grid-immersion", "--graph", q, "--g", "2", "--roots", roots, "--set", "a1"}).code == 3);
    CHECK(forge_run({"grid-immersion", "--graph", q, "--g", "1", "--roots", roots}).code == 3);
  }
}
