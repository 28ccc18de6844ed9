#include "forge/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <array>
#include <deque>
#include <functional>
#include <optional>
#include <set>
#include <sstream>

#include "forge/connectivity.hpp"
#include "forge/errors.hpp"
#include "forge/formats.hpp"
#include "forge/generators.hpp"
#include "forge/immersion.hpp"
#include "forge/lifting.hpp"
#include "forge/pipeline.hpp"
#include "forge/treedecomp.hpp"
#include "forge/wall.hpp"

namespace forge::cli {

namespace {

GraphPtr load_graph(const std::string& path) {
  try {
    return share(parse_graph(read_text_file(path)));
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

template <class F>
auto with_path(const std::string& path, F&& f) {
  try {
    return f(read_text_file(path));
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

// drops holes left by deleted edges; old edge id -> new edge id
std::pair<GraphPtr, std::map<EdgeId, EdgeId>> compact(const MultiGraph& g) {
  std::vector<std::pair<VertexId, VertexId>> es;
  std::map<EdgeId, EdgeId> ren;
  for (EdgeId e : g.edge_ids()) {
    auto [u, v] = g.ends(e);
    ren[e] = static_cast<EdgeId>(es.size());
    es.emplace_back(u, v);
  }
  return {share(MultiGraph::build(g.vertex_count(), es)), ren};
}

Walk renumber(Walk w, const std::map<EdgeId, EdgeId>& ren) {
  for (EdgeId& e : w.edges) e = ren.at(e);
  return w;
}

// Minimum-degree elimination order.
std::vector<VertexId> min_degree_order(const MultiGraph& g) {
  const int n = g.vertex_count();
  std::vector<std::set<VertexId>> adj(static_cast<std::size_t>(n));
  for (EdgeId e : g.edge_ids()) {
    auto [u, v] = g.ends(e);
    if (u != v) {
      adj[u].insert(v);
      adj[v].insert(u);
    }
  }
  std::vector<bool> gone(static_cast<std::size_t>(n));
  std::vector<VertexId> order;
  for (int step = 0; step < n; ++step) {
    VertexId best = -1;
    for (VertexId v = 0; v < n; ++v)
      if (!gone[v] && (best < 0 || adj[v].size() < adj[best].size())) best = v;
    gone[best] = true;
    order.push_back(best);
    for (VertexId a : adj[best])
      for (VertexId b : adj[best])
        if (a != b) adj[a].insert(b);
    for (VertexId a : adj[best]) adj[a].erase(best);
    adj[best].clear();
  }
  return order;
}

WallLabel label_arg(const std::vector<int>& xs, const char* name) {
  if (xs.size() != 2) throw InputError(std::string("--") + name + " takes i,j");
  return {xs[0], xs[1]};
}

int layout_height(int vertices) {
  for (int h = 1; (h + 1) * (2 * h + 2) - 2 <= vertices; ++h)
    if ((h + 1) * (2 * h + 2) - 2 == vertices) return h;
  throw InputError("the map's pattern has " + std::to_string(vertices) + " vertices, which no elementary wall has");
}

class Cli {
 public:
  Cli(std::ostream& out, std::ostream& err) : out_(out), err_(err), app_("forge: immersion toolkit") {
    app_.set_help_flag("--help", "Print this help message and exit");
    app_.require_subcommand(1);
    gen();
    verify_cmd();
    find_cmd();
    tw();
    conn();
    paths();
    wall();
    lift();
    reduce();
    grid_immersion();
    dot();
  }

  int run(std::vector<std::string> args) {
    std::reverse(args.begin(), args.end());
    try {
      app_.parse(args);
    } catch (const CLI::CallForHelp& e) {
      return app_.exit(e, out_, err_);
    } catch (const CLI::CallForAllHelp& e) {
      return app_.exit(e, out_, err_);
    } catch (const CLI::ParseError& e) {
      err_ << "error: " << e.what() << "\n";
      return kInputError;
    }
    try {
      return action_();
    } catch (const HypothesisError& e) {
      err_ << "hypothesis violated: " << e.what() << "\n";
      return kHypothesis;
    } catch (const InputError& e) {
      err_ << "input error: " << e.what() << "\n";
      return kInputError;
    } catch (const ParameterError& e) {
      err_ << "bad parameter: " << e.what() << "\n";
      return kInputError;
    } catch (const QueryError& e) {
      err_ << "bad query: " << e.what() << "\n";
      return kInputError;
    } catch (const PreconditionError& e) {
      err_ << "precondition failed: " << e.what() << "\n";
      return kInputError;
    } catch (const std::exception& e) {
      err_ << "internal error: " << e.what() << "\n";
      return kInternal;
    }
  }

 private:
  // "-h" would clash with --h
  static CLI::App* sub(CLI::App* parent, const std::string& name, const std::string& desc) {
    auto* c = parent->add_subcommand(name, desc);
    c->set_help_flag("--help", "Print this help message and exit");
    return c;
  }

  void emit(const std::string& path, const std::string& text) {
    if (path.empty())
      out_ << text;
    else
      write_text_file(path, text);
  }

  std::string& opt_out(CLI::App* c, const char* desc = "output file (default: standard output)") {
    auto& s = strings_.emplace_back();
    c->add_option("--out", s, desc);
    return s;
  }
  std::string& path_opt(CLI::App* c, const char* name, const char* desc, bool required = true) {
    auto& s = strings_.emplace_back();
    auto* o = c->add_option(name, s, desc);
    if (required) o->required();
    return s;
  }

  void gen() {
    auto* g = sub(&app_, "gen", "generate a graph in the text format");
    g->require_subcommand(1);
    {
      auto* c = sub(g, "grid", "g x g grid with a labelling side-car");
      auto& n = ints_.emplace_back(0);
      c->add_option("--g", n, "side length")->required();
      auto& out = opt_out(c);
      auto& labels = path_opt(c, "--labels", "labelling output file", false);
      c->callback([&] {
        action_ = [&] {
          auto [graph, lab] = grid(n);
          emit(out, serialize_graph(graph));
          if (!labels.empty()) write_text_file(labels, serialize_grid_labeling(lab));
          return kOk;
        };
      });
    }
    {
      auto* c = sub(g, "wall", "elementary wall, optionally subdivided, with a wall side-car");
      auto& h = ints_.emplace_back(0);
      auto& k = ints_.emplace_back(0);
      c->add_option("--h", h, "height (even)")->required();
      c->add_option("--subdivide", k, "new vertices per edge");
      auto& out = opt_out(c);
      auto& labels = path_opt(c, "--labels", "wall side-car output file", false);
      c->callback([&] {
        action_ = [&] {
          if (k < 0) throw ParameterError("--subdivide must not be negative");
          auto [base, w] = elementary_wall(h);
          auto [sub, rec] = subdivide_all(base, k);
          auto host = share(sub);
          Wall wall = Wall::from_subdivision_map(rec.as_immersion(share(base), host), h);
          emit(out, serialize_graph(*host));
          if (!labels.empty()) write_text_file(labels, serialize_wall(wall));
          return kOk;
        };
      });
    }
    {
      auto* c = sub(g, "quadstar", "star with every edge doubled twice");
      auto& n = ints_.emplace_back(0);
      c->add_option("--leaves", n, "number of leaves")->required();
      auto& out = opt_out(c);
      c->callback([&] {
        action_ = [&] {
          emit(out, serialize_graph(quad_star(n)));
          return kOk;
        };
      });
    }
  }

  void verify_cmd() {
    auto* c = sub(&app_, "verify", "check an immersion map; 0 valid, 2 violation");
    auto& host = path_opt(c, "--host", "host graph");
    auto& pattern = path_opt(c, "--pattern", "pattern graph");
    auto& map = path_opt(c, "--map", "immersion map");
    auto& roots = path_opt(c, "--roots", "file of allowed vertex images", false);
    c->callback([&] {
      action_ = [&] {
        auto g = load_graph(host);
        auto h = load_graph(pattern);
        auto m = with_path(map, [&](const std::string& t) { return parse_map(t, h, g); });
        auto v = verify(m);
        for (const auto& x : v.violations) out_ << "violation condition " << x.condition << ": " << x.message << "\n";
        if (!v.ok()) return kFalse;
        if (!roots.empty()) {
          auto s = with_path(roots, parse_id_list);
          if (!is_rooted(m, s)) {
            out_ << "violation: a vertex image lies outside the roots\n";
            return kFalse;
          }
        }
        out_ << (is_subdivision_map(m) ? "ok (subdivision map)\n" : "ok\n");
        return kOk;
      };
    });
  }

  void find_cmd() {
    auto* c = sub(&app_, "find", "search for an immersion; 0 found, 2 none, 4 budget exhausted");
    auto& host = path_opt(c, "--host", "host graph");
    auto& pattern = path_opt(c, "--pattern", "pattern graph");
    auto& roots = path_opt(c, "--roots", "file of allowed vertex images", false);
    auto& budget = budgets_.emplace_back(ImmersionSearchOptions{}.budget);
    c->add_option("--budget", budget, "search expansions");
    auto& out = opt_out(c);
    c->callback([&] {
      action_ = [&] {
        ImmersionSearchOptions opt;
        opt.budget = budget;
        if (!roots.empty()) opt.roots = with_path(roots, parse_id_list);
        auto r = find_immersion(load_graph(host), load_graph(pattern), opt);
        err_ << to_string(r.status) << " after " << r.expansions << " expansions\n";
        if (r.map) {
          emit(out, serialize_map(*r.map));
          return kOk;
        }
        return r.status == SearchStatus::kBudgetExhausted ? kExhausted : kFalse;
      };
    });
  }

  void tw() {
    auto* c = sub(&app_, "tw", "tree decomposition (minimum-degree heuristic unless --exact)");
    auto& graph = path_opt(c, "--graph", "graph");
    auto& exact = flags_.emplace_back(false);
    c->add_flag("--exact", exact, "exact tree-width");
    auto& limit = ints_.emplace_back(12);
    c->add_option("--limit", limit, "largest vertex count for --exact");
    auto& out = opt_out(c);
    c->callback([&] {
      action_ = [&] {
        auto g = load_graph(graph);
        TreeDecomposition d;
        int w = 0;
        if (exact) {
          auto r = exact_treewidth(*g, limit);
          d = std::move(r.decomposition);
          w = r.width;
        } else {
          d = decomposition_from_order(*g, min_degree_order(*g));
          w = g->vertex_count() ? width(d) : -1;
        }
        out_ << "# width: " << w << "\n";
        if (!out.empty()) write_text_file(out, serialize_decomposition(d));
        else out_ << serialize_decomposition(d);
        return kOk;
      };
    });
  }

  void conn() {
    auto* c = sub(&app_, "conn", "pairwise k-edge-connectivity of a vertex set; 0 yes, 2 no");
    auto& graph = path_opt(c, "--graph", "graph");
    auto& set = vecs_.emplace_back();
    c->add_option("--set", set, "vertices")->delimiter(',')->required();
    auto& k = ints_.emplace_back(4);
    c->add_option("--k", k, "required number of edge-disjoint paths");
    c->callback([&] {
      action_ = [&] {
        auto g = load_graph(graph);
        for (int v : set)
          if (!g->has_vertex(v)) throw QueryError("no vertex " + std::to_string(v));
        auto r = pairwise_k_connected(*g, set, k);
        if (!r.failing) {
          out_ << "yes: every pair is " << k << "-edge-connected\n";
          return kOk;
        }
        out_ << "no: " << r.failing->first << " " << r.failing->second << " have only " << r.connectivity
             << " edge-disjoint paths\n";
        return kFalse;
      };
    });
  }

  void paths() {
    auto* c = sub(&app_, "paths", "edge-disjoint paths to a target set; 0 found, 2 cut");
    auto& graph = path_opt(c, "--graph", "graph");
    auto& from = ints_.emplace_back(0);
    c->add_option("--from", from, "source vertex")->required();
    auto& targets = vecs_.emplace_back();
    c->add_option("--targets", targets, "target vertices")->delimiter(',')->required();
    auto& k = ints_.emplace_back(4);
    c->add_option("--k", k, "number of paths");
    auto& pre = vecs_.emplace_back();
    c->add_option("--prescribe", pre, "three ends that must stay path ends")->delimiter(',');
    auto& out = opt_out(c);
    c->callback([&] {
      action_ = [&] {
        auto g = load_graph(graph);
        for (int v : targets)
          if (!g->has_vertex(v)) throw QueryError("no vertex " + std::to_string(v));
        if (!g->has_vertex(from)) throw QueryError("no vertex " + std::to_string(from));
        std::set<VertexId> t(targets.begin(), targets.end());
        BundleResult r;
        if (!pre.empty()) {
          if (pre.size() != 3 || k != 4) throw ParameterError("--prescribe takes three vertices and needs --k 4");
          std::set<VertexId> ends(pre.begin(), pre.end());
          if (ends.size() != 3) throw ParameterError("prescribed ends must be distinct");
          auto seeds = disjoint_paths_to_set(*g, from, ends, 3, {}, true);
          if (!seeds.bundle) {
            out_ << "no three edge-disjoint paths reach the prescribed ends\n";
            return kFalse;
          }
          std::array<VertexId, 3> p{pre[0], pre[1], pre[2]};
          std::array<Walk, 3> s;
          for (const Walk& w : seeds.bundle->paths)
            for (int i = 0; i < 3; ++i)
              if (w.back() == p[i]) s[i] = w;
          r = augment_with_prescribed_ends(*g, from, t, p, s);
        } else {
          r = disjoint_paths_to_set(*g, from, t, k);
        }
        if (!r.bundle) {
          std::ostringstream os;
          os << "flow " << r.flow << ", cut:";
          for (EdgeId e : r.cut) os << " " << e;
          out_ << os.str() << "\n";
          return kFalse;
        }
        std::ostringstream os;
        os << "format: 1\n";
        for (const Walk& w : r.bundle->paths) os << "path: " << serialize_walk(w) << "\n";
        emit(out, os.str());
        return kOk;
      };
    });
  }

  void wall() {
    auto* w = sub(&app_, "wall", "wall search and wall distance");
    w->require_subcommand(1);
    {
      auto* c = sub(w, "find", "find a wall; 0 found, 2 none, 4 budget exhausted");
      auto& graph = path_opt(c, "--graph", "graph");
      auto& h = ints_.emplace_back(0);
      c->add_option("--h", h, "height (even)")->required();
      auto& budget = budgets_.emplace_back(10'000'000);
      c->add_option("--budget", budget, "search expansions");
      auto& out = opt_out(c);
      c->callback([&] {
        action_ = [&] {
          auto r = find_wall(load_graph(graph), h, budget);
          err_ << to_string(r.status) << " after " << r.expansions << " expansions\n";
          if (r.wall) {
            emit(out, serialize_wall(*r.wall));
            return kOk;
          }
          return r.status == SearchStatus::kBudgetExhausted ? kExhausted : kFalse;
        };
      });
    }
    {
      auto* c = sub(w, "dist", "distance between two labelled wall vertices");
      auto& graph = path_opt(c, "--graph", "graph");
      auto& wallf = path_opt(c, "--wall", "wall side-car");
      auto& s = vecs_.emplace_back();
      auto& t = vecs_.emplace_back();
      c->add_option("--s", s, "label i,j")->delimiter(',')->required();
      c->add_option("--t", t, "label i,j")->delimiter(',')->required();
      c->callback([&] {
        action_ = [&] {
          auto g = load_graph(graph);
          Wall wl = with_path(wallf, [&](const std::string& x) { return parse_wall(x, g); });
          WallLabel a = label_arg(s, "s"), b = label_arg(t, "t");
          if (!wl.layout().contains(a) || !wl.layout().contains(b)) throw QueryError("label outside the wall");
          out_ << wall_distance(wl, wl.at(a), wl.at(b)) << "\n";
          return kOk;
        };
      });
    }
  }

  void lift() {
    auto* c = sub(&app_, "lift", "split off two edges at a vertex");
    auto& graph = path_opt(c, "--graph", "graph");
    auto& at = ints_.emplace_back(0);
    c->add_option("--at", at, "vertex")->required();
    auto& edges = vecs_.emplace_back();
    c->add_option("--edges", edges, "d1,d2")->delimiter(',')->required();
    auto& out = opt_out(c, "output file for the lifted graph (default: after the record)");
    c->callback([&] {
      action_ = [&] {
        if (edges.size() != 2) throw InputError("--edges takes d1,d2");
        auto g = load_graph(graph);
        auto [lifted, rec] = lift_pair(*g, at, edges[0], edges[1]);
        out_ << "format: 1\n" << to_string(rec) << "\n";
        // ids in the record refer to the uncompacted graph; d0 becomes the last edge
        emit(out, serialize_graph(lifted));
        return kOk;
      };
    });
  }

  void reduce() {
    auto* c = sub(&app_, "reduce", "lift crossings of an immersed elementary wall away");
    auto& graph = path_opt(c, "--graph", "host graph");
    auto& map = path_opt(c, "--map", "map of the elementary wall into the host");
    auto& s0 = path_opt(c, "--s0", "file of elementary-wall vertex ids");
    auto& fins = path_opt(c, "--fins", "fin lines 'fin (i,j): walk'");
    auto& out = opt_out(c, "lift history output (default: standard output)");
    auto& out_wall = path_opt(c, "--out-wall", "final wall side-car", false);
    auto& out_fins = path_opt(c, "--out-fins", "final fin side-car", false);
    auto& out_graph = path_opt(c, "--out-graph", "final graph", false);
    c->callback([&] {
      action_ = [&] {
        auto g = load_graph(graph);
        std::string mt = read_text_file(map);
        int nv = 0;
        {
          std::istringstream is(mt);
          std::string l;
          while (std::getline(is, l))
            if (l.rfind("v ", 0) == 0) ++nv;
        }
        const int h = layout_height(nv);
        auto lay = wall_layout(h);
        auto pat = share(lay->graph());
        ImmersionMap m = with_path(map, [&](const std::string& t) { return parse_map(t, pat, g); });
        auto roots = with_path(s0, parse_id_list);
        std::set<int> s(roots.begin(), roots.end());
        std::map<int, Walk> f;
        for (auto& [lab, w] : with_path(fins, parse_fin_lines)) {
          auto k = lay->find(lab);
          if (!k) throw InputError(fins + ": " + to_string(lab) + " is not a wall position");
          f[*k] = w;
        }
        auto r = reduce_immersed_wall(m, h, s, f);
        emit(out, serialize_lift_history(r.history));
        auto [final_graph, ren] = compact(*r.fins.wall->host());
        std::vector<Walk> bs;
        for (const Walk& b : r.fins.wall->branches()) bs.push_back(renumber(b, ren));
        auto w2 = std::make_shared<const Wall>(
            Wall::from_branches(final_graph, h, r.fins.wall->label_images(), std::move(bs)));
        FinSystem fs{w2, {}};
        for (const Fin& x : r.fins.fins) fs.fins.push_back({x.s, renumber(x.path, ren), x.t});
        for (int d : r.dropped) err_ << "dropped the fin of " << to_string(lay->labels()[d]) << "\n";
        if (!out_graph.empty()) write_text_file(out_graph, serialize_graph(*final_graph));
        if (!out_wall.empty()) write_text_file(out_wall, serialize_wall(*w2));
        if (!out_fins.empty()) write_text_file(out_fins, serialize_fins(fs));
        return kOk;
      };
    });
  }

  void grid_immersion() {
    auto* c = sub(&app_, "grid-immersion",
                                  "rooted grid immersion; 0 found, 4 exhausted, 5 hypothesis violated");
    auto& graph = path_opt(c, "--graph", "host graph");
    auto& g = ints_.emplace_back(2);
    c->add_option("--g", g, "grid side length")->required();
    auto& roots = path_opt(c, "--roots", "file of root vertices");
    auto& wallf = path_opt(c, "--wall", "wall side-car to start from", false);
    auto& sets = svecs_.emplace_back();
    c->add_option("--set", sets, "configuration override key=value (repeatable)");
    auto& out = opt_out(c, "output file for the immersion map");
    auto& report = path_opt(c, "--report", "report output file (default: standard output)", false);
    c->callback([&] {
      action_ = [&] {
        PipelineConfig cfg;
        cfg.g = g;
        for (const auto& kv : sets) {
          auto eq = kv.find('=');
          if (eq == std::string::npos) throw ParameterError("--set expects key=value, got '" + kv + "'");
          cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
        }
        auto host = load_graph(graph);
        auto s = with_path(roots, parse_id_list);
        std::optional<Wall> w;
        if (!wallf.empty()) w = with_path(wallf, [&](const std::string& t) { return parse_wall(t, host); });
        auto rep = find_grid_immersion(host, s, cfg, w);
        emit(report, rep.to_text());
        if (rep.result && !out.empty()) write_text_file(out, serialize_map(*rep.result));
        switch (rep.outcome) {
          case Outcome::kFound: return kOk;
          case Outcome::kHypothesisViolated: return kHypothesis;
          case Outcome::kExhausted: return kExhausted;
        }
        return kInternal;
      };
    });
  }

  void dot() {
    auto* c = sub(&app_, "dot", "Graphviz export with optional overlays");
    auto& graph = path_opt(c, "--graph", "graph");
    auto& wallf = path_opt(c, "--wall", "wall side-car overlay", false);
    auto& pattern = path_opt(c, "--pattern", "pattern of the map overlay", false);
    auto& map = path_opt(c, "--map", "immersion map overlay", false);
    auto& out = opt_out(c);
    c->callback([&] {
      action_ = [&] {
        auto g = load_graph(graph);
        std::optional<Wall> w;
        std::optional<ImmersionMap> m;
        if (!wallf.empty()) w = with_path(wallf, [&](const std::string& t) { return parse_wall(t, g); });
        if (map.empty() != pattern.empty()) throw InputError("--map and --pattern go together");
        if (!map.empty()) {
          auto h = load_graph(pattern);
          m = with_path(map, [&](const std::string& t) { return parse_map(t, h, g); });
        }
        emit(out, export_dot(*g, w ? &*w : nullptr, m ? &*m : nullptr));
        return kOk;
      };
    });
  }

  std::ostream& out_;
  std::ostream& err_;
  CLI::App app_;
  std::function<int()> action_;
  // option storage; deques keep references stable
  std::deque<std::string> strings_;
  std::deque<int> ints_;
  std::deque<bool> flags_;
  std::deque<std::uint64_t> budgets_;
  std::deque<std::vector<int>> vecs_;
  std::deque<std::vector<std::string>> svecs_;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    Cli cli(out, err);
    return cli.run(args);
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternal;
  }
}

}  // namespace forge::cli
