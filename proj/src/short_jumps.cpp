#include <algorithm>
#include <cmath>
#include <map>

#include "forge/connectivity.hpp"
#include "forge/errors.hpp"
#include "pipeline_internal.hpp"

namespace forge {

namespace {

struct Site {
  int fin = -1;
  int i1 = 0, j1 = 0;
  std::set<VertexId> region;   // V(W_i)
  std::set<VertexId> deleted;  // region plus interiors of leaving branches
  std::set<EdgeId> local;      // W_i, leaving branches, F_i
  std::set<VertexId> ports;
  std::vector<VertexId> x;     // escape ports, clockwise
  std::vector<Walk> b;         // escape paths, b[p] ends at x[p]
};

}  // namespace

StrategyOutcome strategy_short_jumps(const FinSystem& fs, const PipelineConfig& cfg) {
  StrategyOutcome out;
  const Wall& w = *fs.wall;
  const MultiGraph& host = *w.host();
  const WallLayout& lay = w.layout();
  std::uint64_t budget = cfg.strategy_budget;
  const int g = cfg.g, n = g * g;
  const int need = std::max(cfg.fins_short(), n);
  std::vector<Fin> cand = fs.fins;
  if (static_cast<int>(cand.size()) < need) {
    out.failure = "short jumps need " + std::to_string(need) + " fins, got " + std::to_string(cand.size());
    return out;
  }
  if (auto p = detail::shared_edge(cand)) {
    out.failure = "fins " + std::to_string(p->first) + " and " + std::to_string(p->second) + " share an edge";
    return out;
  }
  if (auto p = detail::too_close(w, detail::fin_roots(cand), cfg.a3)) {
    out.failure = "roots " + std::to_string(cand[p->first].s) + " and " + std::to_string(cand[p->second].s) +
                  " are closer than a3 = " + std::to_string(cfg.a3);
    return out;
  }
  for (const Fin& f : cand)
    if (wall_distance(w, f.s, f.t) > cfg.c) {
      out.failure = "fin at " + std::to_string(f.s) + " has its target farther than c = " + std::to_string(cfg.c);
      return out;
    }
  int hc = std::max(2, cfg.c % 2 ? cfg.c + 1 : cfg.c);
  if (hc != cfg.c) out.trace.push_back("subwall height " + std::to_string(hc) + " for c = " + std::to_string(cfg.c));

  // candidate subwalls per fin, then a largest vertex-disjoint choice
  const int h = w.height();
  std::map<VertexId, int> terminal;
  for (std::size_t k = 0; k < cand.size(); ++k) {
    terminal[cand[k].s] = static_cast<int>(k);
    terminal[cand[k].t] = static_cast<int>(k);
  }
  struct Option {
    int i1, j1;
    std::set<VertexId> vs;
    std::set<EdgeId> es;
  };
  std::vector<std::vector<Option>> options(cand.size());
  std::vector<std::string> collisions;
  for (std::size_t k = 0; k < cand.size(); ++k) {
    std::string why = "no subwall of height " + std::to_string(hc) + " holds both ends";
    for (int i1 = 1; i1 + hc <= h + 1; i1 += 2)
      for (int j1 = 1; j1 + 2 * hc + 1 <= 2 * h + 2; j1 += 2) {
        Wall sw = subwall(w, i1, j1, hc);
        if (!sw.contains_vertex(cand[k].s) || !sw.contains_vertex(cand[k].t)) continue;
        int clash = -1;
        for (VertexId v : sw.vertices())
          if (auto it = terminal.find(v); it != terminal.end() && it->second != static_cast<int>(k)) {
            clash = it->second;
            break;
          }
        if (clash >= 0) {
          why = "every subwall around it holds an end of the fin at " + std::to_string(cand[clash].s);
          continue;
        }
        options[k].push_back({i1, j1, sw.vertices(), sw.edges()});
      }
    if (options[k].empty()) collisions.push_back("fin at " + std::to_string(cand[k].s) + ": " + why);
  }
  std::vector<int> pick(cand.size(), -1), best;
  int best_count = -1;
  std::set<VertexId> claimed;
  std::uint64_t carve_steps = 0;
  auto rec = [&](auto&& self, std::size_t k, int count) -> void {
    if (best_count == static_cast<int>(cand.size()) || ++carve_steps > cfg.routing_budget) return;
    if (count + static_cast<int>(cand.size() - k) <= best_count) return;
    if (k == cand.size()) {
      best_count = count;
      best = pick;
      return;
    }
    for (std::size_t o = 0; o < options[k].size(); ++o) {
      const auto& vs = options[k][o].vs;
      if (std::any_of(vs.begin(), vs.end(), [&](VertexId v) { return claimed.count(v) > 0; })) continue;
      claimed.insert(vs.begin(), vs.end());
      pick[k] = static_cast<int>(o);
      self(self, k + 1, count + 1);
      pick[k] = -1;
      for (VertexId v : vs) claimed.erase(v);
    }
    self(self, k + 1, count);
  };
  rec(rec, 0, 0);
  std::map<VertexId, int> owner;  // region vertex -> fin
  std::vector<Site> sites;
  for (std::size_t k = 0; k < cand.size(); ++k) {
    if (best[k] < 0) {
      if (!options[k].empty())
        collisions.push_back("fin at " + std::to_string(cand[k].s) + ": its subwalls overlap those of other fins");
      continue;
    }
    const Option& op = options[k][best[k]];
    Site s;
    s.fin = static_cast<int>(k);
    s.i1 = op.i1;
    s.j1 = op.j1;
    s.region = op.vs;
    s.local = op.es;
    for (VertexId v : s.region) owner[v] = s.fin;
    sites.push_back(std::move(s));
  }
  for (const auto& c : collisions) out.trace.push_back("carving: " + c);
  if (static_cast<int>(sites.size()) < n) {
    out.failure = "carving collision: " + std::to_string(sites.size()) + " disjoint subwalls for " +
                  std::to_string(n) + " grid vertices";
    if (!collisions.empty()) out.failure += "; " + collisions.front();
    return out;
  }

  // leaving branches, ports and the remaining wall W'
  std::set<VertexId> gone;
  for (std::size_t e = 0; e < lay.edges().size(); ++e) {
    const Walk& br = w.branches()[e];
    auto oa = owner.find(br.front()), ob = owner.find(br.back());
    int fa = oa == owner.end() ? -1 : oa->second, fb = ob == owner.end() ? -1 : ob->second;
    if (fa == fb) continue;
    for (std::size_t k = 1; k + 1 < br.vertices.size(); ++k) gone.insert(br.vertices[k]);
    if (fa >= 0 && fb >= 0) continue;  // joins two regions; used by neither
    int f = fa >= 0 ? fa : fb;
    VertexId outer = fa >= 0 ? br.back() : br.front();
    for (Site& s : sites)
      if (s.fin == f) {
        s.ports.insert(outer);
        s.local.insert(br.edges.begin(), br.edges.end());
        s.deleted.insert(br.vertices.begin() + 1, br.vertices.end() - 1);
      }
  }
  for (Site& s : sites) {
    s.deleted.insert(s.region.begin(), s.region.end());
    gone.insert(s.region.begin(), s.region.end());
  }
  std::set<EdgeId> rest;
  for (EdgeId e : w.edges()) {
    auto [a, b] = host.ends(e);
    if (!gone.count(a) && !gone.count(b)) rest.insert(e);
  }

  // four escape paths per fin
  std::vector<Site> usable;
  for (Site& s : sites) {
    const Fin& f = cand[s.fin];
    s.local.insert(f.path.edges.begin(), f.path.edges.end());
    std::vector<EdgeId> drop;
    for (EdgeId e : host.edge_ids())
      if (!s.local.count(e)) drop.push_back(e);
    MultiGraph lg = host.delete_edges(drop);
    std::set<VertexId> forbid;
    for (VertexId v : w.vertices())
      if (!s.deleted.count(v) && !s.ports.count(v)) forbid.insert(v);
    auto r = disjoint_paths_to_set(lg, f.s, s.ports, 4, forbid, true);
    if (!r.bundle) {
      out.trace.push_back("fin at " + std::to_string(f.s) + " has only " + std::to_string(r.flow) + " escape paths");
      continue;
    }
    if (!check_bundle(host, *r.bundle).empty())
      throw Error("escape paths of fin at " + std::to_string(f.s) + " are not edge-disjoint");
    double ci = s.i1 + hc / 2.0, cj = s.j1 + hc + 0.5;
    auto angle = [&](const Walk& p) {
      WallLabel l = *w.label_of(p.back());
      return std::atan2(l.i - ci, l.j - cj);
    };
    s.b = r.bundle->paths;
    std::stable_sort(s.b.begin(), s.b.end(), [&](const Walk& a, const Walk& b) { return angle(a) < angle(b); });
    for (const Walk& p : s.b) s.x.push_back(p.back());
    usable.push_back(std::move(s));
  }
  if (static_cast<int>(usable.size()) < n) {
    out.failure = "only " + std::to_string(usable.size()) + " fins have four escape paths";
    return out;
  }

  GraphPtr pat = grid_pattern(g);
  const auto pedges = pat->edge_ids();
  std::vector<std::vector<EdgeId>> rot(static_cast<std::size_t>(n));
  for (VertexId v = 0; v < n; ++v) rot[v] = detail::grid_rotation(g, v);
  auto slot = [&](VertexId v, EdgeId e) {
    return static_cast<int>(std::find(rot[v].begin(), rot[v].end(), e) - rot[v].begin());
  };
  std::uint64_t tried = 0;
  bool exhausted = false;
  std::optional<ImmersionMap> found;
  const int m = static_cast<int>(usable.size());
  detail::each_injection(n, m, [&](const std::vector<int>& a) {
    // crosses at every site without a grid vertex
    std::vector<bool> image(static_cast<std::size_t>(m), false);
    for (int c : a) image[c] = true;
    MultiGraph g2 = host;
    std::set<EdgeId> edges = rest;
    std::map<EdgeId, Walk> cross;  // cross edge -> walk through the surplus root
    for (int c = 0; c < m; ++c) {
      if (image[c]) continue;
      const Site& s = usable[c];
      for (int p : {0, 1}) {
        auto [ng, e] = g2.add_edge(s.x[p], s.x[p + 2]);
        g2 = std::move(ng);
        edges.insert(e);
        cross[e] = s.b[p].reversed().joined(s.b[p + 2]);
      }
    }
    int codes = 1;
    for (int k = 0; k < n; ++k) codes *= 4;
    for (int code = 0; code < codes; ++code) {
      if (budget == 0) {
        exhausted = true;
        return true;
      }
      std::vector<int> r(static_cast<std::size_t>(n));
      for (int k = 0, c = code; k < n; ++k, c /= 4) r[k] = c % 4;
      auto port = [&](VertexId v, EdgeId e) { return (slot(v, e) + r[v]) % 4; };
      std::vector<Demand> demands;
      for (EdgeId e : pedges) {
        auto [u, v] = pat->ends(e);
        demands.emplace_back(usable[a[u]].x[port(u, e)], usable[a[v]].x[port(v, e)]);
      }
      ++tried;
      auto res = route_vertex_disjoint(g2, edges, demands, {}, std::min(budget, cfg.routing_budget));
      budget -= std::min(budget, res.expansions);
      if (res.status != SearchStatus::kFound) continue;
      ImmersionMap im{pat, w.host(), {}, {}};
      for (VertexId v = 0; v < n; ++v) im.vertex_map.push_back(cand[usable[a[v]].fin].s);
      for (std::size_t k = 0; k < pedges.size(); ++k) {
        auto [u, v] = pat->ends(pedges[k]);
        const Walk& q = res.paths[k];
        Walk walk = usable[a[u]].b[port(u, pedges[k])];
        for (std::size_t i = 0; i < q.edges.size(); ++i) {
          auto it = cross.find(q.edges[i]);
          if (it == cross.end()) {
            walk.edges.push_back(q.edges[i]);
            walk.vertices.push_back(q.vertices[i + 1]);
          } else {
            Walk seg = it->second.front() == q.vertices[i] ? it->second : it->second.reversed();
            walk = walk.joined(seg);
          }
        }
        walk = walk.joined(usable[a[v]].b[port(v, pedges[k])].reversed());
        im.edge_map[pedges[k]] = shortcut_to_path(walk);
      }
      out.trace.push_back("routed after " + std::to_string(tried) + " port and root assignments, " +
                          std::to_string(m - n) + " crossed sites");
      found = std::move(im);
      return true;
    }
    return false;
  });
  if (!found) {
    out.exhausted = exhausted;
    out.failure = exhausted ? "budget exhausted after " + std::to_string(tried) + " routings"
                            : "no disjoint routing for any of " + std::to_string(tried) + " assignments";
    return out;
  }
  std::string bad = detail::soundness(*found, detail::fin_roots(fs.fins));
  if (!bad.empty()) {
    out.failure = "assembled map is not an immersion: " + bad;
    return out;
  }
  out.map = std::move(found);
  return out;
}

}  // namespace forge
