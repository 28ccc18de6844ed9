#include <algorithm>
#include <deque>
#include <limits>
#include <map>
#include <mutex>

#include "forge/errors.hpp"
#include "forge/generators.hpp"
#include "pipeline_internal.hpp"

namespace forge {

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::kLongJumps: return "long-jumps";
    case Strategy::kExternalBlob: return "external-blob";
    case Strategy::kInternalBlob: return "internal-blob";
    case Strategy::kShortJumps: return "short-jumps";
  }
  return "?";
}

GraphPtr grid_pattern(int g) {
  static std::mutex mu;
  static std::map<int, GraphPtr> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[g];
  if (!slot) slot = share(grid(g).first);
  return slot;
}

std::vector<int> separated_subset(const Wall& w, const std::vector<VertexId>& vs, int threshold) {
  std::vector<int> out;
  if (vs.empty()) return out;
  std::vector<int> best(vs.size(), std::numeric_limits<int>::max());
  std::vector<bool> in(vs.size(), false);
  int cur = 0;
  for (;;) {
    out.push_back(cur);
    in[cur] = true;
    auto d = wall_distances_from(w, vs[cur]);
    for (std::size_t k = 0; k < vs.size(); ++k) best[k] = std::min(best[k], d.at(vs[k]));
    int pick = -1;
    for (std::size_t k = 0; k < vs.size(); ++k)
      if (!in[k] && (pick < 0 || best[k] > best[pick])) pick = static_cast<int>(k);
    if (pick < 0 || best[pick] < threshold) break;
    cur = pick;
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace detail {

std::vector<EdgeId> grid_rotation(int g, VertexId v) {
  GridLabeling lab{g};
  auto [i, j] = lab.label_of(v);
  const MultiGraph& p = *grid_pattern(g);
  std::vector<EdgeId> out;
  const int di[] = {-1, 0, 1, 0}, dj[] = {0, 1, 0, -1};
  for (int k = 0; k < 4; ++k) {
    int a = i + di[k], b = j + dj[k];
    if (a < 1 || a > g || b < 1 || b > g) continue;
    out.push_back(p.edges_between(v, lab.at(a, b)).at(0));
  }
  return out;
}

std::vector<std::pair<VertexId, EdgeId>> ports(const Wall& w, VertexId s) {
  auto l = w.label_of(s);
  if (!l) throw ParameterError("vertex " + std::to_string(s) + " is not a labelled wall vertex");
  const WallLayout& lay = w.layout();
  int k = lay.index(*l);
  std::vector<std::pair<VertexId, EdgeId>> out;
  for (int u : lay.rotation(k)) {
    const Walk& b = w.branches()[static_cast<std::size_t>(lay.edge_between(k, u))];
    if (b.front() == s)
      out.emplace_back(b.vertices[1], b.edges.front());
    else
      out.emplace_back(b.vertices[b.vertices.size() - 2], b.edges.back());
  }
  return out;
}

std::optional<Walk> path_within(const MultiGraph& g, const std::set<EdgeId>& edges, VertexId a, VertexId b,
                                const std::set<VertexId>& avoid) {
  std::map<VertexId, std::vector<std::pair<VertexId, EdgeId>>> adj;
  for (EdgeId e : edges) {
    auto [u, v] = g.ends(e);
    if (u == v) continue;
    adj[u].emplace_back(v, e);
    adj[v].emplace_back(u, e);
  }
  std::map<VertexId, std::pair<VertexId, EdgeId>> via;
  std::deque<VertexId> q{a};
  via[a] = {kNoVertex, kNoEdge};
  while (!q.empty() && !via.count(b)) {
    VertexId x = q.front();
    q.pop_front();
    for (auto [y, e] : adj[x])
      if (!via.count(y) && !avoid.count(y)) {
        via[y] = {x, e};
        q.push_back(y);
      }
  }
  if (!via.count(b)) return std::nullopt;
  Walk w = Walk::single(b);
  for (VertexId y = b; y != a;) {
    auto [x, e] = via[y];
    w.vertices.push_back(x);
    w.edges.push_back(e);
    y = x;
  }
  return w.reversed();
}

std::optional<std::pair<int, int>> shared_edge(const std::vector<Fin>& fins) {
  std::map<EdgeId, int> owner;
  for (std::size_t i = 0; i < fins.size(); ++i)
    for (EdgeId e : fins[i].path.edges) {
      auto [it, fresh] = owner.emplace(e, static_cast<int>(i));
      if (!fresh && it->second != static_cast<int>(i)) return std::make_pair(it->second, static_cast<int>(i));
    }
  return std::nullopt;
}

std::optional<std::pair<int, int>> too_close(const Wall& w, const std::vector<VertexId>& pts, int threshold) {
  for (std::size_t a = 0; a < pts.size(); ++a) {
    auto d = wall_distances_from(w, pts[a]);
    for (std::size_t b = a + 1; b < pts.size(); ++b)
      if (d.at(pts[b]) < threshold) return std::make_pair(static_cast<int>(a), static_cast<int>(b));
  }
  return std::nullopt;
}

int nearest_to_perimeter(const Wall& w, const std::vector<Fin>& fins, bool with_target) {
  Walk p = perimeter(w);
  std::set<VertexId> rim(p.vertices.begin(), p.vertices.end());
  int best = -1, best_d = 0;
  for (std::size_t i = 0; i < fins.size(); ++i) {
    int d = wall_distance_to_set(w, fins[i].s, rim);
    if (with_target) d = std::min(d, wall_distance_to_set(w, fins[i].t, rim));
    if (best < 0 || d < best_d) {
      best = static_cast<int>(i);
      best_d = d;
    }
  }
  return best;
}

ImmersionMap restrict_grid(const ImmersionMap& m, int from, int to) {
  if (from == to) return m;
  GridLabeling big{from}, small{to};
  const MultiGraph& pb = *grid_pattern(from);
  ImmersionMap out;
  out.pattern = grid_pattern(to);
  out.host = m.host;
  out.vertex_map.resize(static_cast<std::size_t>(to * to));
  for (VertexId v = 0; v < to * to; ++v) {
    auto [i, j] = small.label_of(v);
    out.vertex_map[v] = m.vertex_map.at(static_cast<std::size_t>(big.at(i, j)));
  }
  for (EdgeId e : out.pattern->edge_ids()) {
    auto [u, v] = out.pattern->ends(e);
    auto [ui, uj] = small.label_of(u);
    auto [vi, vj] = small.label_of(v);
    EdgeId f = pb.edges_between(big.at(ui, uj), big.at(vi, vj)).at(0);
    Walk w = m.edge_map.at(f);
    if (w.front() != out.vertex_map[u]) w = w.reversed();
    out.edge_map[e] = std::move(w);
  }
  return out;
}

std::string soundness(const ImmersionMap& m, const std::vector<VertexId>& roots) {
  auto v = verify(m);
  if (!v.ok()) return "condition " + std::to_string(v.violations[0].condition) + ": " + v.violations[0].message;
  if (!is_rooted(m, roots)) return "a grid vertex is mapped outside the roots";
  return {};
}

std::vector<VertexId> fin_roots(const std::vector<Fin>& fins) {
  std::vector<VertexId> out;
  for (const Fin& f : fins) out.push_back(f.s);
  return out;
}

StrategyOutcome long_jumps(const FinSystem& fs, const PipelineConfig& cfg, std::uint64_t& budget) {
  StrategyOutcome out;
  const Wall& w = *fs.wall;
  const MultiGraph& host = *w.host();
  const int g = promoted(cfg.g);
  if (g != cfg.g) out.trace.push_back("g = " + std::to_string(cfg.g) + " is odd; routing J_" + std::to_string(g));
  const int n = g * g;
  const int need = std::max(long_count(cfg), n);
  if (static_cast<int>(fs.fins.size()) < need) {
    out.failure = "long jumps need " + std::to_string(need) + " fins, got " + std::to_string(fs.fins.size());
    return out;
  }
  auto problems = validate_fin_system(fs);
  if (!problems.empty()) {
    out.failure = "not a fin system: " + problems[0].message;
    return out;
  }
  if (auto p = shared_edge(fs.fins)) {
    out.failure = "fins " + std::to_string(p->first) + " and " + std::to_string(p->second) + " share an edge";
    return out;
  }
  std::vector<VertexId> pts;
  for (const Fin& f : fs.fins) {
    pts.push_back(f.s);
    pts.push_back(f.t);
  }
  if (auto p = too_close(w, pts, cfg.a1)) {
    out.failure = "vertices " + std::to_string(pts[p->first]) + " and " + std::to_string(pts[p->second]) +
                  " of the fin ends are closer than a1 = " + std::to_string(cfg.a1);
    return out;
  }
  std::vector<Fin> cand = fs.fins;
  if (static_cast<int>(cand.size()) > n) {
    int drop = nearest_to_perimeter(w, cand, true);
    out.trace.push_back("fin at " + std::to_string(cand[drop].s) + " set aside as nearest to the perimeter");
    cand.erase(cand.begin() + drop);
  }
  std::stable_sort(cand.begin(), cand.end(), [&](const Fin& x, const Fin& y) { return *w.label_of(x.s) < *w.label_of(y.s); });

  GraphPtr pat = grid_pattern(g);
  GridLabeling lab{g};
  std::set<EdgeId> matching;
  for (int i = 1; i <= g; ++i)
    for (int j = 1; j < g; j += 2) matching.insert(pat->edges_between(lab.at(i, j), lab.at(i, j + 1)).at(0));
  // port slot of every non-matching edge at each end: clockwise after the
  // matching edge, which comes last
  std::map<std::pair<VertexId, EdgeId>, int> slot;
  for (VertexId v = 0; v < n; ++v) {
    auto rot = grid_rotation(g, v);
    auto it = std::find_if(rot.begin(), rot.end(), [&](EdgeId e) { return matching.count(e) > 0; });
    std::rotate(rot.begin(), it + 1, rot.end());
    for (std::size_t p = 0; p + 1 < rot.size(); ++p) slot[{v, rot[p]}] = static_cast<int>(p);
  }
  std::vector<std::vector<std::pair<VertexId, EdgeId>>> port(cand.size());
  for (std::size_t k = 0; k < cand.size(); ++k) port[k] = ports(w, cand[k].s);

  const auto edges = pat->edge_ids();
  std::uint64_t tried = 0;
  bool exhausted = false;
  std::optional<ImmersionMap> found;
  // ports that are a fin end can never carry a wall path
  std::set<VertexId> ends;
  for (const Fin& f : cand) {
    ends.insert(f.s);
    ends.insert(f.t);
  }
  std::vector<int> ndeg(static_cast<std::size_t>(n), 0);
  for (EdgeId e : pat->edge_ids())
    if (!matching.count(e))
      for (VertexId x : {pat->ends(e).u, pat->ends(e).v}) ++ndeg[x];
  // grid vertices in boustrophedon order, so the first injection lays the
  // grid along the diagonal row by row
  std::vector<VertexId> snake;
  for (int i = 1; i <= g; ++i)
    for (int k = 1; k <= g; ++k) snake.push_back(lab.at(i, i % 2 ? k : g + 1 - k));
  each_injection(n, static_cast<int>(cand.size()), [&](const std::vector<int>& order) {
    std::vector<int> a(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) a[snake[k]] = order[k];
    std::set<VertexId> roots;
    for (int c : a) roots.insert(cand[c].s);
    std::vector<std::vector<int>> allowed(static_cast<std::size_t>(n));
    for (VertexId v = 0; v < n; ++v) {
      for (int r = 0; r < 3; ++r) {
        bool ok = true;
        for (int p = 0; p < ndeg[v]; ++p)
          if (ends.count(port[a[v]][(p + r) % 3].first)) ok = false;
        if (ok) allowed[v].push_back(r);
      }
      if (allowed[v].empty()) return false;
    }
    std::vector<std::size_t> digit(static_cast<std::size_t>(n), 0);
    for (bool more = true; more;) {
      if (budget == 0) {
        exhausted = true;
        return true;
      }
      std::vector<int> rot(static_cast<std::size_t>(n));
      for (int k = 0; k < n; ++k) rot[k] = allowed[k][digit[k]];
      more = false;
      for (int k = 0; k < n && !more; ++k) {
        if (++digit[k] < allowed[k].size()) more = true;
        else digit[k] = 0;
      }
      auto port_of = [&](VertexId v, EdgeId e) {
        return port[a[v]][(slot.at({v, e}) + rot[v]) % 3];
      };
      std::vector<Demand> demands;
      for (EdgeId e : edges) {
        auto [u, v] = pat->ends(e);
        if (matching.count(e))
          demands.emplace_back(cand[a[u]].t, cand[a[v]].t);
        else
          demands.emplace_back(port_of(u, e).first, port_of(v, e).first);
      }
      ++tried;
      auto r = route_vertex_disjoint(host, w.edges(), demands, roots, std::min(budget, cfg.routing_budget));
      budget -= std::min(budget, r.expansions);
      if (r.status != SearchStatus::kFound) continue;
      ImmersionMap m{pat, w.host(), {}, {}};
      for (VertexId v = 0; v < n; ++v) m.vertex_map.push_back(cand[a[v]].s);
      for (std::size_t k = 0; k < edges.size(); ++k) {
        EdgeId e = edges[k];
        auto [u, v] = pat->ends(e);
        const Walk& q = r.paths[k];
        if (matching.count(e)) {
          std::set<EdgeId> pool(q.edges.begin(), q.edges.end());
          pool.insert(cand[a[u]].path.edges.begin(), cand[a[u]].path.edges.end());
          pool.insert(cand[a[v]].path.edges.begin(), cand[a[v]].path.edges.end());
          std::set<VertexId> other = roots;
          other.erase(cand[a[u]].s);
          other.erase(cand[a[v]].s);
          m.edge_map[e] = *path_within(host, pool, cand[a[u]].s, cand[a[v]].s, other);
        } else {
          auto [xu, eu] = port_of(u, e);
          auto [xv, ev] = port_of(v, e);
          Walk head{{cand[a[u]].s, xu}, {eu}};
          Walk tail{{xv, cand[a[v]].s}, {ev}};
          m.edge_map[e] = head.joined(q).joined(tail);
        }
      }
      out.trace.push_back("routed after " + std::to_string(tried) + " port and root assignments");
      found = std::move(m);
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
  ImmersionMap m = restrict_grid(*found, g, cfg.g);
  std::string bad = soundness(m, fin_roots(fs.fins));
  if (!bad.empty()) throw Error("long jumps assembled an invalid immersion: " + bad);
  out.map = std::move(m);
  return out;
}

StrategyOutcome external_blob(const std::shared_ptr<const Wall>& wall, const std::set<EdgeId>& x,
                              const PipelineConfig& cfg, std::uint64_t& budget) {
  StrategyOutcome out;
  const Wall& w = *wall;
  const MultiGraph& host = *w.host();
  if (x.empty()) {
    out.hypothesis = true;
    out.failure = "X is empty";
    return out;
  }
  std::map<VertexId, std::vector<std::pair<VertexId, EdgeId>>> adj;
  std::map<VertexId, int> deg;
  for (EdgeId e : x) {
    if (!host.has_edge(e)) throw QueryError("X names unknown edge " + std::to_string(e));
    if (w.contains_edge(e)) {
      out.hypothesis = true;
      out.failure = "X shares edge " + std::to_string(e) + " with the wall";
      return out;
    }
    auto [a, b] = host.ends(e);
    ++deg[a];
    ++deg[b];
    if (a != b) {
      adj[a].emplace_back(b, e);
      adj[b].emplace_back(a, e);
    }
  }
  std::vector<VertexId> cand;
  for (VertexId d : diagonal_vertices(w))
    if (deg.count(d) && deg[d] == 1) cand.push_back(d);
  const int b1 = long_count(cfg);
  auto pos = separated_subset(w, cand, cfg.a1);
  if (static_cast<int>(pos.size()) < 2 * b1) {
    out.failure = "external blob needs " + std::to_string(2 * b1) + " separated roots of degree one in X, found " +
                  std::to_string(pos.size());
    return out;
  }
  std::vector<VertexId> s;
  for (int k = 0; k < 2 * b1; ++k) s.push_back(cand[pos[k]]);
  std::set<VertexId> terminal(s.begin(), s.end());

  // spanning tree by BFS
  std::map<VertexId, std::pair<VertexId, EdgeId>> parent;
  std::vector<VertexId> order{s[0]};
  parent[s[0]] = {kNoVertex, kNoEdge};
  for (std::size_t k = 0; k < order.size(); ++k)
    for (auto [y, e] : adj[order[k]])
      if (!parent.count(y)) {
        parent[y] = {order[k], e};
        order.push_back(y);
      }
  if (order.size() != deg.size()) {
    out.hypothesis = true;
    out.failure = "X is disconnected";
    return out;
  }
  // bottom-up pairing: each subtree hands at most one terminal upwards
  std::map<VertexId, std::vector<VertexId>> up;
  std::vector<std::pair<VertexId, VertexId>> pairs;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    VertexId v = *it;
    std::vector<VertexId> items;
    if (terminal.count(v)) items.push_back(v);
    for (VertexId u : up[v]) items.push_back(u);
    std::size_t k = 0;
    for (; k + 1 < items.size(); k += 2) pairs.emplace_back(items[k], items[k + 1]);
    if (k < items.size()) up[parent[v].first].push_back(items[k]);
  }
  auto climb = [&](VertexId v) {
    Walk p = Walk::single(v);
    while (parent[p.back()].first != kNoVertex) {
      auto [u, e] = parent[p.back()];
      p.edges.push_back(e);
      p.vertices.push_back(u);
    }
    return p;
  };
  std::vector<Fin> fins;
  for (auto [a, b] : pairs) {
    Walk pa = climb(a), pb = climb(b);
    // drop the common part above the meeting vertex
    while (pa.vertices.size() > 1 && pb.vertices.size() > 1 &&
           pa.vertices[pa.vertices.size() - 2] == pb.vertices[pb.vertices.size() - 2]) {
      pa.vertices.pop_back();
      pa.edges.pop_back();
      pb.vertices.pop_back();
      pb.edges.pop_back();
    }
    fins.push_back(Fin{a, pa.joined(pb.reversed()), b});
    out.trace.push_back("paired " + std::to_string(a) + " with " + std::to_string(b) + " along the tree");
  }
  FinSystem paired{wall, std::move(fins)};
  auto r = long_jumps(paired, cfg, budget);
  r.trace.insert(r.trace.begin(), out.trace.begin(), out.trace.end());
  return r;
}

}  // namespace detail

StrategyOutcome strategy_long_jumps(const FinSystem& fs, const PipelineConfig& cfg) {
  std::uint64_t budget = cfg.strategy_budget;
  return detail::long_jumps(fs, cfg, budget);
}

StrategyOutcome strategy_external_blob(const std::shared_ptr<const Wall>& wall, const std::set<EdgeId>& x,
                                       const PipelineConfig& cfg) {
  std::uint64_t budget = cfg.strategy_budget;
  return detail::external_blob(wall, x, cfg, budget);
}

StrategyOutcome strategy_internal_blob(const FinSystem& fs, const PipelineConfig& cfg) {
  StrategyOutcome out;
  const Wall& w = *fs.wall;
  std::uint64_t budget = cfg.strategy_budget;
  const int b1 = detail::long_count(cfg);
  const int b2 = cfg.b2 > 0 ? cfg.b2 : 2 * b1;
  const auto& fins = fs.fins;
  if (static_cast<int>(fins.size()) < b2) {
    out.failure = "internal blob needs " + std::to_string(b2) + " fins, got " + std::to_string(fins.size());
    return out;
  }
  if (auto p = detail::shared_edge(fins)) {
    out.failure = "fins " + std::to_string(p->first) + " and " + std::to_string(p->second) + " share an edge";
    return out;
  }
  if (auto p = detail::too_close(w, detail::fin_roots(fins), cfg.a2)) {
    out.failure = "roots " + std::to_string(fins[p->first].s) + " and " + std::to_string(fins[p->second].s) +
                  " are closer than a2 = " + std::to_string(cfg.a2);
    return out;
  }
  std::vector<std::map<VertexId, int>> from_t;
  for (const Fin& f : fins) from_t.push_back(wall_distances_from(w, f.t));
  for (std::size_t i = 0; i < fins.size(); ++i)
    if (from_t[i].at(fins[i].s) < cfg.a2) {
      out.failure = "fin at " + std::to_string(fins[i].s) + " has its target closer than a2 = " + std::to_string(cfg.a2);
      return out;
    }
  // keep d(s_i, t_j) >= a2 / 2 throughout
  std::vector<bool> keep(fins.size(), true);
  for (std::size_t j = 0; j < fins.size(); ++j) {
    if (!keep[j]) continue;
    for (std::size_t i = 0; i < fins.size(); ++i)
      if (i != j && keep[i] && 2 * from_t[j].at(fins[i].s) < cfg.a2) {
        keep[i] = false;
        out.trace.push_back("fin at " + std::to_string(fins[i].s) + " dropped: root near a foreign target");
      }
  }
  std::vector<int> kept;
  for (std::size_t i = 0; i < fins.size(); ++i)
    if (keep[i]) kept.push_back(static_cast<int>(i));

  std::vector<VertexId> ts;
  for (int i : kept) ts.push_back(fins[i].t);
  auto sep = separated_subset(w, ts, cfg.a1);
  out.trace.push_back(std::to_string(sep.size()) + " targets pairwise at distance >= a1");
  if (static_cast<int>(sep.size()) >= b1) {
    FinSystem sub{fs.wall, {}};
    for (int k : sep) sub.fins.push_back(fins[kept[k]]);
    auto r = detail::long_jumps(sub, cfg, budget);
    for (auto& l : r.trace) out.trace.push_back("separated targets: " + l);
    if (r.ok()) {
      r.trace = out.trace;
      return r;
    }
    out.trace.push_back("separated targets: " + r.failure);
  }

  // cluster of targets around one t_j
  std::vector<int> cluster;
  for (int j : kept) {
    std::vector<int> c;
    for (int i : kept)
      if (from_t[j].at(fins[i].t) < cfg.a1) c.push_back(i);
    if (c.size() > cluster.size()) cluster = c;
  }
  out.trace.push_back("largest target cluster has " + std::to_string(cluster.size()) + " fins");
  const int h = w.height();
  std::optional<Wall> best;
  std::vector<int> best_roots;
  for (int h2 = 2; h2 <= h; h2 += 2)
    for (int i1 = 1; i1 + h2 <= h + 1; i1 += 2) {
      Wall sw = subwall(w, i1, 2 * i1 - 1, h2);
      auto diag = diagonal_vertices(sw);
      std::set<VertexId> dset(diag.begin(), diag.end());
      std::vector<int> roots;
      for (int i : cluster)
        if (dset.count(fins[i].s) && !sw.contains_vertex(fins[i].t)) roots.push_back(i);
      if (roots.size() > best_roots.size()) {
        best = sw;
        best_roots = roots;
      }
    }
  if (!best || static_cast<int>(best_roots.size()) < 2 * b1) {
    out.failure = "no subwall carries " + std::to_string(2 * b1) + " clustered roots away from their targets (best " +
                  std::to_string(best_roots.size()) + ")";
    return out;
  }
  std::set<EdgeId> x;
  const MultiGraph& host = *w.host();
  for (EdgeId e : w.edges()) {
    auto [a, b] = host.ends(e);
    if (!best->contains_vertex(a) && !best->contains_vertex(b)) x.insert(e);
  }
  for (const Fin& f : fins)
    if (!best->contains_vertex(f.t)) x.insert(f.path.edges.begin(), f.path.edges.end());
  out.trace.push_back("carved subwall of height " + std::to_string(best->height()) + " at " +
                      to_string(*w.label_of(best->at({1, 1}))) + " with " + std::to_string(best_roots.size()) +
                      " clustered roots");
  auto r = detail::external_blob(std::make_shared<const Wall>(*best), x, cfg, budget);
  for (auto& l : r.trace) out.trace.push_back("blob: " + l);
  r.trace = out.trace;
  if (!r.ok() && !r.failure.empty()) r.failure = "carved subwall: " + r.failure;
  return r;
}

}  // namespace forge
