#include "forge/immersion.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <set>
#include <sstream>
#include <unordered_map>

namespace forge {

namespace {

void require_total(const ImmersionMap& m) {
  if (!m.pattern || !m.host) throw InputError("immersion map without pattern or host graph");
  const MultiGraph& h = *m.pattern;
  const MultiGraph& g = *m.host;
  if (static_cast<int>(m.vertex_map.size()) != h.vertex_count())
    throw InputError("vertex map covers " + std::to_string(m.vertex_map.size()) + " of " +
                     std::to_string(h.vertex_count()) + " pattern vertices");
  for (std::size_t v = 0; v < m.vertex_map.size(); ++v)
    if (!g.has_vertex(m.vertex_map[v]))
      throw InputError("pattern vertex " + std::to_string(v) + " has no valid host image");
  for (EdgeId e : h.edge_ids()) {
    auto it = m.edge_map.find(e);
    if (it == m.edge_map.end())
      throw InputError("pattern edge " + std::to_string(e) + " has no image");
    if (!it->second.is_valid_in(g))
      throw InputError("image of pattern edge " + std::to_string(e) +
                       " is not a walk of the host");
  }
  for (const auto& [e, w] : m.edge_map)
    if (!h.has_edge(e)) throw InputError("image given for unknown pattern edge " + std::to_string(e));
}

}  // namespace

Verdict verify(const ImmersionMap& m) {
  require_total(m);
  const MultiGraph& h = *m.pattern;
  Verdict verdict;
  auto report = [&](int cond, std::string msg, std::vector<int> wit) {
    verdict.violations.push_back(Violation{cond, std::move(msg), std::move(wit)});
  };

  std::unordered_map<VertexId, VertexId> first_preimage;
  for (VertexId v = 0; v < h.vertex_count(); ++v) {
    auto [it, fresh] = first_preimage.emplace(m.vertex_map[v], v);
    if (!fresh) {
      std::ostringstream os;
      os << "pattern vertices " << it->second << " and " << v << " share host vertex "
         << m.vertex_map[v];
      report(1, os.str(), {it->second, v, m.vertex_map[v]});
    }
  }

  for (EdgeId e : h.edge_ids()) {
    const Walk& w = m.edge_map.at(e);
    auto [a, b] = h.ends(e);
    VertexId ia = m.vertex_map[a], ib = m.vertex_map[b];
    if (a != b) {
      bool ends_ok = (w.front() == ia && w.back() == ib) || (w.front() == ib && w.back() == ia);
      if (!w.is_path() || !ends_ok || w.length() == 0)
        report(2, "image of edge " + std::to_string(e) + " is not a path between " +
                      std::to_string(ia) + " and " + std::to_string(ib),
               {e});
    } else if (!w.is_cycle() || !w.contains_vertex(ia)) {
      report(3, "image of loop " + std::to_string(e) + " is not a cycle through " +
                    std::to_string(ia),
             {e});
    }
  }

  for (VertexId v = 0; v < h.vertex_count(); ++v) {
    for (EdgeId e : h.edge_ids()) {
      if (h.is_incident(e, v)) continue;
      if (m.edge_map.at(e).contains_vertex(m.vertex_map[v]))
        report(4, "image of vertex " + std::to_string(v) + " lies on the image of edge " +
                      std::to_string(e),
               {v, e});
    }
  }

  std::unordered_map<EdgeId, EdgeId> owner;
  for (EdgeId e : h.edge_ids()) {
    std::set<EdgeId> mine(m.edge_map.at(e).edges.begin(), m.edge_map.at(e).edges.end());
    for (EdgeId d : mine) {
      auto [it, fresh] = owner.emplace(d, e);
      if (!fresh)
        report(5, "images of edges " + std::to_string(it->second) + " and " + std::to_string(e) +
                      " share host edge " + std::to_string(d),
               {it->second, e, d});
    }
  }
  return verdict;
}

bool is_subdivision_map(const ImmersionMap& m) {
  if (!verify(m).ok()) throw PreconditionError("is_subdivision_map needs a valid immersion");
  const MultiGraph& h = *m.pattern;
  std::vector<EdgeId> es = h.edge_ids();
  for (std::size_t i = 0; i < es.size(); ++i) {
    const Walk& wi = m.edge_map.at(es[i]);
    std::set<VertexId> vi(wi.vertices.begin(), wi.vertices.end());
    for (std::size_t j = i + 1; j < es.size(); ++j) {
      for (VertexId x : m.edge_map.at(es[j]).vertices) {
        if (!vi.count(x)) continue;
        bool explained = false;
        for (VertexId v = 0; v < h.vertex_count() && !explained; ++v)
          explained = m.vertex_map[v] == x && h.is_incident(es[i], v) && h.is_incident(es[j], v);
        if (!explained) return false;
      }
    }
  }
  return true;
}

bool is_rooted(const ImmersionMap& m, const std::vector<VertexId>& roots) {
  if (!verify(m).ok()) throw PreconditionError("is_rooted needs a valid immersion");
  std::set<VertexId> s(roots.begin(), roots.end());
  return std::all_of(m.vertex_map.begin(), m.vertex_map.end(),
                     [&](VertexId x) { return s.count(x) > 0; });
}

ImmersionMap immersion_from_subgraph(GraphPtr host, GraphPtr pattern,
                                     std::vector<VertexId> vertex_images,
                                     const std::map<EdgeId, EdgeId>& edge_images) {
  ImmersionMap m{pattern, host, std::move(vertex_images), {}};
  for (EdgeId e : pattern->edge_ids()) {
    auto it = edge_images.find(e);
    if (it == edge_images.end()) throw InputError("no host edge for pattern edge " + std::to_string(e));
    auto [a, b] = pattern->ends(e);
    VertexId ia = m.vertex_map.at(a), ib = m.vertex_map.at(b);
    m.edge_map[e] = Walk{{ia, ib}, {it->second}};
  }
  return m;
}

ImmersionMap identity_immersion(GraphPtr g) {
  std::vector<VertexId> vs(static_cast<std::size_t>(g->vertex_count()));
  for (VertexId v = 0; v < g->vertex_count(); ++v) vs[v] = v;
  std::map<EdgeId, EdgeId> es;
  for (EdgeId e : g->edge_ids()) es[e] = e;
  return immersion_from_subgraph(g, g, std::move(vs), es);
}

std::string to_string(SearchStatus s) {
  switch (s) {
    case SearchStatus::kFound: return "found";
    case SearchStatus::kNotFound: return "not_found";
    case SearchStatus::kBudgetExhausted: return "budget_exhausted";
  }
  return "?";
}

// ---------------------------------------------------------------------------

namespace {

class ImmersionSearch {
 public:
  ImmersionSearch(GraphPtr host, GraphPtr pattern, const ImmersionSearchOptions& opt)
      : host_(std::move(host)), pattern_(std::move(pattern)), budget_(opt.budget) {
    const MultiGraph& g = *host_;
    const MultiGraph& h = *pattern_;
    image_.assign(static_cast<std::size_t>(h.vertex_count()), kNoVertex);
    preimage_.assign(static_cast<std::size_t>(g.vertex_count()), kNoVertex);
    on_walks_.assign(static_cast<std::size_t>(g.vertex_count()), 0);
    used_edge_.assign(static_cast<std::size_t>(g.next_edge_id()), false);
    visited_.assign(static_cast<std::size_t>(g.vertex_count()), false);
    allowed_root_.assign(static_cast<std::size_t>(g.vertex_count()), !opt.roots.has_value());
    if (opt.roots)
      for (VertexId r : *opt.roots)
        if (g.has_vertex(r)) allowed_root_[r] = true;
    if (!opt.fixed_vertices.empty()) {
      if (static_cast<int>(opt.fixed_vertices.size()) != h.vertex_count())
        throw ParameterError("fixed vertex map must cover every pattern vertex");
      for (VertexId v = 0; v < h.vertex_count(); ++v) {
        VertexId y = opt.fixed_vertices[v];
        if (y == kNoVertex) continue;
        if (!g.has_vertex(y) || preimage_[y] != kNoVertex) throw ParameterError("fixed vertex map is not injective");
        image_[v] = y;
        preimage_[y] = v;
      }
    }
    for (const auto& [e, w] : opt.fixed_walks) {
      if (!h.has_edge(e) || !w.is_valid_in(g)) throw ParameterError("fixed walk for pattern edge " + std::to_string(e) + " is not usable");
      for (EdgeId d : w.edges) {
        if (used_edge_[d]) throw ParameterError("fixed walks share host edge " + std::to_string(d));
        used_edge_[d] = true;
      }
      commit(e, w);
    }
    plan();
  }

  ImmersionSearchResult run() {
    ImmersionSearchResult res;
    bool found = false;
    if (pattern_->vertex_count() <= host_->vertex_count()) found = step(0);
    res.expansions = expansions_;
    if (found) {
      res.status = SearchStatus::kFound;
      ImmersionMap m{pattern_, host_, image_, walks_};
      res.map = std::move(m);
    } else {
      res.status = exhausted_ ? SearchStatus::kBudgetExhausted : SearchStatus::kNotFound;
    }
    return res;
  }

 private:
  struct Action {
    bool place;  // true: place vertex `id`; false: route edge `id`
    int id;
  };

  void plan() {
    const MultiGraph& h = *pattern_;
    std::vector<bool> placed(static_cast<std::size_t>(h.vertex_count()), false);
    std::set<EdgeId> routed;
    int free = h.vertex_count();
    for (VertexId v = 0; v < h.vertex_count(); ++v)
      if (image_[v] != kNoVertex) {
        placed[v] = true;
        --free;
      }
    for (const auto& [e, w] : walks_) routed.insert(e);
    for (EdgeId e : h.edge_ids()) {
      auto [a, b] = h.ends(e);
      if (placed[a] && placed[b] && routed.insert(e).second) actions_.push_back({false, e});
    }
    for (int k = 0; k < free; ++k) {
      VertexId best = kNoVertex;
      int best_links = -1, best_deg = -1;
      for (VertexId v = 0; v < h.vertex_count(); ++v) {
        if (placed[v]) continue;
        int links = 0;
        for (EdgeId e : h.incident(v))
          if (placed[h.other_end(e, v)]) ++links;
        int deg = h.degree(v);
        if (links > best_links || (links == best_links && deg > best_deg)) {
          best = v;
          best_links = links;
          best_deg = deg;
        }
      }
      placed[best] = true;
      actions_.push_back({true, best});
      for (EdgeId e : h.incident(best)) {
        VertexId o = h.other_end(e, best);
        if (placed[o] && routed.insert(e).second) actions_.push_back({false, e});
      }
    }
  }

  bool tick() {
    if (++expansions_ > budget_) {
      exhausted_ = true;
      return false;
    }
    return true;
  }

  bool step(std::size_t k) {
    if (exhausted_) return false;
    if (k == actions_.size()) return true;
    const Action& a = actions_[k];
    return a.place ? place(k, a.id) : route(k, a.id);
  }

  bool place(std::size_t k, VertexId x) {
    const MultiGraph& g = *host_;
    int need = pattern_->degree(x);
    for (VertexId y = 0; y < g.vertex_count(); ++y) {
      if (!allowed_root_[y] || preimage_[y] != kNoVertex || on_walks_[y] > 0) continue;
      if (g.degree(y) < need) continue;
      if (!tick()) return false;
      image_[x] = y;
      preimage_[y] = x;
      if (step(k + 1)) return true;
      image_[x] = kNoVertex;
      preimage_[y] = kNoVertex;
      if (exhausted_) return false;
    }
    return false;
  }

  // BFS distances to `target` over unused edges, avoiding forbidden vertices.
  std::vector<int> distances_to(VertexId target, VertexId source) const {
    const MultiGraph& g = *host_;
    std::vector<int> dist(static_cast<std::size_t>(g.vertex_count()),
                          std::numeric_limits<int>::max());
    std::deque<VertexId> q{target};
    dist[target] = 0;
    while (!q.empty()) {
      VertexId u = q.front();
      q.pop_front();
      if (u != target && u != source && forbidden(u)) continue;
      for (EdgeId e : g.incident(u)) {
        if (used_edge_[e]) continue;
        VertexId w = g.other_end(e, u);
        if (dist[w] != std::numeric_limits<int>::max()) continue;
        dist[w] = dist[u] + 1;
        q.push_back(w);
      }
    }
    return dist;
  }

  bool forbidden(VertexId y) const { return preimage_[y] != kNoVertex; }

  bool route(std::size_t k, EdgeId e) {
    const MultiGraph& g = *host_;
    auto [a, b] = pattern_->ends(e);
    VertexId src = image_[a], dst = image_[b];
    auto dist = distances_to(dst, src);
    int max_len = g.vertex_count();
    if (src != dst && dist[src] == std::numeric_limits<int>::max()) return false;
    int min_len = src == dst ? 1 : dist[src];
    for (int len = min_len; len <= max_len; ++len) {
      Walk cur = Walk::single(src);
      visited_[src] = true;
      bool ok = extend(k, e, cur, dst, len, dist);
      visited_[src] = false;
      if (ok) return true;
      if (exhausted_) return false;
    }
    return false;
  }

  // Depth-first extension of `cur` to exactly `len` edges ending at dst.
  bool extend(std::size_t k, EdgeId pe, Walk& cur, VertexId dst, int len,
              const std::vector<int>& dist) {
    const MultiGraph& g = *host_;
    VertexId at = cur.back();
    int depth = cur.length();
    if (depth == len) {
      if (at != dst) return false;
      // visited_ belongs to this routing only; later routings start clean
      for (std::size_t i = 0; i + 1 < cur.vertices.size(); ++i) visited_[cur.vertices[i]] = false;
      commit(pe, cur);
      bool ok = step(k + 1);
      if (!ok) uncommit(pe);
      for (std::size_t i = 0; i + 1 < cur.vertices.size(); ++i) visited_[cur.vertices[i]] = true;
      return ok;
    }
    if (!tick()) return false;
    std::set<VertexId> tried;
    for (EdgeId d : g.incident(at)) {
      if (used_edge_[d]) continue;
      VertexId w = g.other_end(d, at);
      if (w == at) {
        // a loop only closes a length-one cycle
        if (!(len == 1 && at == dst)) continue;
      } else {
        bool closing = depth + 1 == len;
        if (w == dst) {
          if (!closing) continue;
        } else {
          if (closing || visited_[w] || forbidden(w)) continue;
          if (dist[w] == std::numeric_limits<int>::max() || depth + 1 + dist[w] > len) continue;
        }
      }
      // parallel unused edges towards the same neighbour are interchangeable
      if (!tried.insert(w).second) continue;
      used_edge_[d] = true;
      cur.edges.push_back(d);
      cur.vertices.push_back(w);
      bool mark = w != dst;
      if (mark) visited_[w] = true;
      bool ok = extend(k, pe, cur, dst, len, dist);
      if (mark) visited_[w] = false;
      cur.vertices.pop_back();
      cur.edges.pop_back();
      used_edge_[d] = false;
      if (ok) return true;
      if (exhausted_) return false;
    }
    return false;
  }

  // Edges of a committed walk stay marked by the extend() frames above.
  void commit(EdgeId pe, const Walk& w) {
    walks_[pe] = w;
    std::set<VertexId> vs(w.vertices.begin(), w.vertices.end());
    for (VertexId v : vs) ++on_walks_[v];
  }

  void uncommit(EdgeId pe) {
    const Walk& w = walks_.at(pe);
    std::set<VertexId> vs(w.vertices.begin(), w.vertices.end());
    for (VertexId v : vs) --on_walks_[v];
    walks_.erase(pe);
  }

  GraphPtr host_, pattern_;
  std::uint64_t budget_;
  std::uint64_t expansions_ = 0;
  bool exhausted_ = false;
  std::vector<Action> actions_;
  std::vector<VertexId> image_, preimage_;
  std::vector<int> on_walks_;
  std::vector<bool> used_edge_, visited_, allowed_root_;
  std::map<EdgeId, Walk> walks_;
};

}  // namespace

ImmersionSearchResult find_immersion(GraphPtr host, GraphPtr pattern,
                                     const ImmersionSearchOptions& options) {
  if (options.budget == 0) throw ParameterError("search budget must be positive");
  if (!host || !pattern) throw ParameterError("find_immersion needs both graphs");
  ImmersionSearch search(std::move(host), std::move(pattern), options);
  return search.run();
}

}  // namespace forge
