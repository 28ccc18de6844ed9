#include "forge/lifting.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "forge/errors.hpp"

namespace forge {

std::string to_string(const LiftRecord& r) {
  std::ostringstream os;
  os << "lift " << r.v << ": -" << r.d1 << " -" << r.d2 << " +" << r.d0 << "(" << r.u1 << "," << r.u2 << ")";
  return os.str();
}

std::pair<MultiGraph, LiftRecord> lift_pair(const MultiGraph& g, VertexId v, EdgeId d1, EdgeId d2) {
  if (!g.has_vertex(v)) throw ParameterError("lift at unknown vertex " + std::to_string(v));
  if (d1 == d2) throw ParameterError("lift needs two distinct edges");
  for (EdgeId d : {d1, d2})
    if (!g.has_edge(d) || !g.is_incident(d, v))
      throw ParameterError("edge " + std::to_string(d) + " is not incident with " + std::to_string(v));
  LiftRecord r;
  r.v = v;
  r.d1 = d1;
  r.d2 = d2;
  r.u1 = g.other_end(d1, v);
  r.u2 = g.other_end(d2, v);
  auto [h, d0] = g.delete_edges({d1, d2}).add_edge(r.u1, r.u2);
  r.d0 = d0;
  return {std::move(h), r};
}

namespace {

bool shape_ok(const MultiGraph& h, EdgeId e, const Walk& w) {
  return h.is_loop(e) ? w.is_cycle() : w.is_path();
}

Walk detour(const Walk& w, const LiftRecord& r) {
  Walk out = Walk::single(w.front());
  for (std::size_t i = 0; i < w.edges.size(); ++i) {
    VertexId x = w.vertices[i], y = w.vertices[i + 1];
    if (w.edges[i] == r.d0) {
      bool forward = x == r.u1 && y == r.u2;
      out.edges.push_back(forward ? r.d1 : r.d2);
      out.vertices.push_back(r.v);
      out.edges.push_back(forward ? r.d2 : r.d1);
    } else {
      out.edges.push_back(w.edges[i]);
    }
    out.vertices.push_back(y);
  }
  return out;
}

// Cuts closed sub-walks out of a closed walk until it is a cycle through
// its base vertex.
Walk shortcut_cycle(Walk w) {
  for (;;) {
    const std::size_t last = w.vertices.size() - 1;
    std::map<VertexId, std::size_t> at;
    bool cut = false;
    for (std::size_t j = 0; j <= last && !cut; ++j) {
      auto it = at.find(w.vertices[j]);
      if (it != at.end() && !(it->second == 0 && j == last)) {
        std::size_t i = it->second;
        w.vertices.erase(w.vertices.begin() + static_cast<long>(i) + 1, w.vertices.begin() + static_cast<long>(j) + 1);
        w.edges.erase(w.edges.begin() + static_cast<long>(i), w.edges.begin() + static_cast<long>(j));
        cut = true;
      } else {
        at[w.vertices[j]] = j;
      }
    }
    if (!cut) return w;
  }
}

std::vector<PullBackFailure> failures_of(const ImmersionMap& m, const LiftRecord& r) {
  const MultiGraph& h = *m.pattern;
  std::vector<PullBackFailure> out;
  VertexId owner = kNoVertex;  // pattern vertex sitting on v
  for (VertexId x = 0; x < h.vertex_count(); ++x)
    if (m.vertex_map[x] == r.v) owner = x;
  for (const auto& [e, w] : m.edge_map) {
    if (!shape_ok(h, e, w)) {
      out.push_back({e, h.is_loop(e) ? 3 : 2, "walk of edge " + std::to_string(e) + " already visits " + std::to_string(r.v)});
      continue;
    }
    if (owner != kNoVertex && !h.is_incident(e, owner) && w.contains_vertex(r.v))
      out.push_back({e, 4, "walk of edge " + std::to_string(e) + " passes " + std::to_string(r.v) +
                              ", the image of pattern vertex " + std::to_string(owner)});
  }
  return out;
}

}  // namespace

PullBackResult pull_back(const ImmersionMap& m, const LiftRecord& rec, GraphPtr original) {
  ImmersionMap out{m.pattern, std::move(original), m.vertex_map, {}};
  for (const auto& [e, w] : m.edge_map) out.edge_map[e] = detour(w, rec);
  PullBackResult r;
  r.failures = failures_of(out, rec);
  if (r.failures.empty()) {
    if (!verify(out).ok()) throw Error("pulled back map fails verification");
    r.map = std::move(out);
  }
  return r;
}

PullBackResult pull_back_rerouted(const ImmersionMap& m, const LiftRecord& rec, GraphPtr original,
                                  std::uint64_t budget) {
  PullBackResult first = pull_back(m, rec, original);
  if (first.ok()) return first;
  const MultiGraph& h = *m.pattern;
  ImmersionMap out{m.pattern, original, m.vertex_map, {}};
  for (const auto& [e, w] : m.edge_map) {
    Walk d = detour(w, rec);
    if (!shape_ok(h, e, d)) d = h.is_loop(e) ? shortcut_cycle(d) : shortcut_to_path(d);
    out.edge_map[e] = std::move(d);
  }
  auto left = failures_of(out, rec);
  if (left.empty()) {
    if (!verify(out).ok()) throw Error("re-routed map fails verification");
    PullBackResult r;
    r.map = std::move(out);
    return r;
  }
  // route the offending walks again around the fixed rest
  ImmersionSearchOptions opt;
  opt.budget = budget;
  opt.fixed_vertices = out.vertex_map;
  opt.fixed_walks = out.edge_map;
  for (const auto& f : left) opt.fixed_walks.erase(f.pattern_edge);
  auto found = find_immersion(original, m.pattern, opt);
  PullBackResult r;
  if (found.status == SearchStatus::kFound) {
    r.map = std::move(*found.map);
    return r;
  }
  r.failures = std::move(left);
  r.failures.push_back({kNoEdge, 0,
                        "joint re-route of the failing walks: " + to_string(found.status)});
  return r;
}

long crossing_measure(const ImmersionMap& m) {
  std::map<VertexId, long> count;
  for (const auto& [e, w] : m.edge_map)
    for (std::size_t i = 1; i + 1 < w.vertices.size(); ++i) ++count[w.vertices[i]];
  long total = 0;
  for (auto [v, c] : count) total += c * (c - 1) / 2;
  return total;
}

std::optional<Walk> truncate_at_first_contact(const Walk& f, const std::set<VertexId>& stop) {
  for (std::size_t i = 1; i < f.vertices.size(); ++i)
    if (stop.count(f.vertices[i])) {
      Walk out;
      out.vertices.assign(f.vertices.begin(), f.vertices.begin() + static_cast<long>(i) + 1);
      out.edges.assign(f.edges.begin(), f.edges.begin() + static_cast<long>(i));
      return out;
    }
  return std::nullopt;
}

std::set<VertexId> image_without(const ImmersionMap& m, VertexId s) {
  const MultiGraph& h = *m.pattern;
  std::set<VertexId> out;
  for (VertexId x = 0; x < h.vertex_count(); ++x)
    if (x != s) out.insert(m.vertex_map[x]);
  for (const auto& [e, w] : m.edge_map)
    if (!h.is_incident(e, s)) out.insert(w.vertices.begin(), w.vertices.end());
  return out;
}

std::set<EdgeId> image_edges(const ImmersionMap& m) {
  std::set<EdgeId> out;
  for (const auto& [e, w] : m.edge_map) out.insert(w.edges.begin(), w.edges.end());
  return out;
}

namespace {

long fin_length(const std::map<int, Walk>& fins) {
  long total = 0;
  for (const auto& [s, f] : fins) total += f.length();
  return total;
}

void check_crossings(const ImmersionMap& m, const std::set<int>& s0) {
  const MultiGraph& h = *m.pattern;
  std::map<VertexId, std::vector<EdgeId>> at;
  for (const auto& [e, w] : m.edge_map)
    for (std::size_t i = 1; i + 1 < w.vertices.size(); ++i) at[w.vertices[i]].push_back(e);
  for (const auto& [v, es] : at)
    for (std::size_t a = 0; a < es.size(); ++a)
      for (std::size_t b = a + 1; b < es.size(); ++b) {
        auto [p, q] = h.ends(es[a]);
        auto [r, s] = h.ends(es[b]);
        bool shared = false;
        for (VertexId x : {p, q})
          if (s0.count(x) && (x == r || x == s)) shared = true;
        if (!shared)
          throw HypothesisError("edges " + std::to_string(es[a]) + " and " + std::to_string(es[b]) +
                                    " of the wall cross at vertex " + std::to_string(v) +
                                    " without a common end in the root set",
                                {es[a], es[b]});
      }
}

// Cuts every fin at its first contact with the rest of the wall image.
void truncate_fins(const ImmersionMap& m, std::map<int, Walk>& fins) {
  for (auto& [s, f] : fins) {
    auto cut = truncate_at_first_contact(f, image_without(m, s));
    if (!cut) throw Error("fin of root " + std::to_string(s) + " lost contact with the wall");
    f = std::move(*cut);
  }
}

}  // namespace

ReductionResult reduce_immersed_wall(const ImmersionMap& m0, int h, const std::set<int>& s0,
                                     const std::map<int, Walk>& fins_in) {
  auto lay = wall_layout(h);
  const MultiGraph& w0 = lay->graph();
  if (!m0.pattern || m0.pattern->vertex_count() != w0.vertex_count() || m0.pattern->edge_count() != w0.edge_count())
    throw InputError("map does not immerse the elementary wall of height " + std::to_string(h));
  if (!verify(m0).ok()) throw PreconditionError("initial wall map does not verify");
  auto diag = lay->diagonal();
  for (int s : s0) {
    if (std::find(diag.begin(), diag.end(), s) == diag.end())
      throw PreconditionError("root " + std::to_string(s) + " is not a diagonal vertex");
    if (!fins_in.count(s)) throw PreconditionError("root " + std::to_string(s) + " has no fin");
  }
  for (EdgeId e : w0.edge_ids()) {
    auto [a, b] = w0.ends(e);
    if (s0.count(a) && s0.count(b)) throw PreconditionError("wall edge " + std::to_string(e) + " has both ends in S0");
  }
  std::map<int, Walk> fins;
  {
    auto wall_edges = image_edges(m0);
    for (int s : s0) {
      const Walk& f = fins_in.at(s);
      if (!f.is_valid_in(*m0.host) || !f.is_path() || f.length() < 1 || f.front() != m0.vertex_map[s])
        throw PreconditionError("fin of root " + std::to_string(s) + " is not a path from its image");
      for (EdgeId e : f.edges)
        if (wall_edges.count(e)) throw PreconditionError("fin of root " + std::to_string(s) + " uses wall edge " + std::to_string(e));
      if (!image_without(m0, s).count(f.back()))
        throw PreconditionError("fin of root " + std::to_string(s) + " does not end on the rest of the wall");
      fins[s] = f;
    }
  }

  ReductionResult res;
  ImmersionMap m = m0;
  res.graphs.push_back(m.host);
  truncate_fins(m, fins);
  res.measures.emplace_back(crossing_measure(m), fin_length(fins));
  for (;;) {
    check_crossings(m, s0);
    // lowest crossing vertex, then the lowest edge through it
    std::map<VertexId, std::vector<EdgeId>> at;
    for (const auto& [e, w] : m.edge_map)
      for (std::size_t i = 1; i + 1 < w.vertices.size(); ++i) at[w.vertices[i]].push_back(e);
    VertexId v = kNoVertex;
    EdgeId e1 = kNoEdge;
    for (const auto& [x, es] : at)
      if (es.size() >= 2) {
        v = x;
        e1 = *std::min_element(es.begin(), es.end());
        break;
      }
    if (v == kNoVertex) break;

    Walk& w = m.edge_map.at(e1);
    std::size_t p = static_cast<std::size_t>(std::find(w.vertices.begin(), w.vertices.end(), v) - w.vertices.begin());
    auto [g2, rec] = lift_pair(*m.host, v, w.edges[p - 1], w.edges[p]);
    Walk nw;
    nw.vertices = w.vertices;
    nw.vertices.erase(nw.vertices.begin() + static_cast<long>(p));
    nw.edges = w.edges;
    nw.edges[p - 1] = rec.d0;
    nw.edges.erase(nw.edges.begin() + static_cast<long>(p));
    w = std::move(nw);
    m.host = share(std::move(g2));
    res.history.push_back(rec);
    res.graphs.push_back(m.host);

    if (!verify(m).ok()) throw Error("lift produced a map that fails verification");
    truncate_fins(m, fins);
    res.measures.emplace_back(crossing_measure(m), fin_length(fins));
    if (!(res.measures.back() < res.measures[res.measures.size() - 2]))
      throw Error("induction measure did not decrease");
  }

  res.map = m;
  auto wall = std::make_shared<const Wall>(Wall::from_subdivision_map(m, h));
  res.fins.wall = wall;
  std::set<VertexId> root_images;
  for (int s : s0) root_images.insert(m.vertex_map[s]);
  for (const auto& [s, f] : fins) {
    if (root_images.count(f.back())) {
      res.dropped.push_back(s);
      continue;
    }
    res.fins.fins.push_back(Fin{m.vertex_map[s], f, f.back()});
    res.fin_roots.push_back(s);
  }
  auto problems = validate_fin_system(res.fins);
  if (!problems.empty()) throw Error("reduced fin system is invalid: " + problems.front().message);
  return res;
}

}  // namespace forge
