#include <algorithm>

#include "forge/connectivity.hpp"
#include "forge/errors.hpp"
#include "pipeline_internal.hpp"

namespace forge {

namespace {

std::string vname(VertexId v) { return std::to_string(v); }

// Shortest path from the image of x leaving through non-image edges and
// stopping at the first vertex of the rest of the image.
std::optional<Walk> initial_fin(const ImmersionMap& m, int x) {
  auto used = image_edges(m);
  std::vector<EdgeId> drop(used.begin(), used.end());
  MultiGraph free = m.host->delete_edges(drop);
  auto r = disjoint_paths_to_set(free, m.vertex_map[x], image_without(m, x), 1);
  if (!r.bundle) return std::nullopt;
  return r.bundle->paths.front();
}

}  // namespace

std::vector<std::string> check_growth_invariants(const ImmersionMap& m, const std::set<int>& s0,
                                                 const std::map<int, Walk>& fins) {
  std::vector<std::string> out;
  auto verdict = verify(m);
  for (const auto& v : verdict.violations) out.push_back("map: " + v.message);
  if (!verdict.ok()) return out;
  const MultiGraph& h = *m.pattern;
  std::map<VertexId, std::vector<EdgeId>> at;
  for (const auto& [e, w] : m.edge_map)
    for (std::size_t i = 1; i + 1 < w.vertices.size(); ++i) at[w.vertices[i]].push_back(e);
  for (const auto& [v, es] : at)
    for (std::size_t a = 0; a < es.size(); ++a)
      for (std::size_t b = a + 1; b < es.size(); ++b) {
        auto [p, q] = h.ends(es[a]);
        bool shared = false;
        for (VertexId x : {p, q})
          if (s0.count(x) && h.is_incident(es[b], x)) shared = true;
        if (!shared)
          out.push_back("edges " + std::to_string(es[a]) + " and " + std::to_string(es[b]) + " cross at " + vname(v) +
                        " without a common root");
      }
  for (int x : s0)
    if (x < 0 || x >= h.vertex_count() || h.degree(x) != 3) out.push_back("root " + std::to_string(x) + " is not a degree-3 wall vertex");
  auto used = image_edges(m);
  for (const auto& [x, f] : fins) {
    if (!s0.count(x)) {
      out.push_back("fin for non-root " + std::to_string(x));
      continue;
    }
    std::string tag = "fin of root " + std::to_string(x) + ": ";
    if (f.empty() || !f.is_valid_in(*m.host) || !f.is_path() || f.length() < 1) {
      out.push_back(tag + "not a path");
      continue;
    }
    if (f.front() != m.vertex_map[x]) out.push_back(tag + "does not start at the root image");
    if (!image_without(m, x).count(f.back())) out.push_back(tag + "does not end on the rest of the image");
    for (EdgeId e : f.edges)
      if (used.count(e)) {
        out.push_back(tag + "uses image edge " + std::to_string(e));
        break;
      }
  }
  return out;
}

GrowResult grow_rooted_wall(const MultiGraph& g, const Wall& w, const std::vector<VertexId>& s,
                            const PipelineConfig& cfg) {
  cfg.validate();
  if (s.size() < 2) throw PreconditionError("at least two roots are needed");
  const WallLayout& lay = w.layout();
  auto diag = lay.diagonal();
  GrowResult out;
  out.map = w.subdivision_map();
  for (VertexId v : s) {
    auto l = w.label_of(v);
    int k = l ? lay.index(*l) : -1;
    if (std::find(diag.begin(), diag.end(), k) == diag.end())
      throw PreconditionError("root " + vname(v) + " is not a diagonal vertex of the wall");
    out.s0.insert(k);
  }
  if (out.s0.size() != s.size()) throw PreconditionError("roots repeat");
  auto pw = pairwise_k_connected(g, s, 4);
  if (pw.failing)
    throw HypothesisError("roots " + vname(pw.failing->first) + " and " + vname(pw.failing->second) +
                              " are not 4-edge-connected",
                          *pw.failing);

  ImmersionMap& m = out.map;
  const MultiGraph& pat = *m.pattern;
  for (int x : out.s0)
    if (auto f = initial_fin(m, x)) {
      out.fins[x] = *f;
      out.initial.push_back(x);
    }

  for (int x : out.s0) {
    if (out.fins.count(x)) continue;
    const VertexId sx = m.vertex_map[x];
    const auto& inc = pat.incident(x);
    if (inc.size() != 3) throw Error("diagonal vertex without three wall edges");
    std::array<VertexId, 3> ends{};
    std::array<Walk, 3> seeds;
    for (int i = 0; i < 3; ++i) {
      EdgeId e = inc[i];
      VertexId y = pat.other_end(e, x);
      ends[i] = m.vertex_map[y];
      const Walk& b = m.edge_map.at(e);
      seeds[i] = b.front() == sx ? b : b.reversed();
    }
    std::array<Walk, 3> old = seeds;
    auto target = image_without(m, x);
    auto r = augment_with_prescribed_ends(*m.host, sx, target, ends, seeds);
    if (!r.bundle) {
      if (out.diagnostic.empty())
        out.diagnostic = "root " + vname(sx) + ": augmentation found only " + std::to_string(r.flow) +
                         " edge-disjoint paths to the rest of the image";
      continue;
    }
    GrowStep step;
    step.root = x;
    const auto& ps = r.bundle->paths;
    for (int i = 0; i < 3; ++i) {
      EdgeId e = inc[i];
      auto [a, b] = pat.ends(e);
      (void)b;
      step.branches[i] = a == x ? ps[i] : ps[i].reversed();
      m.edge_map[e] = step.branches[i];
    }
    step.fin = ps[3];
    out.fins[x] = ps[3];

    // fins of other roots that lost their end or now run over image edges
    auto used = image_edges(m);
    for (auto& [y, f] : out.fins) {
      if (y == x) continue;
      auto rest = image_without(m, y);
      Walk cur = f;
      if (!rest.count(cur.back())) {
        for (int i = 0; i < 3; ++i) {
          auto it = std::find(old[i].vertices.begin(), old[i].vertices.end(), cur.back());
          if (it == old[i].vertices.end()) continue;
          std::size_t p = static_cast<std::size_t>(it - old[i].vertices.begin());
          Walk suffix;
          suffix.vertices.assign(old[i].vertices.begin() + static_cast<long>(p), old[i].vertices.end());
          suffix.edges.assign(old[i].edges.begin() + static_cast<long>(p), old[i].edges.end());
          cur = cur.joined(suffix);
          step.repairs.push_back("fin of " + vname(m.vertex_map[y]) + " extended along the old branch to " +
                                 vname(ends[i]));
          break;
        }
      }
      auto cut = truncate_at_first_contact(cur, rest);
      if (!cut) throw Error("fin of " + vname(m.vertex_map[y]) + " cannot be repaired");
      Walk fixed = shortcut_to_path(*cut);
      if (fixed != f) {
        bool over = std::any_of(f.edges.begin(), f.edges.end(), [&](EdgeId e) { return used.count(e) > 0; });
        if (over) step.repairs.push_back("fin of " + vname(m.vertex_map[y]) + " cut before the new branches");
        f = std::move(fixed);
      }
    }
    auto bad = check_growth_invariants(m, out.s0, out.fins);
    if (!bad.empty()) throw Error("growing broke an invariant at " + vname(sx) + ": " + bad.front());
    out.steps.push_back(std::move(step));
  }
  return out;
}

}  // namespace forge
