#include "forge/generators.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "forge/errors.hpp"

namespace forge {

VertexId GridLabeling::at(int i, int j) const {
  if (i < 1 || i > g || j < 1 || j > g)
    throw ParameterError("grid label (" + std::to_string(i) + "," + std::to_string(j) + ") out of range");
  return (i - 1) * g + (j - 1);
}

std::pair<MultiGraph, GridLabeling> grid(int g) {
  if (g < 2) throw ParameterError("grid side must be at least 2, got " + std::to_string(g));
  GridLabeling lab{g};
  std::vector<std::pair<VertexId, VertexId>> es;
  for (int i = 1; i <= g; ++i)
    for (int j = 1; j <= g; ++j) {
      if (j < g) es.emplace_back(lab.at(i, j), lab.at(i, j + 1));
      if (i < g) es.emplace_back(lab.at(i, j), lab.at(i + 1, j));
    }
  return {MultiGraph::build(g * g, es), lab};
}

std::pair<MultiGraph, Wall> elementary_wall(int h) {
  auto lay = wall_layout(h);
  auto host = share(lay->graph());
  return {lay->graph(), Wall::from_subdivision_map(identity_immersion(host), h)};
}

ImmersionMap SubdivisionRecord::as_immersion(GraphPtr original, GraphPtr subdivided) const {
  ImmersionMap m;
  m.pattern = std::move(original);
  m.host = std::move(subdivided);
  m.vertex_map = vertex_images;
  m.edge_map = edge_paths;
  return m;
}

std::pair<MultiGraph, SubdivisionRecord> subdivide(const MultiGraph& g,
                                                   const std::map<EdgeId, int>& plan) {
  for (auto [e, k] : plan) {
    if (!g.has_edge(e)) throw QueryError("subdivision plan names unknown edge " + std::to_string(e));
    if (k < 0) throw ParameterError("negative subdivision count for edge " + std::to_string(e));
  }
  SubdivisionRecord rec;
  const int n = g.vertex_count();
  rec.vertex_images.resize(static_cast<std::size_t>(n));
  for (VertexId v = 0; v < n; ++v) rec.vertex_images[v] = v;
  std::vector<std::pair<VertexId, VertexId>> es;
  int fresh = n;
  for (EdgeId e : g.edge_ids()) {
    auto [u, v] = g.ends(e);
    auto it = plan.find(e);
    int k = it == plan.end() ? 0 : it->second;
    Walk p = Walk::single(u);
    VertexId prev = u;
    for (int c = 0; c <= k; ++c) {
      VertexId next = c == k ? v : fresh++;
      p.edges.push_back(static_cast<EdgeId>(es.size()));
      p.vertices.push_back(next);
      es.emplace_back(prev, next);
      prev = next;
    }
    rec.edge_paths[e] = std::move(p);
  }
  return {MultiGraph::build(fresh, es), std::move(rec)};
}

std::pair<MultiGraph, SubdivisionRecord> subdivide_all(const MultiGraph& g, int count) {
  std::map<EdgeId, int> plan;
  for (EdgeId e : g.edge_ids()) plan[e] = count;
  return subdivide(g, plan);
}

MultiGraph quad_star(int leaves) {
  if (leaves < 1) throw ParameterError("quad star needs at least one leaf");
  std::vector<std::pair<VertexId, VertexId>> es;
  for (VertexId l = 1; l <= leaves; ++l)
    for (int k = 0; k < 4; ++k) es.emplace_back(0, l);
  return MultiGraph::build(leaves + 1, es);
}

std::pair<MultiGraph, FinSystem> wall_with_fins(int h, const std::vector<FinSpec>& specs,
                                                const FinFixtureOptions& options) {
  auto lay = wall_layout(h);
  if (static_cast<int>(specs.size()) > h - 1)
    throw ParameterError("a wall of height " + std::to_string(h) + " has only " + std::to_string(h - 1) +
                         " diagonal vertices");
  std::set<int> rows;
  for (const FinSpec& f : specs) {
    if (f.row < 2 || f.row > h) throw ParameterError("fin row " + std::to_string(f.row) + " is not diagonal");
    if (!rows.insert(f.row).second) throw ParameterError("two fins on row " + std::to_string(f.row));
    if (f.internal < 0) throw ParameterError("negative fin length");
  }

  MultiGraph base = lay->graph();
  std::vector<Walk> bs;
  if (options.subdivide > 0) {
    auto [sg, rec] = subdivide_all(base, options.subdivide);
    base = std::move(sg);
    for (std::size_t e = 0; e < lay->edges().size(); ++e) bs.push_back(rec.edge_paths.at(static_cast<EdgeId>(e)));
  } else {
    for (std::size_t e = 0; e < lay->edges().size(); ++e)
      bs.push_back(Walk{{lay->edges()[e].first, lay->edges()[e].second}, {static_cast<EdgeId>(e)}});
  }
  std::vector<VertexId> imgs(static_cast<std::size_t>(lay->vertex_count()));
  for (int k = 0; k < lay->vertex_count(); ++k) imgs[k] = k;
  const Wall w0 = Wall::from_branches(share(base), h, imgs, bs);

  std::set<VertexId> roots;
  for (const FinSpec& f : specs) roots.insert(w0.at({f.row, 2 * f.row}));

  std::mt19937 rng(options.seed);
  std::set<VertexId> taken;
  std::vector<VertexId> targets;
  for (const FinSpec& f : specs) {
    VertexId s = w0.at({f.row, 2 * f.row});
    if (f.target) {
      VertexId t = w0.at(*f.target);
      if (roots.count(t) || taken.count(t))
        throw ParameterError("fin target " + to_string(*f.target) + " is a root or already taken");
      taken.insert(t);
      targets.push_back(t);
      continue;
    }
    auto dist = wall_distances_from(w0, s);
    auto around = surround(w0, s);
    std::vector<VertexId> pool;
    int best = -1;
    for (auto [t, d] : dist) {
      if (roots.count(t) || taken.count(t) || around.count(t)) continue;
      bool far = f.attachment != FinAttachment::kNear;
      int score = far ? d : (d == options.near_distance ? 0 : -1);
      if (score < 0 || score < best) continue;
      if (score > best) pool.clear();
      best = score;
      pool.push_back(t);
    }
    if (pool.empty())
      throw ParameterError("no admissible target for the fin on row " + std::to_string(f.row));
    VertexId t = pool[rng() % pool.size()];
    taken.insert(t);
    targets.push_back(t);
  }

  // fin paths on fresh vertices
  MultiGraph g = base;
  VertexId hub = kNoVertex;
  bool any_hub = std::any_of(specs.begin(), specs.end(),
                             [](const FinSpec& f) { return f.attachment == FinAttachment::kSharedHub; });
  if (any_hub) {
    hub = g.vertex_count();
    g = g.add_vertices(1);
  }
  std::vector<Fin> fins;
  for (std::size_t k = 0; k < specs.size(); ++k) {
    const FinSpec& f = specs[k];
    VertexId s = w0.at({f.row, 2 * f.row}), t = targets[k];
    std::vector<VertexId> mid;
    if (f.attachment == FinAttachment::kSharedHub) {
      mid.push_back(hub);
    } else {
      VertexId first = g.vertex_count();
      g = g.add_vertices(f.internal);
      for (int c = 0; c < f.internal; ++c) mid.push_back(first + c);
    }
    mid.push_back(t);
    Walk p = Walk::single(s);
    for (VertexId x : mid) {
      auto [ng, e] = g.add_edge(p.back(), x);
      g = std::move(ng);
      p.edges.push_back(e);
      p.vertices.push_back(x);
    }
    fins.push_back(Fin{s, std::move(p), t});
  }

  auto host = share(g);
  FinSystem fs{std::make_shared<const Wall>(Wall::from_branches(host, h, imgs, bs)), std::move(fins)};
  auto problems = validate_fin_system(fs);
  if (!problems.empty()) throw Error("generated fin system is invalid: " + problems.front().message);
  return {g, std::move(fs)};
}

}  // namespace forge
