#include "forge/treedecomp.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <deque>
#include <limits>
#include <set>

#include "forge/errors.hpp"

namespace forge {

const std::vector<VertexId>& TreeDecomposition::bag(int t) const {
  static const std::vector<VertexId> empty;
  auto it = bags.find(t);
  return it == bags.end() ? empty : it->second;
}

namespace {

bool is_tree(const MultiGraph& t) {
  const int n = t.vertex_count();
  if (n == 0 || t.edge_count() != n - 1) return false;
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  std::deque<VertexId> q{0};
  seen[0] = true;
  int reached = 1;
  while (!q.empty()) {
    VertexId u = q.front();
    q.pop_front();
    for (EdgeId e : t.incident(u)) {
      VertexId w = t.other_end(e, u);
      if (!seen[w]) {
        seen[w] = true;
        ++reached;
        q.push_back(w);
      }
    }
  }
  return reached == n;
}

// Tree path from a to b as a node list.
std::vector<int> tree_path(const MultiGraph& t, int a, int b) {
  std::vector<int> parent(static_cast<std::size_t>(t.vertex_count()), -1);
  std::deque<int> q{a};
  parent[a] = a;
  while (!q.empty()) {
    int u = q.front();
    q.pop_front();
    if (u == b) break;
    for (EdgeId e : t.incident(u)) {
      int w = t.other_end(e, u);
      if (parent[w] < 0) {
        parent[w] = u;
        q.push_back(w);
      }
    }
  }
  std::vector<int> path{b};
  while (path.back() != a) path.push_back(parent[path.back()]);
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace

Verdict verify_decomposition(const MultiGraph& g, const TreeDecomposition& d) {
  Verdict out;
  const int nt = d.tree.vertex_count();
  for (const auto& [t, b] : d.bags)
    if (t < 0 || t >= nt) throw InputError("bag for unknown tree node " + std::to_string(t));
  bool tree = is_tree(d.tree);
  if (!tree) out.violations.push_back({1, "T is not a tree", {}});

  std::vector<std::set<int>> holders(static_cast<std::size_t>(g.vertex_count()));
  for (const auto& [t, b] : d.bags)
    for (VertexId v : b) {
      if (!g.has_vertex(v)) {
        out.violations.push_back({2, "bag " + std::to_string(t) + " holds non-vertex " + std::to_string(v), {t, v}});
        continue;
      }
      holders[v].insert(t);
    }
  for (VertexId v = 0; v < g.vertex_count(); ++v)
    if (holders[v].empty()) out.violations.push_back({3, "vertex " + std::to_string(v) + " is in no bag", {v}});
  for (EdgeId e : g.edge_ids()) {
    auto [a, b] = g.ends(e);
    bool together = false;
    for (int t : holders[a]) together |= holders[b].count(t) > 0;
    if (!together)
      out.violations.push_back(
          {4, "edge " + std::to_string(e) + " (" + std::to_string(a) + "," + std::to_string(b) + ") is in no bag",
           {e}});
  }
  if (!tree) return out;
  // the nodes holding v must induce a connected subtree
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    const auto& hs = holders[v];
    if (hs.size() < 2) continue;
    int a = *hs.begin();
    for (int b : hs) {
      auto path = tree_path(d.tree, a, b);
      auto gap = std::find_if(path.begin(), path.end(), [&](int t) { return !hs.count(t); });
      if (gap != path.end()) {
        out.violations.push_back({5,
                                  "vertex " + std::to_string(v) + " is in bags " + std::to_string(a) + " and " +
                                      std::to_string(b) + " but not in " + std::to_string(*gap),
                                  {a, *gap, b, v}});
        break;
      }
    }
  }
  return out;
}

int width(const TreeDecomposition& d) {
  if (d.tree.vertex_count() == 0) throw ParameterError("decomposition has no nodes");
  int w = -1;
  for (int t = 0; t < d.tree.vertex_count(); ++t) w = std::max(w, static_cast<int>(d.bag(t).size()) - 1);
  return w;
}

TreeDecomposition decomposition_from_order(const MultiGraph& g, const std::vector<VertexId>& order) {
  const int n = g.vertex_count();
  if (static_cast<int>(order.size()) != n) throw ParameterError("elimination order must list every vertex once");
  std::vector<int> pos(static_cast<std::size_t>(n), -1);
  for (int k = 0; k < n; ++k) {
    VertexId v = order[k];
    if (v < 0 || v >= n || pos[v] >= 0) throw ParameterError("elimination order must list every vertex once");
    pos[v] = k;
  }
  TreeDecomposition d;
  if (n == 0) {
    d.tree = MultiGraph::build(1, {});
    return d;
  }
  std::vector<std::set<VertexId>> nb(static_cast<std::size_t>(n));
  for (EdgeId e : g.edge_ids()) {
    auto [a, b] = g.ends(e);
    if (a == b) continue;
    nb[a].insert(b);
    nb[b].insert(a);
  }
  // node k holds order[k] and its later neighbours in the fill graph
  std::vector<std::pair<VertexId, VertexId>> tes;
  std::vector<int> roots;
  for (int k = 0; k < n; ++k) {
    VertexId v = order[k];
    std::vector<VertexId> later;
    for (VertexId w : nb[v])
      if (pos[w] > k) later.push_back(w);
    for (VertexId a : later)
      for (VertexId b : later)
        if (a != b) nb[a].insert(b);
    std::vector<VertexId> bag{v};
    bag.insert(bag.end(), later.begin(), later.end());
    std::sort(bag.begin(), bag.end());
    d.bags[k] = bag;
    if (later.empty()) {
      roots.push_back(k);
    } else {
      int parent = n;
      for (VertexId w : later) parent = std::min(parent, pos[w]);
      tes.emplace_back(k, parent);
    }
  }
  for (std::size_t r = 1; r < roots.size(); ++r) tes.emplace_back(roots[r - 1], roots[r]);
  d.tree = MultiGraph::build(n, tes);
  return d;
}

namespace {

using Mask = std::uint32_t;

struct Table {
  int n;
  std::vector<Mask> adj;
  std::vector<int> tw;
  std::vector<signed char> last;  // vertex eliminated last within the subset
};

// |Q(S, v)|: vertices outside S+v reachable from v through S.
int q_size(const Table& t, Mask s, int v) {
  Mask seen = Mask{1} << v, frontier = seen, out = 0;
  while (frontier) {
    int u = std::countr_zero(frontier);
    frontier &= frontier - 1;
    Mask nb = t.adj[u] & ~seen;
    seen |= nb;
    out |= nb & ~s;
    frontier |= nb & s;
  }
  return std::popcount(out);
}

void solve(Table& t, Mask s) {
  int best = std::numeric_limits<int>::max(), arg = -1;
  for (Mask rest = s; rest; rest &= rest - 1) {
    int v = std::countr_zero(rest);
    Mask prev = s & ~(Mask{1} << v);
    int val = std::max(t.tw[prev], q_size(t, prev, v));
    if (val < best) {
      best = val;
      arg = v;
    }
  }
  t.tw[s] = best;
  t.last[s] = static_cast<signed char>(arg);
}

Table make_table(const MultiGraph& g, int limit) {
  const int n = g.vertex_count();
  if (limit > 24) throw ParameterError("exact tree-width limit above 24 vertices is not supported");
  if (n > limit)
    throw ParameterError("exact tree-width refused: " + std::to_string(n) + " vertices exceeds the limit of " +
                         std::to_string(limit) + "; heuristic bounds are out of scope");
  Table t{n, std::vector<Mask>(static_cast<std::size_t>(n), 0), {}, {}};
  for (EdgeId e : g.edge_ids()) {
    auto [a, b] = g.ends(e);
    if (a == b) continue;
    t.adj[a] |= Mask{1} << b;
    t.adj[b] |= Mask{1} << a;
  }
  t.tw.assign(std::size_t{1} << n, -1);
  t.last.assign(std::size_t{1} << n, -1);
  return t;
}

TreewidthResult finish(const MultiGraph& g, const Table& t) {
  TreewidthResult r;
  Mask full = t.n == 0 ? 0 : static_cast<Mask>((std::uint64_t{1} << t.n) - 1);
  r.width = t.tw[full];
  std::vector<VertexId> rev;
  for (Mask s = full; s; s &= ~(Mask{1} << t.last[s])) rev.push_back(t.last[s]);
  r.order.assign(rev.rbegin(), rev.rend());
  r.decomposition = decomposition_from_order(g, r.order);
  return r;
}

}  // namespace

TreewidthResult exact_treewidth_serial(const MultiGraph& g, int limit) {
  Table t = make_table(g, limit);
  const Mask end = static_cast<Mask>(std::uint64_t{1} << t.n);
  for (Mask s = 1; s < end; ++s) solve(t, s);
  return finish(g, t);
}

TreewidthResult exact_treewidth(const MultiGraph& g, int limit) {
  Table t = make_table(g, limit);
  const int n = t.n;
  // subsets grouped by size; every subset only reads the previous layer
  std::vector<std::vector<Mask>> layers(static_cast<std::size_t>(n + 1));
  for (Mask s = 1; s < static_cast<Mask>(std::uint64_t{1} << n); ++s) layers[std::popcount(s)].push_back(s);
  for (int k = 1; k <= n; ++k) {
    const auto& layer = layers[k];
    const long count = static_cast<long>(layer.size());
#pragma omp parallel for schedule(static)
    for (long i = 0; i < count; ++i) solve(t, layer[static_cast<std::size_t>(i)]);
  }
  return finish(g, t);
}

}  // namespace forge
