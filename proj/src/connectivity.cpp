#include "forge/connectivity.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <map>

#include "forge/errors.hpp"

namespace forge {

std::vector<std::string> check_bundle(const MultiGraph& g, const EdgeDisjointBundle& b) {
  std::vector<std::string> out;
  std::set<EdgeId> seen;
  for (std::size_t i = 0; i < b.paths.size(); ++i) {
    const Walk& p = b.paths[i];
    std::string name = "path " + std::to_string(i);
    if (!p.is_valid_in(g)) {
      out.push_back(name + " is not a walk of the graph");
      continue;
    }
    if (!p.is_path()) out.push_back(name + " repeats a vertex");
    if (p.front() != b.source) out.push_back(name + " does not start at the source");
    for (EdgeId e : p.edges)
      if (!seen.insert(e).second) out.push_back(name + " reuses edge " + std::to_string(e));
  }
  return out;
}

namespace {

// Unit-capacity flow from one source into a set of targets. flow_[e] is +1
// or -1 when one unit runs along e from ends(e).u to ends(e).v or back.
// Target vertices only pass flow to the sink, so every flow path meets the
// target set exactly at its end.
class Flow {
 public:
  Flow(const MultiGraph& g, VertexId s, const std::set<VertexId>& targets, const std::set<VertexId>& forbidden,
       bool distinct_ends)
      : g_(g), s_(s), distinct_(distinct_ends) {
    const int n = g.vertex_count();
    target_.assign(static_cast<std::size_t>(n), false);
    removed_.assign(static_cast<std::size_t>(n), false);
    sink_.assign(static_cast<std::size_t>(n), 0);
    flow_.assign(static_cast<std::size_t>(g.next_edge_id()), 0);
    for (VertexId t : targets) target_[t] = true;
    for (VertexId f : forbidden)
      if (!target_[f] && f != s) removed_[f] = true;
  }

  // Pushes one unit along an s-target path given as a walk.
  void add_path(const Walk& p) {
    for (std::size_t i = 0; i < p.edges.size(); ++i) push(p.edges[i], p.vertices[i]);
    ++sink_[p.back()];
    ++value_;
  }

  bool augment() {
    const int n = g_.vertex_count();
    std::vector<EdgeId> via(static_cast<std::size_t>(n), kNoEdge);
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    std::deque<VertexId> q{s_};
    seen[s_] = true;
    VertexId end = kNoVertex;
    while (!q.empty() && end == kNoVertex) {
      VertexId x = q.front();
      q.pop_front();
      if (target_[x] && (!distinct_ || sink_[x] == 0)) {
        end = x;
        break;
      }
      for (EdgeId e : g_.incident(x)) {
        if (g_.is_loop(e)) continue;
        VertexId y = g_.other_end(e, x);
        if (seen[y] || removed_[y]) continue;
        int dir = direction(e, x);
        // cancelling inflow is always allowed, fresh outflow not from targets
        bool ok = flow_[e] == -dir || (flow_[e] == 0 && !target_[x]);
        if (!ok) continue;
        seen[y] = true;
        via[y] = e;
        q.push_back(y);
      }
    }
    reach_ = seen;
    if (end == kNoVertex) return false;
    for (VertexId y = end; y != s_;) {
      EdgeId e = via[y];
      VertexId x = g_.other_end(e, y);
      push(e, x);
      y = x;
    }
    ++sink_[end];
    ++value_;
    return true;
  }

  int value() const { return value_; }

  // Edges leaving the residual-reachable side inside the restricted graph.
  std::vector<EdgeId> cut() const {
    std::vector<EdgeId> out;
    for (EdgeId e : g_.edge_ids()) {
      auto [a, b] = g_.ends(e);
      if (removed_[a] || removed_[b] || a == b) continue;
      if (reach_[a] != reach_[b]) out.push_back(e);
    }
    return out;
  }

  // Splits the flow into s-target paths. Path i first tries to follow
  // prefer[i], so untouched seeds come back unchanged.
  std::vector<Walk> decompose(const std::vector<Walk>& prefer) {
    std::vector<int> left = flow_;
    std::vector<int> sink = sink_;
    std::vector<Walk> out;
    for (int i = 0; i < value_; ++i) {
      std::map<VertexId, EdgeId> hint;
      if (i < static_cast<int>(prefer.size()))
        for (std::size_t k = 0; k < prefer[i].edges.size(); ++k) hint[prefer[i].vertices[k]] = prefer[i].edges[k];
      Walk w = Walk::single(s_);
      while (!(target_[w.back()] && sink[w.back()] > 0 && w.length() > 0)) {
        VertexId x = w.back();
        EdgeId pick = kNoEdge;
        if (auto it = hint.find(x); it != hint.end() && left[it->second] == direction(it->second, x))
          pick = it->second;
        if (pick == kNoEdge)
          for (EdgeId e : g_.incident(x))
            if (!g_.is_loop(e) && left[e] == direction(e, x)) {
              pick = e;
              break;
            }
        if (pick == kNoEdge) throw Error("flow decomposition lost conservation");
        left[pick] = 0;
        w.edges.push_back(pick);
        w.vertices.push_back(g_.other_end(pick, x));
      }
      --sink[w.back()];
      out.push_back(shortcut_to_path(w));
    }
    return out;
  }

 private:
  // +1 when leaving x along e follows the orientation of e
  int direction(EdgeId e, VertexId x) const { return g_.ends(e).u == x ? 1 : -1; }

  void push(EdgeId e, VertexId from) {
    int dir = direction(e, from);
    flow_[e] = flow_[e] == -dir ? 0 : dir;
  }

  const MultiGraph& g_;
  VertexId s_;
  bool distinct_;
  std::vector<bool> target_, removed_, reach_;
  std::vector<int> sink_, flow_;
  int value_ = 0;
};

void require_vertex(const MultiGraph& g, VertexId v) {
  if (!g.has_vertex(v)) throw QueryError("unknown vertex " + std::to_string(v));
}

int bounded_connectivity(const MultiGraph& g, VertexId u, VertexId v, int cap) {
  Flow f(g, u, {v}, {}, false);
  while (f.value() < cap && f.augment()) {
  }
  return f.value();
}

std::vector<std::pair<VertexId, VertexId>> all_pairs(const std::vector<VertexId>& s) {
  std::vector<std::pair<VertexId, VertexId>> out;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = i + 1; j < s.size(); ++j) out.emplace_back(s[i], s[j]);
  return out;
}

}  // namespace

int edge_connectivity(const MultiGraph& g, VertexId u, VertexId v) {
  require_vertex(g, u);
  require_vertex(g, v);
  if (u == v) throw ParameterError("edge connectivity needs two distinct vertices");
  return bounded_connectivity(g, u, v, std::numeric_limits<int>::max());
}

PairwiseResult pairwise_k_connected_serial(const MultiGraph& g, const std::vector<VertexId>& s, int k) {
  for (VertexId v : s) require_vertex(g, v);
  PairwiseResult r;
  if (k <= 0) return r;
  for (auto [a, b] : all_pairs(s)) {
    int c = a == b ? k : bounded_connectivity(g, a, b, k);
    if (c < k) return PairwiseResult{false, std::make_pair(a, b), c};
  }
  return r;
}

PairwiseResult pairwise_k_connected(const MultiGraph& g, const std::vector<VertexId>& s, int k) {
  for (VertexId v : s) require_vertex(g, v);
  PairwiseResult r;
  if (k <= 0) return r;
  auto pairs = all_pairs(s);
  std::vector<int> conn(pairs.size(), 0);
  const long count = static_cast<long>(pairs.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < count; ++i) {
    auto [a, b] = pairs[static_cast<std::size_t>(i)];
    conn[static_cast<std::size_t>(i)] = a == b ? k : bounded_connectivity(g, a, b, k);
  }
  for (std::size_t i = 0; i < pairs.size(); ++i)
    if (conn[i] < k) return PairwiseResult{false, pairs[i], conn[i]};
  return r;
}

BundleResult disjoint_paths_to_set(const MultiGraph& g, VertexId s, const std::set<VertexId>& targets, int k,
                                   const std::set<VertexId>& forbidden_interior, bool distinct_ends) {
  require_vertex(g, s);
  for (VertexId t : targets) require_vertex(g, t);
  if (targets.count(s)) throw PreconditionError("source lies in the target set");
  if (k < 0) throw ParameterError("negative path count");
  Flow f(g, s, targets, forbidden_interior, distinct_ends);
  while (f.value() < k && f.augment()) {
  }
  BundleResult r;
  r.flow = f.value();
  if (f.value() < k) {
    r.cut = f.cut();
    return r;
  }
  r.bundle = EdgeDisjointBundle{s, f.decompose({})};
  return r;
}

BundleResult augment_with_prescribed_ends(const MultiGraph& g, VertexId s, const std::set<VertexId>& targets,
                                          const std::array<VertexId, 3>& prescribed,
                                          const std::array<Walk, 3>& seeds,
                                          const std::set<VertexId>& forbidden_interior) {
  require_vertex(g, s);
  if (targets.count(s)) throw PreconditionError("source lies in the target set");
  std::set<VertexId> ends(prescribed.begin(), prescribed.end());
  if (ends.size() != 3) throw PreconditionError("prescribed ends must be distinct");
  EdgeDisjointBundle seed{s, {seeds.begin(), seeds.end()}};
  auto problems = check_bundle(g, seed);
  if (!problems.empty()) throw PreconditionError("seed paths: " + problems.front());
  for (int i = 0; i < 3; ++i) {
    const Walk& p = seeds[i];
    if (!targets.count(prescribed[i])) throw PreconditionError("prescribed end outside the target set");
    if (p.back() != prescribed[i] || p.length() < 1)
      throw PreconditionError("seed " + std::to_string(i) + " does not end at its prescribed vertex");
    for (std::size_t k = 1; k + 1 < p.vertices.size(); ++k)
      if (targets.count(p.vertices[k]) || forbidden_interior.count(p.vertices[k]))
        throw PreconditionError("seed " + std::to_string(i) + " meets the target set inside");
  }
  Flow f(g, s, targets, forbidden_interior, false);
  for (const Walk& p : seeds) f.add_path(p);
  BundleResult r;
  if (!f.augment()) {
    r.flow = f.value();
    r.cut = f.cut();
    return r;
  }
  r.flow = f.value();
  auto paths = f.decompose({seeds.begin(), seeds.end()});
  // put the path ending at prescribed[i] in slot i, keeping seeds in place
  std::vector<Walk> slots(4);
  std::vector<bool> used(paths.size(), false);
  for (int i = 0; i < 3; ++i) {
    int pick = -1;
    if (paths[i].back() == prescribed[i] && !used[i]) pick = i;
    for (std::size_t j = 0; pick < 0 && j < paths.size(); ++j)
      if (!used[j] && paths[j].back() == prescribed[i]) pick = static_cast<int>(j);
    if (pick < 0) throw Error("augmentation stranded prescribed end " + std::to_string(prescribed[i]));
    used[pick] = true;
    slots[i] = paths[pick];
  }
  for (std::size_t j = 0; j < paths.size(); ++j)
    if (!used[j]) slots[3] = paths[j];
  EdgeDisjointBundle b{s, slots};
  problems = check_bundle(g, b);
  if (!problems.empty()) throw Error("augmented bundle failed replay: " + problems.front());
  r.bundle = std::move(b);
  return r;
}

}  // namespace forge
