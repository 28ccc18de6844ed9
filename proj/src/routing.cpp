#include <algorithm>
#include <deque>
#include <limits>
#include <numeric>
#include <optional>
#include <queue>

#include "forge/errors.hpp"
#include "forge/pipeline.hpp"

namespace forge {

namespace {

constexpr int kFar = std::numeric_limits<int>::max();
constexpr int kRounds = 40;

// A congestion-negotiation pass first, then depth-first enumeration of
// paths, one demand after the other. Neighbours
// are tried closest to the target first; a demand whose ends got separated
// cuts the branch.
class Router {
 public:
  Router(const MultiGraph& g, const std::set<EdgeId>& edges, const std::vector<Demand>& demands,
         const std::set<VertexId>& blocked, std::uint64_t budget)
      : demands_(demands), budget_(budget), count_(edges.size()) {
    const auto n = static_cast<std::size_t>(g.vertex_count());
    adj_.resize(n);
    for (EdgeId e : edges) {
      auto [a, b] = g.ends(e);
      if (a == b) continue;
      adj_[a].emplace_back(b, e);
      adj_[b].emplace_back(a, e);
    }
    for (auto& l : adj_) std::sort(l.begin(), l.end());
    taken_.assign(n, false);
    reserved_.assign(n, 0);
    for (VertexId v : blocked) taken_[v] = true;
    for (auto [s, t] : demands) {
      ++reserved_[s];
      if (t != s) ++reserved_[t];
    }
  }

  SearchStatus run() {
    for (auto [s, t] : demands_)
      if (taken_[s] || taken_[t]) return SearchStatus::kNotFound;
    for (int r : reserved_)
      if (r > 1) return SearchStatus::kNotFound;
    order_.resize(demands_.size());
    std::iota(order_.begin(), order_.end(), 0);
    std::vector<int> d0(demands_.size());
    for (std::size_t k = 0; k < demands_.size(); ++k)
      d0[k] = distances(demands_[k].second, demands_[k].first, demands_[k].first)[demands_[k].first];
    for (int d : d0)
      if (d == kFar) return SearchStatus::kNotFound;
    std::stable_sort(order_.begin(), order_.end(), [&](int a, int b) { return d0[a] < d0[b]; });
    paths_.assign(demands_.size(), Walk{});
    if (negotiate()) return SearchStatus::kFound;
    paths_.assign(demands_.size(), Walk{});
    bool ok = solve(0);
    if (aborted_) return SearchStatus::kBudgetExhausted;
    return ok ? SearchStatus::kFound : SearchStatus::kNotFound;
  }

  std::vector<Walk> paths() const { return paths_; }
  std::uint64_t expansions() const { return count_; }

 private:
  bool free_for(VertexId v, VertexId s, VertexId t) const {
    return !taken_[v] && (reserved_[v] == 0 || v == s || v == t);
  }

  // BFS visits count against the budget too
  std::vector<int> distances(VertexId from, VertexId s, VertexId t) {
    std::vector<int> d(adj_.size(), kFar);
    std::deque<VertexId> q{from};
    d[from] = 0;
    while (!q.empty()) {
      VertexId x = q.front();
      q.pop_front();
      ++count_;
      for (auto [y, e] : adj_[x])
        if (d[y] == kFar && free_for(y, s, t)) {
          d[y] = d[x] + 1;
          q.push_back(y);
        }
    }
    return d;
  }

  // Negotiated congestion: every demand takes a cheapest path where shared
  // vertices get more expensive each round. Only a shortcut; failure says
  // nothing.
  bool negotiate() {
    const std::size_t n = adj_.size(), k = demands_.size();
    std::vector<double> hist(n, 0.0);
    std::vector<int> occ(n, 0);
    std::vector<Walk> cur(k);
    const std::uint64_t cap = budget_ / 2;
    double pres = 0.5;
    for (int round = 0; round < kRounds; ++round, pres *= 1.6) {
      for (std::size_t i : order_) {
        for (VertexId v : cur[i].vertices) --occ[v];
        auto p = cheapest(i, occ, hist, pres);
        if (!p || count_ > cap) return false;
        cur[i] = std::move(*p);
        for (VertexId v : cur[i].vertices) ++occ[v];
      }
      bool clean = true;
      for (std::size_t v = 0; v < n; ++v)
        if (occ[v] > 1) {
          clean = false;
          hist[v] += occ[v] - 1;
        }
      if (clean) {
        paths_ = std::move(cur);
        return true;
      }
    }
    return false;
  }

  std::optional<Walk> cheapest(std::size_t i, const std::vector<int>& occ, const std::vector<double>& hist,
                               double pres) {
    auto [s, t] = demands_[i];
    const std::size_t n = adj_.size();
    std::vector<double> d(n, std::numeric_limits<double>::infinity());
    std::vector<std::pair<VertexId, EdgeId>> via(n, {kNoVertex, kNoEdge});
    using Item = std::pair<double, VertexId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    d[s] = 0;
    pq.push({0.0, s});
    while (!pq.empty()) {
      auto [dx, x] = pq.top();
      pq.pop();
      if (dx > d[x]) continue;
      ++count_;
      if (x == t) break;
      for (auto [y, e] : adj_[x]) {
        if (!free_for(y, s, t)) continue;
        double c = dx + (1.0 + hist[y]) * (1.0 + pres * occ[y]);
        if (c < d[y]) {
          d[y] = c;
          via[y] = {x, e};
          pq.push({c, y});
        }
      }
    }
    if (via[t].first == kNoVertex) return std::nullopt;
    Walk w = Walk::single(t);
    for (VertexId y = t; y != s; y = via[y].first) {
      w.vertices.push_back(via[y].first);
      w.edges.push_back(via[y].second);
    }
    return w.reversed();
  }

  bool remaining_connected(std::size_t from) {
    for (std::size_t k = from; k < order_.size(); ++k) {
      auto [s, t] = demands_[order_[k]];
      if (distances(t, s, t)[s] == kFar) return false;
    }
    return true;
  }

  bool solve(std::size_t k) {
    if (k == order_.size()) return true;
    auto [s, t] = demands_[order_[k]];
    auto dist = distances(t, s, t);
    if (dist[s] == kFar) return false;
    Walk w = Walk::single(s);
    taken_[s] = true;
    bool ok = extend(k, w, dist);
    if (!ok) taken_[s] = false;
    return ok;
  }

  bool extend(std::size_t k, Walk& w, const std::vector<int>& dist) {
    if (aborted_) return false;
    if (++count_ > budget_) {
      aborted_ = true;
      return false;
    }
    auto [s, t] = demands_[order_[k]];
    VertexId x = w.back();
    if (x == t) {
      paths_[order_[k]] = w;
      if (remaining_connected(k + 1) && solve(k + 1)) return true;
      if (count_ > budget_) aborted_ = true;
      return false;
    }
    std::vector<std::pair<VertexId, EdgeId>> next;
    for (auto [y, e] : adj_[x])
      if (dist[y] != kFar && free_for(y, s, t)) next.emplace_back(y, e);
    std::stable_sort(next.begin(), next.end(), [&](auto a, auto b) { return dist[a.first] < dist[b.first]; });
    for (auto [y, e] : next) {
      if (taken_[y]) continue;  // taken further down this branch
      taken_[y] = true;
      w.vertices.push_back(y);
      w.edges.push_back(e);
      if (extend(k, w, dist)) return true;
      w.vertices.pop_back();
      w.edges.pop_back();
      taken_[y] = false;
      if (aborted_) return false;
    }
    return false;
  }

  std::vector<std::vector<std::pair<VertexId, EdgeId>>> adj_;
  std::vector<Demand> demands_;
  std::vector<bool> taken_;
  std::vector<int> reserved_;
  std::vector<int> order_;
  std::vector<Walk> paths_;
  std::uint64_t budget_;
  std::uint64_t count_;  // starts at the cost of building the adjacency
  bool aborted_ = false;
};

}  // namespace

RoutingResult route_vertex_disjoint(const MultiGraph& g, const std::set<EdgeId>& edges,
                                    const std::vector<Demand>& demands, const std::set<VertexId>& blocked,
                                    std::uint64_t budget) {
  for (auto [s, t] : demands)
    if (!g.has_vertex(s) || !g.has_vertex(t))
      throw QueryError("demand names unknown vertex");
  for (EdgeId e : edges)
    if (!g.has_edge(e)) throw QueryError("routing edge set names unknown edge " + std::to_string(e));
  Router r(g, edges, demands, blocked, budget);
  RoutingResult out;
  out.status = r.run();
  out.expansions = r.expansions();
  if (out.status == SearchStatus::kFound) out.paths = r.paths();
  return out;
}

RoutingResult route_disjoint_paths(const Wall& w, const std::vector<Demand>& demands,
                                   const std::set<VertexId>& forbidden, std::uint64_t budget) {
  for (auto [s, t] : demands)
    for (VertexId v : {s, t}) {
      if (!w.contains_vertex(v)) throw ParameterError("terminal " + std::to_string(v) + " is not a wall vertex");
      if (forbidden.count(v)) throw ParameterError("terminal " + std::to_string(v) + " is forbidden");
    }
  return route_vertex_disjoint(*w.host(), w.edges(), demands, forbidden, budget);
}

}  // namespace forge
