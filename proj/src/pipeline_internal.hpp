#pragma once

// Helpers shared by the strategy, growing and pipeline sources.

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "forge/pipeline.hpp"

namespace forge::detail {

/// Edges of J_g at grid vertex v in clockwise order: up, right, down, left.
std::vector<EdgeId> grid_rotation(int g, VertexId v);

/// Branch-first edges at a labelled wall vertex, clockwise: the neighbour
/// on each branch and the edge leading to it.
std::vector<std::pair<VertexId, EdgeId>> ports(const Wall& w, VertexId s);

/// Shortest path from a to b using only `edges` and avoiding `avoid`.
std::optional<Walk> path_within(const MultiGraph& g, const std::set<EdgeId>& edges, VertexId a, VertexId b,
                                const std::set<VertexId>& avoid = {});

/// First pair of fins (positions) sharing an edge.
std::optional<std::pair<int, int>> shared_edge(const std::vector<Fin>& fins);

/// First pair of points closer than `threshold`, as positions into `pts`.
std::optional<std::pair<int, int>> too_close(const Wall& w, const std::vector<VertexId>& pts, int threshold);

/// Position of the fin nearest to the perimeter, measured at its root and
/// (when `with_target`) at its target.
int nearest_to_perimeter(const Wall& w, const std::vector<Fin>& fins, bool with_target);

/// The map restricted to J_g when it immerses J_{g'} for g' >= g.
ImmersionMap restrict_grid(const ImmersionMap& m, int from, int to);

/// Runs verify and the root check; the failure text is empty on success.
std::string soundness(const ImmersionMap& m, const std::vector<VertexId>& roots);

std::vector<VertexId> fin_roots(const std::vector<Fin>& fins);

inline int promoted(int g) { return g % 2 ? g + 1 : g; }

/// b1 for the (possibly promoted) grid side.
inline int long_count(const PipelineConfig& cfg) {
  int n = promoted(cfg.g) * promoted(cfg.g);
  return cfg.b1 > 0 ? cfg.b1 : n + 1;
}

/// Calls f on every injective map {0..n-1} -> {0..m-1} in lexicographic
/// order until f returns true.
template <class F>
bool each_injection(int n, int m, F&& f) {
  std::vector<int> a(static_cast<std::size_t>(n), -1);
  std::vector<bool> used(static_cast<std::size_t>(m), false);
  auto rec = [&](auto&& self, int k) -> bool {
    if (k == n) return f(a);
    for (int c = 0; c < m; ++c) {
      if (used[c]) continue;
      used[c] = true;
      a[k] = c;
      if (self(self, k + 1)) return true;
      used[c] = false;
    }
    return false;
  };
  return rec(rec, 0);
}

/// Long jumps with a shared budget (decremented by the routing work).
StrategyOutcome long_jumps(const FinSystem& fs, const PipelineConfig& cfg, std::uint64_t& budget);
StrategyOutcome external_blob(const std::shared_ptr<const Wall>& wall, const std::set<EdgeId>& x,
                              const PipelineConfig& cfg, std::uint64_t& budget);

}  // namespace forge::detail
