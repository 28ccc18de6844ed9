#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "forge/immersion.hpp"
#include "forge/lifting.hpp"
#include "forge/multigraph.hpp"
#include "forge/wall.hpp"

namespace forge {

/// Thresholds, fin counts and budgets of the grid-immersion pipeline.
/// A zero fin count means "derive from g": b1 = g^2 + 1, b2 = 2 b1,
/// b3 = g^2 + 1.
struct PipelineConfig {
  int g = 2;
  int a1 = 4, a2 = 4, a3 = 4, c = 4;
  int b1 = 0, b2 = 0, b3 = 0;
  std::uint64_t wall_budget = 2'000'000;      // find_wall expansions
  std::uint64_t routing_budget = 300'000;     // one disjoint-path routing (DFS steps and BFS visits)
  std::uint64_t strategy_budget = 50'000'000; // all routings of one strategy
  std::uint64_t reroute_budget = 1'000'000;   // pull-back re-routing
  std::uint64_t fallback_budget = 10'000'000; // direct search on small inputs
  int fallback_max_vertices = 16;
  int wall_height = 2;  // height searched for when no wall is given

  /// Throws ParameterError on g < 2, thresholds < 1, budgets of zero or
  /// negative counts.
  void validate() const;
  int fins_long() const { return b1 > 0 ? b1 : g * g + 1; }
  int fins_internal() const { return b2 > 0 ? b2 : 2 * fins_long(); }
  int fins_short() const { return b3 > 0 ? b3 : g * g + 1; }
  int separation() const;  // max(a1, a2, a3)

  /// Sets one field from its name; ParameterError on unknown keys or bad
  /// values.
  void set(const std::string& key, const std::string& value);
};

/// Vertex-disjoint routing of terminal pairs. Demands may not share
/// terminals. kNotFound is only reported after exhausting the search.
struct RoutingResult {
  SearchStatus status = SearchStatus::kNotFound;
  std::vector<Walk> paths;  // one per demand, in demand order
  std::uint64_t expansions = 0;
};

using Demand = std::pair<VertexId, VertexId>;

/// Routes inside the subgraph of g spanned by `edges`, avoiding `blocked`.
RoutingResult route_vertex_disjoint(const MultiGraph& g, const std::set<EdgeId>& edges,
                                    const std::vector<Demand>& demands, const std::set<VertexId>& blocked,
                                    std::uint64_t budget);
/// Routes inside the wall subgraph; terminals must be wall vertices outside
/// `forbidden` (ParameterError otherwise).
RoutingResult route_disjoint_paths(const Wall& w, const std::vector<Demand>& demands,
                                   const std::set<VertexId>& forbidden, std::uint64_t budget);

// ---------------------------------------------------------------- strategies

enum class Strategy { kLongJumps, kExternalBlob, kInternalBlob, kShortJumps };
std::string to_string(Strategy s);

struct StrategyOutcome {
  std::optional<ImmersionMap> map;  // immersion of J_g in the wall's host
  std::string failure;              // empty on success
  bool hypothesis = false;          // failure is a violated hypothesis
  bool exhausted = false;           // failure is a budget running out
  std::vector<std::string> trace;
  bool ok() const noexcept { return map.has_value(); }
};

/// Pairwise edge-disjoint fins with every root and target at distance at
/// least a1. Grid vertices go to roots, matching edges run through two fins
/// and a wall path between their targets, the other edges through wall
/// ports next to the roots. An odd g is promoted to g + 1 and the result
/// restricted back to J_g.
StrategyOutcome strategy_long_jumps(const FinSystem& fs, const PipelineConfig& cfg);

/// X is a connected subgraph of the host, given by its edges, edge-disjoint
/// from the wall. Diagonal vertices of degree one in X are paired along a
/// spanning tree of X and the pairs become fins for long jumps.
StrategyOutcome strategy_external_blob(const std::shared_ptr<const Wall>& wall, const std::set<EdgeId>& x,
                                       const PipelineConfig& cfg);

/// Fins with distant targets: long jumps on separated targets, or a subwall
/// carved away from a cluster of targets and an external blob outside it.
StrategyOutcome strategy_internal_blob(const FinSystem& fs, const PipelineConfig& cfg);

/// Fins with targets within distance c: one height-c subwall per fin, four
/// escape paths from each root, crosses at surplus fins, and grid edges
/// routed between escape ports.
StrategyOutcome strategy_short_jumps(const FinSystem& fs, const PipelineConfig& cfg);

struct Attempt {
  Strategy strategy = Strategy::kLongJumps;
  std::vector<int> fins;  // indices into the dispatched fin system
  std::string reason;
  std::set<EdgeId> blob;  // X for the external blob
};

struct DispatchPlan {
  std::vector<int> selected;  // separated sub-family
  std::vector<int> hub;       // fins of the shared-interior group
  std::vector<int> far;       // d(s, t) >= a2
  std::vector<int> near;      // d(s, t) < a2
  std::vector<Attempt> attempts;
};

/// Orders strategy attempts for a fin system. ParameterError when empty.
DispatchPlan fins_dispatch(const FinSystem& fs, const PipelineConfig& cfg);

/// Farthest-point selection: starts from the first vertex, keeps adding the
/// vertex farthest (by wall distance to the chosen set) while that distance
/// is at least `threshold`. Returns positions into `vs`.
std::vector<int> separated_subset(const Wall& w, const std::vector<VertexId>& vs, int threshold);

// ------------------------------------------------------------ wall growing

struct GrowStep {
  int root = -1;  // elementary diagonal vertex rewired
  std::array<Walk, 3> branches;
  Walk fin;
  std::vector<std::string> repairs;
};

struct GrowResult {
  ImmersionMap map;           // elementary wall in G
  std::set<int> s0;           // elementary labels of S
  std::map<int, Walk> fins;   // one per member of s0
  std::vector<int> initial;   // roots with a fin before any step
  std::vector<GrowStep> steps;
  std::string diagnostic;     // set when an augmentation failed; D < S0 then
};

/// Empty result means the three invariants of the growing process hold:
/// crossings only at shared roots, roots mapped into S, and fins for D that
/// start at their root, end on the rest of the image and avoid its edges.
std::vector<std::string> check_growth_invariants(const ImmersionMap& m, const std::set<int>& s0,
                                                 const std::map<int, Walk>& fins);

/// S must be diagonal vertices of W, at least two, pairwise 4-edge-connected
/// (HypothesisError naming the pair otherwise).
GrowResult grow_rooted_wall(const MultiGraph& g, const Wall& w, const std::vector<VertexId>& s,
                            const PipelineConfig& cfg);

// ---------------------------------------------------------------- pipeline

enum class Outcome { kFound, kExhausted, kHypothesisViolated };
std::string to_string(Outcome o);

struct StageRecord {
  std::string stage;
  bool ok = false;
  std::vector<std::string> lines;
};

struct PipelineReport {
  Outcome outcome = Outcome::kExhausted;
  std::optional<ImmersionMap> result;
  std::vector<StageRecord> trace;
  std::string failed_stage;  // first failing pipeline stage, empty when none
  std::optional<std::pair<VertexId, VertexId>> violating_pair;
  std::optional<SearchStatus> fallback;  // direct search, when it ran
  std::optional<Strategy> strategy;      // the one that succeeded
  std::string to_text() const;
};

/// Runs find_wall (unless a wall is given), grow_rooted_wall,
/// reduce_immersed_wall, fins_dispatch and the strategies, then pulls the
/// result back to G. On small inputs whose pipeline run fails a direct
/// search decides whether an S-rooted immersion exists at all.
PipelineReport find_grid_immersion(GraphPtr g, const std::vector<VertexId>& s, const PipelineConfig& cfg,
                                   const std::optional<Wall>& wall = std::nullopt);

/// J_g as a shared pattern graph.
GraphPtr grid_pattern(int g);

}  // namespace forge
