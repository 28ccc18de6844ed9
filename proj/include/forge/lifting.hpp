#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "forge/immersion.hpp"
#include "forge/multigraph.hpp"
#include "forge/wall.hpp"

namespace forge {

/// d1 = u1 v and d2 = u2 v were replaced by the new edge d0 = u1 u2.
struct LiftRecord {
  VertexId v = kNoVertex;
  EdgeId d1 = kNoEdge, d2 = kNoEdge, d0 = kNoEdge;
  VertexId u1 = kNoVertex, u2 = kNoVertex;
  bool operator==(const LiftRecord&) const = default;
};

/// "lift v: -d1 -d2 +d0(u1,u2)"
std::string to_string(const LiftRecord& r);

/// Deletes d1, d2 and adds d0 joining their other ends (a loop when they
/// coincide). The degree of v drops by two in every case; loops at v count
/// as having v as their other end.
std::pair<MultiGraph, LiftRecord> lift_pair(const MultiGraph& g, VertexId v, EdgeId d1, EdgeId d2);

struct PullBackFailure {
  EdgeId pattern_edge = kNoEdge;
  int condition = 0;
  std::string reason;
};

struct PullBackResult {
  std::optional<ImmersionMap> map;
  std::vector<PullBackFailure> failures;
  bool ok() const noexcept { return map.has_value(); }
};

/// Replaces d0 by the detour d1 v d2 in every walk. When a detoured walk
/// already visits v, or v is the image of a pattern vertex the walk must
/// avoid, the result carries the failures instead of a map.
PullBackResult pull_back(const ImmersionMap& m, const LiftRecord& rec, GraphPtr original);

/// pull_back followed by one re-route pass: detoured walks are shortened by
/// cutting out the closed sub-walk at v, and walks that still break the
/// definition are routed again, jointly, with every vertex image and every
/// other walk kept as is.
PullBackResult pull_back_rerouted(const ImmersionMap& m, const LiftRecord& rec, GraphPtr original,
                                  std::uint64_t budget = 1'000'000);

/// Sum over pairs of distinct pattern edges of the number of shared
/// internal vertices of their images.
long crossing_measure(const ImmersionMap& m);

/// F cut at its first vertex after the start that lies in `stop`; empty
/// when F never meets `stop`.
std::optional<Walk> truncate_at_first_contact(const Walk& f, const std::set<VertexId>& stop);

/// V(eta(W0 - s)): images of pattern vertices other than s and every vertex
/// of walks of edges not incident with s.
std::set<VertexId> image_without(const ImmersionMap& m, VertexId s);

/// Edges used by the walks of m.
std::set<EdgeId> image_edges(const ImmersionMap& m);

struct ReductionResult {
  std::vector<LiftRecord> history;
  std::vector<GraphPtr> graphs;                  // graphs[i + 1] = after history[i]
  std::vector<std::pair<long, long>> measures;    // (crossings, fin length) per state
  ImmersionMap map;                               // final subdivision map of W0
  FinSystem fins;                                 // on the wall image of `map`
  std::vector<int> fin_roots;                     // W0 vertex of each fin in `fins`
  std::vector<int> dropped;                       // roots whose fin ended on another root
};

/// Lifts crossings of an immersed elementary wall away until its image is a
/// wall. m0 immerses wall_layout(h)->graph() in its host; every pair of
/// edges whose images share an internal vertex must have a common end in
/// s0 (else HypothesisError naming the edge pair); fins[s] is a path from
/// the image of s to V(eta(W0 - s)) using no edge of the wall image.
ReductionResult reduce_immersed_wall(const ImmersionMap& m0, int h, const std::set<int>& s0,
                                     const std::map<int, Walk>& fins);

}  // namespace forge
