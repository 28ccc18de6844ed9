#pragma once

#include <array>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "forge/multigraph.hpp"

namespace forge {

/// Pairwise edge-disjoint paths leaving one common source.
struct EdgeDisjointBundle {
  VertexId source = kNoVertex;
  std::vector<Walk> paths;
};

/// Replays the bundle invariants against g: every walk is a path of g from
/// the source, and no edge id is used twice. Returns the problems found.
std::vector<std::string> check_bundle(const MultiGraph& g, const EdgeDisjointBundle& b);

/// Maximum number of pairwise edge-disjoint u-v paths.
int edge_connectivity(const MultiGraph& g, VertexId u, VertexId v);

struct PairwiseResult {
  bool ok = true;
  std::optional<std::pair<VertexId, VertexId>> failing;  // first pair in S order
  int connectivity = 0;                                   // of the failing pair
};

/// Checks every pair of S in parallel. The reported pair is the first
/// failing one in the order (S[0],S[1]), (S[0],S[2]), ..., (S[1],S[2]), ...
PairwiseResult pairwise_k_connected(const MultiGraph& g, const std::vector<VertexId>& s, int k);
/// Serial reference with the same contract.
PairwiseResult pairwise_k_connected_serial(const MultiGraph& g, const std::vector<VertexId>& s, int k);

struct BundleResult {
  std::optional<EdgeDisjointBundle> bundle;
  std::vector<EdgeId> cut;  // certifies infeasibility when bundle is empty
  int flow = 0;
};

/// k edge-disjoint paths from s to T, each meeting T only at its last vertex
/// and with no internal vertex in `forbidden_interior`.
BundleResult disjoint_paths_to_set(const MultiGraph& g, VertexId s, const std::set<VertexId>& targets, int k,
                                   const std::set<VertexId>& forbidden_interior = {},
                                   bool distinct_ends = false);

/// Four edge-disjoint s-T paths, the first three ending at the prescribed
/// vertices. Starts from the three seed paths as the initial flow and
/// augments once. Throws PreconditionError when the seeds are not
/// edge-disjoint paths from s to the prescribed vertices avoiding T inside.
BundleResult augment_with_prescribed_ends(const MultiGraph& g, VertexId s, const std::set<VertexId>& targets,
                                          const std::array<VertexId, 3>& prescribed,
                                          const std::array<Walk, 3>& seeds,
                                          const std::set<VertexId>& forbidden_interior = {});

}  // namespace forge
