#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "forge/immersion.hpp"
#include "forge/multigraph.hpp"
#include "forge/wall.hpp"

namespace forge {

/// Vertex v_{i,j} (1 <= i, j <= g) of the g x g grid.
struct GridLabeling {
  int g = 0;
  VertexId at(int i, int j) const;
  std::pair<int, int> label_of(VertexId v) const { return {v / g + 1, v % g + 1}; }
};

/// The g x g grid J_g; v_{i,j} has id (i-1)*g + (j-1).
std::pair<MultiGraph, GridLabeling> grid(int g);

/// Elementary wall of height h with the standard labelling.
std::pair<MultiGraph, Wall> elementary_wall(int h);

/// Result of subdividing edges: original vertices keep their ids.
struct SubdivisionRecord {
  std::map<EdgeId, Walk> edge_paths;  // original edge -> replacing path
  std::vector<VertexId> vertex_images;

  /// The record read as an immersion of the original graph.
  ImmersionMap as_immersion(GraphPtr original, GraphPtr subdivided) const;
};

/// Replaces every edge e in plan by a path with plan[e] new internal
/// vertices. Edges are renumbered in id order of the original graph.
std::pair<MultiGraph, SubdivisionRecord> subdivide(const MultiGraph& g,
                                                   const std::map<EdgeId, int>& plan);
/// Same count of new vertices on every edge.
std::pair<MultiGraph, SubdivisionRecord> subdivide_all(const MultiGraph& g, int count);

/// Star with centre 0 and the given number of leaves, every centre-leaf pair
/// of multiplicity four.
MultiGraph quad_star(int leaves);

enum class FinAttachment {
  kFar,        // target as far from the root as the wall allows
  kNear,       // target at a fixed small wall distance
  kSharedHub,  // path runs through a hub vertex shared by all hub fins
};

struct FinSpec {
  int row = 2;  // root is v_{row, 2 row}
  FinAttachment attachment = FinAttachment::kFar;
  std::optional<WallLabel> target;  // overrides the attachment's choice
  int internal = 1;                 // fresh vertices on the fin path
};

struct FinFixtureOptions {
  int subdivide = 0;  // new vertices per wall edge
  int near_distance = 3;
  std::uint32_t seed = 1;
};

/// A wall of height h plus one fin per entry of `specs`. Fin paths use fresh
/// vertices and edges only; targets avoid roots and each other.
std::pair<MultiGraph, FinSystem> wall_with_fins(int h, const std::vector<FinSpec>& specs,
                                                const FinFixtureOptions& options = {});

}  // namespace forge
