#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "forge/multigraph.hpp"

namespace forge {

using GraphPtr = std::shared_ptr<const MultiGraph>;

inline GraphPtr share(MultiGraph g) { return std::make_shared<const MultiGraph>(std::move(g)); }

/// A candidate immersion of `pattern` (H) in `host` (G): each pattern vertex
/// goes to a host vertex and each pattern edge to a walk of the host.
struct ImmersionMap {
  GraphPtr pattern;
  GraphPtr host;
  std::vector<VertexId> vertex_map;      // indexed by pattern vertex
  std::map<EdgeId, Walk> edge_map;       // keyed by pattern edge id

  VertexId image(VertexId v) const { return vertex_map.at(static_cast<std::size_t>(v)); }
  const Walk& image_of_edge(EdgeId e) const { return edge_map.at(e); }
};

/// One failed condition of the immersion definition.
///   1 vertex images distinct
///   2 non-loop edge goes to a path between the images of its ends
///   3 loop goes to a cycle through the image of its end
///   4 a vertex image avoids the images of non-incident edges
///   5 distinct edges have edge-disjoint images
struct Violation {
  int condition = 0;
  std::string message;
  std::vector<int> witnesses;
};

struct Verdict {
  std::vector<Violation> violations;
  bool ok() const noexcept { return violations.empty(); }
  explicit operator bool() const noexcept { return ok(); }
};

/// Checks all five conditions. Throws InputError when the map is not total
/// on V(H) and E(H) or refers to ids the graphs do not have.
Verdict verify(const ImmersionMap& m);

/// Every vertex shared by two edge images is the image of a pattern vertex
/// incident with both edges. Requires verify(m).ok().
bool is_subdivision_map(const ImmersionMap& m);

/// All vertex images lie in `roots`. Requires verify(m).ok().
bool is_rooted(const ImmersionMap& m, const std::vector<VertexId>& roots);

/// Builds the immersion induced by a subgraph inclusion: pattern vertex v
/// goes to vertex_images[v] and pattern edge e to the single host edge
/// edge_images.at(e).
ImmersionMap immersion_from_subgraph(GraphPtr host, GraphPtr pattern,
                                     std::vector<VertexId> vertex_images,
                                     const std::map<EdgeId, EdgeId>& edge_images);

ImmersionMap identity_immersion(GraphPtr g);

enum class SearchStatus { kFound, kNotFound, kBudgetExhausted };

std::string to_string(SearchStatus s);

struct ImmersionSearchOptions {
  std::optional<std::vector<VertexId>> roots;
  std::uint64_t budget = 10'000'000;
  /// Partial solution to extend: pattern vertex v is pinned to
  /// fixed_vertices[v] unless that entry is kNoVertex (an empty vector pins
  /// nothing), and the listed pattern edges keep their walks.
  std::vector<VertexId> fixed_vertices;
  std::map<EdgeId, Walk> fixed_walks;
};

struct ImmersionSearchResult {
  SearchStatus status = SearchStatus::kNotFound;
  std::optional<ImmersionMap> map;
  std::uint64_t expansions = 0;
};

/// Exhaustive backtracking search for an immersion of pattern in host.
///
/// Pattern vertices are placed first (most-constrained order, host degree
/// at least pattern degree, optionally inside `roots`); each pattern edge
/// is routed as soon as both ends are placed, trying host paths in order of
/// increasing length over the remaining edge capacity. Condition 4 is
/// enforced while routing by removing forbidden vertices from the search
/// space. kNotFound is only returned after the whole space was explored
/// within budget; running out of budget yields kBudgetExhausted.
ImmersionSearchResult find_immersion(GraphPtr host, GraphPtr pattern,
                                     const ImmersionSearchOptions& options = {});

}  // namespace forge
