#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "forge/errors.hpp"

namespace forge {

using VertexId = int;
using EdgeId = int;

inline constexpr VertexId kNoVertex = -1;
inline constexpr EdgeId kNoEdge = -1;

struct Endpoints {
  VertexId u = kNoVertex;
  VertexId v = kNoVertex;

  bool is_loop() const noexcept { return u == v; }
  bool operator==(const Endpoints&) const = default;
};

/// Finite undirected multigraph with loops and parallel edges.
///
/// Vertices are the dense range [0, vertex_count()). Every edge carries its
/// own id; ids are handed out by a monotone counter and are never reused
/// after deletion, so maps keyed by edge id stay meaningful across rewrites.
/// Values are immutable: every mutation returns a new graph.
class MultiGraph {
 public:
  MultiGraph() = default;

  /// Edge ids are assigned in list order starting at 0.
  static MultiGraph build(int vertex_count,
                          std::span<const std::pair<VertexId, VertexId>> edges);
  static MultiGraph build(int vertex_count,
                          std::initializer_list<std::pair<VertexId, VertexId>> edges) {
    return build(vertex_count, std::span<const std::pair<VertexId, VertexId>>(
                                   edges.begin(), edges.size()));
  }

  int vertex_count() const noexcept { return static_cast<int>(incidence_.size()); }
  int edge_count() const noexcept { return live_edges_; }
  /// One past the largest id ever issued; the id the next added edge gets.
  EdgeId next_edge_id() const noexcept { return static_cast<EdgeId>(slots_.size()); }

  bool has_vertex(VertexId v) const noexcept { return v >= 0 && v < vertex_count(); }
  bool has_edge(EdgeId e) const noexcept {
    return e >= 0 && e < next_edge_id() && slots_[e].has_value();
  }

  Endpoints ends(EdgeId e) const;
  bool is_loop(EdgeId e) const { return ends(e).is_loop(); }
  bool is_incident(EdgeId e, VertexId v) const;
  /// The end of e that is not v (v itself for a loop).
  VertexId other_end(EdgeId e, VertexId v) const;

  /// Incident edge ids in ascending order; a loop is listed once.
  const std::vector<EdgeId>& incident(VertexId v) const;
  /// Edge incidences at v; a loop counts twice.
  int degree(VertexId v) const;

  /// Live edge ids in ascending order.
  std::vector<EdgeId> edge_ids() const;
  /// Live edges joining a and b (a loop when a == b), ascending.
  std::vector<EdgeId> edges_between(VertexId a, VertexId b) const;
  int multiplicity(VertexId a, VertexId b) const {
    return static_cast<int>(edges_between(a, b).size());
  }

  MultiGraph delete_edges(std::span<const EdgeId> ids) const;
  MultiGraph delete_edges(std::initializer_list<EdgeId> ids) const {
    return delete_edges(std::span<const EdgeId>(ids.begin(), ids.size()));
  }
  /// Returns the new graph and the id given to the added edge.
  std::pair<MultiGraph, EdgeId> add_edge(VertexId a, VertexId b) const;
  /// Appends `count` isolated vertices.
  MultiGraph add_vertices(int count) const;

  /// Same vertex set, loops removed, parallel classes collapsed to one edge.
  MultiGraph simplified() const;

  /// Structural equality: same vertex count, same live ids with same ends.
  bool operator==(const MultiGraph& other) const;

 private:
  void check_vertex(VertexId v) const;
  void insert_edge(VertexId a, VertexId b);

  std::vector<std::optional<Endpoints>> slots_;
  std::vector<std::vector<EdgeId>> incidence_;
  int live_edges_ = 0;
};

/// Alternating vertex/edge sequence v0 e1 v1 ... ek vk.
struct Walk {
  std::vector<VertexId> vertices;
  std::vector<EdgeId> edges;

  static Walk single(VertexId v) { return Walk{{v}, {}}; }

  int length() const noexcept { return static_cast<int>(edges.size()); }
  bool empty() const noexcept { return vertices.empty(); }
  VertexId front() const { return vertices.front(); }
  VertexId back() const { return vertices.back(); }

  /// Shape is consistent and every edge joins its neighbouring vertices in g.
  bool is_valid_in(const MultiGraph& g) const;
  /// All vertices distinct.
  bool is_path() const;
  /// Closed, k >= 1, interior vertices distinct, edges distinct.
  bool is_cycle() const;
  bool contains_vertex(VertexId v) const;
  bool contains_edge(EdgeId e) const;

  Walk reversed() const;
  /// Concatenates `tail`, which must start at back().
  Walk joined(const Walk& tail) const;

  bool operator==(const Walk&) const = default;
};

/// Removes closed sub-walks until the walk is a path between the same ends.
/// Edges of the result are a subset of the walk's edges.
Walk shortcut_to_path(const Walk& w);

std::string to_string(const Walk& w);

}  // namespace forge
