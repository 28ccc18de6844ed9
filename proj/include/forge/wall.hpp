#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "forge/immersion.hpp"
#include "forge/multigraph.hpp"

namespace forge {

/// Position (i, j) in the elementary-wall labelling: row i, column j.
struct WallLabel {
  int i = 0;
  int j = 0;
  auto operator<=>(const WallLabel&) const = default;
};

std::string to_string(WallLabel l);

/// Combinatorics of the elementary wall of height h.
///
/// Vertices are v_{i,j} with 1 <= i <= h+1, 1 <= j <= 2h+2, minus (1,2h+2)
/// and (h+1,1). Distinct vertices are adjacent when they are horizontal
/// neighbours in one row, or vertical neighbours v_{i,j}, v_{i+1,j} with
/// i + j even. Vertex k of graph() carries labels()[k] (row-major order).
/// The standard drawing is encoded as a rotation system: around every vertex
/// the neighbours are ordered up, right, down, left, which is clockwise when
/// rows grow downwards.
class WallLayout {
 public:
  struct Dart {
    int edge;  // index into edges()
    bool forward;  // traversed from edges()[edge].first to .second
    bool operator==(const Dart&) const = default;
  };

  explicit WallLayout(int h);

  int height() const noexcept { return h_; }
  int vertex_count() const noexcept { return static_cast<int>(labels_.size()); }
  const std::vector<WallLabel>& labels() const noexcept { return labels_; }
  const std::vector<std::pair<int, int>>& edges() const noexcept { return edges_; }
  const MultiGraph& graph() const noexcept { return graph_; }

  bool contains(WallLabel l) const;
  /// Vertex index of a label; throws ParameterError when absent.
  int index(WallLabel l) const;
  std::optional<int> find(WallLabel l) const;
  int edge_between(int a, int b) const;  // -1 when not adjacent

  /// Indices of v_{i,2i}, 2 <= i <= h.
  std::vector<int> diagonal() const;

  /// Neighbour vertex indices of v in clockwise order.
  const std::vector<int>& rotation(int v) const { return rotation_.at(static_cast<std::size_t>(v)); }

  /// Faces of the standard drawing as cyclic dart sequences.
  const std::vector<std::vector<Dart>>& faces() const noexcept { return faces_; }
  int outer_face() const noexcept { return outer_; }

  int dart_tail(Dart d) const {
    return d.forward ? edges_[d.edge].first : edges_[d.edge].second;
  }
  int dart_head(Dart d) const {
    return d.forward ? edges_[d.edge].second : edges_[d.edge].first;
  }

 private:
  int h_;
  std::vector<WallLabel> labels_;
  std::vector<int> grid_index_;  // (i,j) -> vertex index or -1
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::vector<int>> rotation_;
  std::vector<std::vector<Dart>> faces_;
  int outer_ = -1;
  MultiGraph graph_;
};

std::shared_ptr<const WallLayout> wall_layout(int h);

/// A wall contained in a host graph: a subdivision of the elementary wall of
/// height h, given by the images of the labelled vertices and one branch
/// path per elementary edge. Construction validates every wall invariant and
/// precomputes the face structure of the standard drawing.
class Wall {
 public:
  struct Face {
    Walk boundary;  // closed walk in the host
  };

  /// Throws InputError with a description when the data is not a wall.
  static Wall from_branches(GraphPtr host, int h, std::vector<VertexId> label_images,
                            std::vector<Walk> branches);
  /// A wall whose elementary structure is given as an immersion map of
  /// layout(h).graph() that is a subdivision map.
  static Wall from_subdivision_map(const ImmersionMap& m, int h);

  int height() const noexcept { return layout_->height(); }
  const WallLayout& layout() const noexcept { return *layout_; }
  const GraphPtr& host() const noexcept { return host_; }

  VertexId at(WallLabel l) const { return label_images_.at(static_cast<std::size_t>(layout_->index(l))); }
  const std::vector<VertexId>& label_images() const noexcept { return label_images_; }
  std::optional<WallLabel> label_of(VertexId v) const;

  /// One branch per elementary edge, oriented like layout().edges().
  const std::vector<Walk>& branches() const noexcept { return branches_; }

  const std::set<VertexId>& vertices() const noexcept { return vertices_; }
  const std::set<EdgeId>& edges() const noexcept { return edges_; }
  bool contains_vertex(VertexId v) const { return vertices_.count(v) > 0; }
  bool contains_edge(EdgeId e) const { return edges_.count(e) > 0; }
  /// Degree inside the wall subgraph (0 for vertices outside it).
  int degree(VertexId v) const;
  /// Wall neighbours of v in clockwise order of the standard drawing.
  std::vector<VertexId> neighbours_clockwise(VertexId v) const;

  const std::vector<Face>& faces() const noexcept { return faces_; }
  int outer_face() const noexcept { return layout_->outer_face(); }
  /// Faces (indices) whose boundary contains v.
  const std::vector<int>& faces_at(VertexId v) const;

  /// The elementary wall immersed into the host along the branches.
  ImmersionMap subdivision_map() const;

 private:
  Wall() = default;
  void build_faces();

  std::shared_ptr<const WallLayout> layout_;
  GraphPtr host_;
  std::vector<VertexId> label_images_;
  std::vector<Walk> branches_;
  std::map<VertexId, int> label_index_;  // host vertex -> layout vertex
  std::set<VertexId> vertices_;
  std::set<EdgeId> edges_;
  std::map<VertexId, int> wall_degree_;
  std::vector<Face> faces_;
  std::map<VertexId, std::vector<int>> faces_at_;
};

std::vector<Walk> branches(const Wall& w);
std::vector<VertexId> diagonal_vertices(const Wall& w);

/// Subwall anchored at odd (i1, j1) with even height h2 >= 2. It spans rows
/// i1..i1+h2 and columns j1..j1+2*h2+1 and must fit inside the wall.
Wall subwall(const Wall& w, int i1, int j1, int h2);

/// Minimum number of points of the standard drawing met by a curve from s to
/// t, endpoints included; 0 when s == t. A curve may run through faces, and
/// every vertex it passes and every edge it crosses counts as one point.
int wall_distance(const Wall& w, VertexId s, VertexId t);
/// Distances from s to every wall vertex.
std::map<VertexId, int> wall_distances_from(const Wall& w, VertexId s);
/// Minimum distance from s to any vertex of `targets`.
int wall_distance_to_set(const Wall& w, VertexId s, const std::set<VertexId>& targets);

/// Boundary cycle of the infinite face.
Walk perimeter(const Wall& w);

/// v together with every wall vertex reachable from v along a wall path whose
/// vertices other than v all have degree two in the wall.
std::set<VertexId> surround(const Wall& w, VertexId v);

/// A fin (s, F, t): s diagonal, F a host path from s to t edge-disjoint from
/// the wall, t a wall vertex outside surround(s).
struct Fin {
  VertexId s = kNoVertex;
  Walk path;
  VertexId t = kNoVertex;
};

struct FinSystem {
  std::shared_ptr<const Wall> wall;
  std::vector<Fin> fins;
};

/// Empty violation list means the fin system is valid.
std::vector<Violation> validate_fin_system(const FinSystem& fs);

struct WallSearchResult {
  SearchStatus status = SearchStatus::kNotFound;
  std::optional<Wall> wall;
  std::uint64_t expansions = 0;
};

/// Looks for a wall of height h as a subgraph of g by placing the elementary
/// vertices one neighbour at a time and routing branches as internally
/// disjoint paths, shortest first, with backtracking.
WallSearchResult find_wall(GraphPtr g, int h, std::uint64_t budget = 10'000'000);

}  // namespace forge
