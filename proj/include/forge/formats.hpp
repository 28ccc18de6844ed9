#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "forge/generators.hpp"
#include "forge/immersion.hpp"
#include "forge/lifting.hpp"
#include "forge/multigraph.hpp"
#include "forge/treedecomp.hpp"
#include "forge/wall.hpp"

namespace forge {

// Text formats. Every serializer starts with the line "format: 1"; parsers
// accept the header as optional, skip blank lines and lines starting with
// '#', and throw InputError("line N: ...") on malformed input.

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

/// "n m" then m lines "u v"; edge id = position among edge lines.
MultiGraph parse_graph(const std::string& text);
/// Live edges in id order. Ids are renumbered 0.. when the graph has holes
/// left by deleted edges.
std::string serialize_graph(const MultiGraph& g);

/// Alternating ids "v0 e1 v1 ... ek vk".
Walk parse_walk(const std::string& text);
std::string serialize_walk(const Walk& w);

/// "v p -> h" lines then "e p -> walk" lines.
ImmersionMap parse_map(const std::string& text, GraphPtr pattern, GraphPtr host);
std::string serialize_map(const ImmersionMap& m);

/// "label: i j -> vertex" lines of a grid.
std::string serialize_grid_labeling(const GridLabeling& l);
std::map<std::pair<int, int>, VertexId> parse_labeling(const std::string& text);

/// Label lines followed by "branch (i,j)-(i',j'): walk" lines, one per
/// elementary edge. The height is read off the labels.
std::string serialize_wall(const Wall& w);
Wall parse_wall(const std::string& text, GraphPtr host);

/// "t n", then "T u v" tree edges, then "B t: v1 v2 ..." bags.
std::string serialize_decomposition(const TreeDecomposition& d);
TreeDecomposition parse_decomposition(const std::string& text);

/// "lift v: -d1 -d2 +d0(u1,u2)", one record per line.
LiftRecord parse_lift_record(const std::string& line);
std::string serialize_lift_history(const std::vector<LiftRecord>& history);
std::vector<LiftRecord> parse_lift_history(const std::string& text);

/// "fin (i,j): walk" per fin, keyed by the wall label of its root.
std::string serialize_fins(const FinSystem& fs);
std::vector<std::pair<WallLabel, Walk>> parse_fin_lines(const std::string& text);
FinSystem parse_fins(const std::string& text, std::shared_ptr<const Wall> wall);

/// Whitespace or comma separated ids.
std::vector<int> parse_id_list(const std::string& text);

/// Graphviz text. Parallel edges become separate statements. A wall overlay
/// labels its vertices and colours its branches; a map overlay (host = g)
/// marks vertex images and gives each edge image its own colour.
std::string export_dot(const MultiGraph& g, const Wall* wall = nullptr, const ImmersionMap* map = nullptr);

}  // namespace forge
