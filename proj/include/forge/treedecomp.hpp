#pragma once

#include <map>
#include <vector>

#include "forge/immersion.hpp"
#include "forge/multigraph.hpp"

namespace forge {

/// A tree T together with one bag of host vertices per tree node. Nodes
/// without an entry in `bags` have an empty bag.
struct TreeDecomposition {
  MultiGraph tree;
  std::map<int, std::vector<VertexId>> bags;

  const std::vector<VertexId>& bag(int t) const;
};

/// Axioms, numbered as reported in violations:
///   1 T is a tree
///   2 every bag is a subset of V(G)
///   3 every vertex of G lies in some bag
///   4 both ends of every edge lie in a common bag
///   5 W_t and W_t'' meet inside W_t' whenever t' is on the t-t'' path
/// Throws InputError when a bag is keyed by a node T does not have.
Verdict verify_decomposition(const MultiGraph& g, const TreeDecomposition& d);

/// Largest bag size minus one; ParameterError on a decomposition without nodes.
int width(const TreeDecomposition& d);

/// Turns an elimination order into a decomposition whose width is the
/// largest neighbourhood met while eliminating.
TreeDecomposition decomposition_from_order(const MultiGraph& g, const std::vector<VertexId>& order);

struct TreewidthResult {
  int width = 0;
  TreeDecomposition decomposition;
  std::vector<VertexId> order;  // optimal elimination order
};

/// Exact tree-width by dynamic programming over vertex subsets. Loops and
/// parallel edges are dropped first. ParameterError when the graph has more
/// than `limit` vertices. Subset layers of equal size are filled in parallel.
TreewidthResult exact_treewidth(const MultiGraph& g, int limit = 12);

/// Same table filled by one thread in subset order; kept as the reference
/// for the parallel version.
TreewidthResult exact_treewidth_serial(const MultiGraph& g, int limit = 12);

}  // namespace forge
