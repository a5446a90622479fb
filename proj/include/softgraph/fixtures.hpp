#pragma once

#include "softgraph/graph.hpp"

namespace softgraph::fixtures {

// Decalin: two fused 6-cycles sharing one edge. 10 nodes, 11 undirected
// edges, a single uniform node feature (carbon).
Graph decalin(int label = 0);

// Bicyclopentyl: two 5-cycles joined by a bridge edge. Same size as decalin
// and indistinguishable from it by the classical 1-WL test.
Graph bicyclopentyl(int label = 1);

// Two-graph dataset of the pair above with opposite labels.
Dataset wl_pair_dataset();

// Three pairs of 10-edge graphs with opposite labels. The two graphs of a
// pair differ only in where 1 / 2 / 3 chord edges sit on a shared path
// skeleton, so edge deletion can collapse both onto the same remainder -
// the situation the collision audit is built to expose.
Dataset collision_pairs_dataset();

// Tiny two-class set separable by graph size (triangles vs. 8-cliques used
// as an easily memorized training target).
Dataset toy_separable_dataset();

}  // namespace softgraph::fixtures
