#pragma once

#include <cstdint>
#include <string>

#include "softgraph/graph.hpp"
#include "softgraph/rng.hpp"

namespace softgraph {

enum class AugmentMethod { None, SoftEdge, DropEdge, DropNode };

AugmentMethod augment_method_from_string(const std::string& s);
std::string to_string(AugmentMethod m);

// Augmentation policy: method, edge/node ratio, and the base seed from which
// per-(epoch, graph) streams are derived.
struct AugmentSpec {
    AugmentMethod method = AugmentMethod::None;
    double ratio = 0.0;  // lambda in [0, 1]; 1 covers every edge/node
    std::uint64_t seed = 0;

    void validate() const;
};

// Assigns a fresh uniform-(0,1) weight to ceil(lambda * |E|) undirected edges
// sampled without replacement; both arcs of a selected edge share the draw.
// Nodes, features, arc set and label are untouched.
Graph soft_edge(const Graph& g, const AugmentSpec& spec, SplitMix64& rng);

// Removes ceil(lambda * |E|) undirected edges.
Graph drop_edge(const Graph& g, const AugmentSpec& spec, SplitMix64& rng);

// Removes floor(lambda * N) nodes with their incident edges; survivors are
// re-indexed contiguously in their original relative order. At least one node
// always survives.
Graph drop_node(const Graph& g, const AugmentSpec& spec, SplitMix64& rng);

Graph augment_graph(const Graph& g, const AugmentSpec& spec, SplitMix64& rng);

// One augmented copy of the dataset; graph i uses the stream derived from
// (spec.seed, epoch, i), so the result is independent of evaluation order.
Dataset augment_epoch(const Dataset& ds, const AugmentSpec& spec, std::uint64_t epoch);

}  // namespace softgraph
