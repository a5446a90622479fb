#pragma once

#include <cstdint>
#include <string>

#include "softgraph/graph.hpp"

namespace softgraph::checks {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

// Repeated SoftEdge draws on one graph must never repeat a weight vector.
CheckResult lemma2_check(const Graph& g, double lambda, std::size_t trials, std::uint64_t seed);

// The decalin / bicyclopentyl pair: classically WL-indistinguishable with
// matching GNN embeddings, separated by independent soft-edge draws in at
// least `required` of `trials` attempts (both in signature and embedding).
CheckResult lemma3_check(std::size_t trials, std::size_t required, std::uint64_t seed);

// Forward with zeroed weights on a random edge subset equals forward on the
// graph with that subset deleted, within 1e-12, for both architectures.
CheckResult dropedge_equivalence_check(std::size_t trials, std::uint64_t seed);

// End-to-end loss gradients vs. central finite differences (h = 1e-5,
// relative error < 1e-4) for 3-layer GIN and ResGCN on random 5-node graphs.
CheckResult gradient_check(std::size_t trials, std::uint64_t seed);

}  // namespace softgraph::checks
