#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "softgraph/augment.hpp"
#include "softgraph/digest.hpp"
#include "softgraph/graph.hpp"

namespace softgraph {

// Canonical summary of a graph under k rounds of 1-WL color refinement.
// Equal signatures (same rounds, same variant) mean the test cannot tell the
// graphs apart; for weighted=false this is the classical 1-WL test, for
// weighted=true edge weights participate in the color hash at full double
// precision.
struct WlSignature {
    int rounds = 0;
    bool weighted = false;
    Digest128 hash;

    bool operator==(const WlSignature&) const = default;
};

// Initial color = hash of the node's feature row; each round
//   color(v) <- H(color(v), sorted multiset of neighbor contributions)
// where a contribution is color(u), or (color(u), bits(e_uv)) when weighted.
// The signature hashes the sorted final color multiset with a graph-size
// prefix.
WlSignature wl_refine(const Graph& g, int k, bool weighted);

// Reference to one synthetic graph in an audit pool.
struct SyntheticRef {
    std::uint64_t epoch = 0;     // 1-based epoch that generated it
    std::size_t graph_index = 0;  // index of its original in the dataset

    bool operator==(const SyntheticRef&) const = default;
};

// Witness pairs and exact counts for the three collision types:
//   type 1: synthetic vs. original, equal signature, different label
//   type 2: synthetic vs. synthetic, equal signature, different label
//   type 3: original vs. original, WL-indistinguishable, different label
// Counts are exact; witness lists are truncated at witness_cap.
struct CollisionReport {
    std::string dataset;
    AugmentSpec spec;
    int rounds = 0;
    std::uint64_t epochs = 0;

    std::size_t type1_count = 0;
    std::size_t type2_count = 0;
    std::size_t type3_count = 0;
    std::vector<std::pair<SyntheticRef, std::size_t>> type1;
    std::vector<std::pair<SyntheticRef, SyntheticRef>> type2;
    std::vector<std::pair<std::size_t, std::size_t>> type3;
    std::size_t witness_cap = 100;
};

// Generates `epochs` augmented copies of the dataset (none when method=None),
// computes weighted signatures over the synthetic pool and unweighted
// signatures over the originals, and groups by signature to find collisions.
// Type-2 pairs are searched across the whole epoch pool.
CollisionReport audit_dataset(const Dataset& ds, const AugmentSpec& spec, int k,
                              std::uint64_t epochs, std::size_t witness_cap = 100);

// Deterministic JSON rendering (stable key order, no volatile fields).
std::string report_to_json(const CollisionReport& report);
std::string report_to_text(const CollisionReport& report);

struct Lemma2Result {
    std::size_t trials = 0;
    std::size_t collisions = 0;        // identical weight-vector pairs
    bool lambda_zero_identity = false;  // ratio 0 makes the transform the identity
};

// Applies soft_edge `trials` times with independent streams and counts pairs
// of runs that produced the exact same weight vector.
Lemma2Result verify_lemma2(const Graph& g, double lambda, std::size_t trials,
                           std::uint64_t seed);

// Default refinement depth for a dataset: max node count over its graphs.
int default_wl_rounds(const Dataset& ds);

}  // namespace softgraph
