#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "softgraph/graph.hpp"
#include "softgraph/tensor.hpp"

namespace softgraph {

enum class Arch { ResGCN, GIN };

Arch arch_from_string(const std::string& s);
std::string to_string(Arch a);

// Readout defaults: Sum for GIN, Mean for ResGCN.
Readout default_readout(Arch a);
Readout readout_from_string(const std::string& s);
std::string to_string(Readout r);

struct ModelConfig {
    Arch arch = Arch::GIN;
    int num_layers = 5;
    int hidden_dim = 64;
    Readout readout = Readout::Sum;
    double dropout_after_dense = 0.0;
    bool gin_epsilon_learnable = false;
    // Data-dependent dimensions, fixed at init time.
    int input_dim = 0;
    int num_classes = 0;

    void validate() const;
};

// Named trainable matrices in a fixed order. GCN layers hold one weight
// matrix each (no bias, per the normalized aggregation form); GIN layers hold
// a 2-layer MLP plus a scalar epsilon; both close with one dense head.
struct ModelParams {
    struct Entry {
        std::string name;
        Matrix value;
        bool trainable = true;
    };
    std::vector<Entry> entries;

    static ModelParams init(const ModelConfig& cfg, std::uint64_t seed);
    std::size_t total_values() const;
};

// Block-diagonal batch: node sets concatenated, arcs offset, one segment id
// per node. The layer forwards read the graph structure from here, so a test
// harness can feed arc weights (including zeros) directly.
struct BatchView {
    int total_nodes = 0;
    int num_graphs = 0;
    Matrix features;
    std::vector<int> arc_src;
    std::vector<int> arc_tgt;
    std::vector<double> arc_weight;
    std::vector<int> segment;
    std::vector<int> labels;

    static BatchView from_graphs(const std::vector<const Graph*>& graphs);
    static BatchView from_graph(const Graph& g);
};

// One weighted-GCN layer: ReLU(W * sum over u in N(v) and v itself of
// (e_uv / sqrt(dhat_u dhat_v)) h_u), with dhat = 1 + weighted degree.
Tensor gcn_layer_forward(Tape& tape, Tensor h, const BatchView& g, Tensor weight);

// One weighted-GIN layer: MLP((1 + eps) h_v + sum e_uv h_u), MLP = Linear ->
// ReLU -> Linear.
Tensor gin_layer_forward(Tape& tape, Tensor h, const BatchView& g, Tensor w1, Tensor b1,
                         Tensor w2, Tensor b2, Tensor eps);

struct ForwardResult {
    Tensor logits;      // num_graphs x C
    Tensor embeddings;  // num_graphs x hidden (readout output, pre-dropout)
    std::vector<Tensor> params;  // leaves aligned with ModelParams.entries
};

// Stacks the configured layers, applies the readout and the dense head.
// dropout_rng is only consulted when train_mode and dropout > 0.
ForwardResult forward_batch(Tape& tape, const BatchView& batch, const ModelParams& params,
                            const ModelConfig& cfg, bool train_mode,
                            SplitMix64* dropout_rng = nullptr);

ForwardResult forward_graph(Tape& tape, const Graph& g, const ModelParams& params,
                            const ModelConfig& cfg, bool train_mode,
                            SplitMix64* dropout_rng = nullptr);

// Versioned JSON checkpoint of config + parameter arrays.
void save_checkpoint(const ModelConfig& cfg, const ModelParams& params,
                     const std::filesystem::path& path);
std::pair<ModelConfig, ModelParams> load_checkpoint(const std::filesystem::path& path);

}  // namespace softgraph
