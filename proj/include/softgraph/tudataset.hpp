#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "softgraph/graph.hpp"

namespace softgraph {

// File set of one dataset in the TUDataset flat format. Mandatory files are
// adjacency / graph_indicator / graph_labels; the rest are optional.
// edge_weights is this repo's sidecar extension: one real per adjacency row,
// in the same order as <DS>_A.txt.
struct TuDatasetFiles {
    std::string name;
    std::filesystem::path adjacency;
    std::filesystem::path graph_indicator;
    std::filesystem::path graph_labels;
    std::optional<std::filesystem::path> node_labels;
    std::optional<std::filesystem::path> node_attributes;
    std::optional<std::filesystem::path> edge_weights;

    // Locates <name>_*.txt under dir/name. By default node_attributes are
    // referenced only when no node_labels file exists, which matches the
    // benchmark convention for feature dimensions; use_node_attributes forces
    // them in. An <DS>_edge_labels.txt file, if present, is ignored by the
    // loader (a warning is printed).
    static TuDatasetFiles discover(const std::filesystem::path& dir, const std::string& name,
                                   bool use_node_attributes = false);
};

// Appendix-style dataset summary. avg_edges counts directed arc rows (each
// undirected edge contributes 2).
struct DatasetStats {
    std::size_t num_graphs = 0;
    double avg_nodes = 0.0;
    double avg_edges = 0.0;
    int feature_dim = 0;
    int num_classes = 0;

    std::string csv_row(const std::string& name) const;
};

// Parses the file set into a Dataset: node labels one-hot encoded (one column
// per distinct value, ascending), attributes appended when both are present,
// graph labels remapped to contiguous {0..C-1} in ascending original order,
// arcs symmetrized and de-duplicated. Weights come from the sidecar when
// referenced (both directions must agree), else 1.
Dataset load_tudataset(const TuDatasetFiles& files);

DatasetStats compute_stats(const Dataset& ds);

// Emits a format-conformant file set under dir/<ds.name> such that
// load_tudataset inverts it. Features that are exactly one-hot rows are
// written as node labels; anything else goes to node_attributes. The weights
// sidecar is written when any edge weight differs from 1 (or when forced).
TuDatasetFiles write_fixture(const Dataset& ds, const std::filesystem::path& dir,
                             bool force_weight_sidecar = false);

}  // namespace softgraph
