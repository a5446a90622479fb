#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace softgraph {

// Raised for malformed inputs (files, fixtures, CLI data); the CLI maps it to
// exit code 2 as opposed to internal invariant violations.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Dense row-major matrix of doubles. Shared by node features, checkpoints and
// the tensor engine.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;  // rows * cols

    Matrix() = default;
    Matrix(int r, int c, double fill = 0.0) : rows(r), cols(c), data(std::size_t(r) * c, fill) {}

    double& at(int r, int c) { return data[std::size_t(r) * cols + c]; }
    double at(int r, int c) const { return data[std::size_t(r) * cols + c]; }
    std::span<const double> row(int r) const { return {data.data() + std::size_t(r) * cols, std::size_t(cols)}; }

    bool operator==(const Matrix&) const = default;
};

// One undirected edge with a soft weight in (0, 1].
struct UndirectedEdge {
    int u = 0;
    int v = 0;
    double weight = 1.0;

    bool operator==(const UndirectedEdge&) const = default;
};

// A directed arc as stored internally; undirected edges appear as both (u,v)
// and (v,u) with the same weight.
struct Arc {
    int src = 0;
    int dst = 0;
    double weight = 1.0;

    bool operator==(const Arc&) const = default;
};

// Immutable undirected graph with soft edge weights and a class label.
// Arcs are kept sorted by (src, dst) with a CSR-style offset index, so
// neighborhoods enumerate in ascending node order.
class Graph {
public:
    // Validates and symmetrizes: every edge must have u != v, endpoints in
    // range, weight in (0, 1], and no duplicate undirected edge.
    Graph(int num_nodes, Matrix node_features, const std::vector<UndirectedEdge>& edges,
          int label);

    int num_nodes() const { return num_nodes_; }
    int feature_dim() const { return features_.cols; }
    int label() const { return label_; }
    const Matrix& features() const { return features_; }

    // Directed arc list, sorted by (src, dst); size is twice the number of
    // undirected edges.
    const std::vector<Arc>& arcs() const { return arcs_; }
    std::size_t num_undirected_edges() const { return arcs_.size() / 2; }

    // All (u, weight) with an arc v->u, ascending in u.
    std::span<const Arc> neighbors(int v) const;

    // 1 + sum of incident edge weights (the self term contributes 1).
    double degree_weighted(int v) const;

    // Relabels nodes: node i becomes perm[i]. perm must be a bijection on
    // {0..N-1}.
    Graph permute(const std::vector<int>& perm) const;

    // Same graph with every edge weight replaced by 1.
    Graph with_unit_weights() const;

    // Undirected edge list (u < v), in arc order.
    std::vector<UndirectedEdge> undirected_edges() const;

    bool operator==(const Graph&) const = default;

private:
    int num_nodes_ = 0;
    int label_ = 0;
    Matrix features_;
    std::vector<Arc> arcs_;
    std::vector<std::size_t> offsets_;  // CSR: arcs of node v are [offsets_[v], offsets_[v+1])

    void build_index();
};

// Ordered collection of graphs with a uniform feature space.
struct Dataset {
    std::string name;
    int num_classes = 0;
    int feature_dim = 0;
    std::vector<Graph> graphs;

    // Checks label range and feature-dim uniformity.
    void validate() const;
};

}  // namespace softgraph
