#include "softgraph/graph.hpp"

#include <algorithm>
#include <set>

namespace softgraph {

Graph::Graph(int num_nodes, Matrix node_features, const std::vector<UndirectedEdge>& edges,
             int label)
    : num_nodes_(num_nodes), label_(label), features_(std::move(node_features)) {
    if (num_nodes_ < 1) throw DataError("graph must have at least one node");
    if (features_.rows != num_nodes_ || features_.cols < 1)
        throw DataError("node feature matrix must be N x d with d >= 1");
    if (label_ < 0) throw DataError("negative class label");

    arcs_.reserve(edges.size() * 2);
    for (const auto& e : edges) {
        if (e.u < 0 || e.u >= num_nodes_ || e.v < 0 || e.v >= num_nodes_)
            throw DataError("edge endpoint out of range");
        if (e.u == e.v) throw DataError("self-loops cannot be stored");
        if (!(e.weight > 0.0) || e.weight > 1.0)
            throw DataError("edge weight must lie in (0, 1]");
        arcs_.push_back({e.u, e.v, e.weight});
        arcs_.push_back({e.v, e.u, e.weight});
    }
    std::sort(arcs_.begin(), arcs_.end(),
              [](const Arc& a, const Arc& b) { return std::tie(a.src, a.dst) < std::tie(b.src, b.dst); });
    for (std::size_t i = 1; i < arcs_.size(); i++) {
        if (arcs_[i - 1].src == arcs_[i].src && arcs_[i - 1].dst == arcs_[i].dst)
            throw DataError("duplicate edge");
    }
    build_index();
}

void Graph::build_index() {
    offsets_.assign(std::size_t(num_nodes_) + 1, 0);
    for (const auto& a : arcs_) offsets_[std::size_t(a.src) + 1]++;
    for (int v = 0; v < num_nodes_; v++) offsets_[std::size_t(v) + 1] += offsets_[v];
}

std::span<const Arc> Graph::neighbors(int v) const {
    if (v < 0 || v >= num_nodes_) throw std::out_of_range("node index out of range");
    return {arcs_.data() + offsets_[v], offsets_[std::size_t(v) + 1] - offsets_[v]};
}

double Graph::degree_weighted(int v) const {
    double d = 1.0;
    for (const auto& a : neighbors(v)) d += a.weight;
    return d;
}

Graph Graph::permute(const std::vector<int>& perm) const {
    if (static_cast<int>(perm.size()) != num_nodes_)
        throw std::invalid_argument("permutation size mismatch");
    std::vector<bool> seen(perm.size(), false);
    for (int p : perm) {
        if (p < 0 || p >= num_nodes_ || seen[p]) throw std::invalid_argument("not a bijection");
        seen[p] = true;
    }
    Matrix feats(num_nodes_, features_.cols);
    for (int v = 0; v < num_nodes_; v++)
        for (int c = 0; c < features_.cols; c++) feats.at(perm[v], c) = features_.at(v, c);
    std::vector<UndirectedEdge> edges;
    edges.reserve(num_undirected_edges());
    for (const auto& a : arcs_)
        if (a.src < a.dst) edges.push_back({perm[a.src], perm[a.dst], a.weight});
    return Graph(num_nodes_, std::move(feats), edges, label_);
}

Graph Graph::with_unit_weights() const {
    std::vector<UndirectedEdge> edges;
    edges.reserve(num_undirected_edges());
    for (const auto& a : arcs_)
        if (a.src < a.dst) edges.push_back({a.src, a.dst, 1.0});
    return Graph(num_nodes_, features_, edges, label_);
}

std::vector<UndirectedEdge> Graph::undirected_edges() const {
    std::vector<UndirectedEdge> edges;
    edges.reserve(num_undirected_edges());
    for (const auto& a : arcs_)
        if (a.src < a.dst) edges.push_back({a.src, a.dst, a.weight});
    return edges;
}

void Dataset::validate() const {
    for (const auto& g : graphs) {
        if (g.feature_dim() != feature_dim) throw DataError("feature dim mismatch in dataset");
        if (g.label() >= num_classes) throw DataError("graph label out of range");
    }
}

}  // namespace softgraph
