#include "softgraph/augment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace softgraph {

AugmentMethod augment_method_from_string(const std::string& s) {
    if (s == "none") return AugmentMethod::None;
    if (s == "softedge") return AugmentMethod::SoftEdge;
    if (s == "dropedge") return AugmentMethod::DropEdge;
    if (s == "dropnode") return AugmentMethod::DropNode;
    throw std::invalid_argument("unknown augmentation method: " + s);
}

std::string to_string(AugmentMethod m) {
    switch (m) {
        case AugmentMethod::None: return "none";
        case AugmentMethod::SoftEdge: return "softedge";
        case AugmentMethod::DropEdge: return "dropedge";
        case AugmentMethod::DropNode: return "dropnode";
    }
    return "?";
}

void AugmentSpec::validate() const {
    if (ratio < 0.0 || ratio > 1.0) throw std::invalid_argument("ratio must lie in [0, 1]");
}

Graph soft_edge(const Graph& g, const AugmentSpec& spec, SplitMix64& rng) {
    spec.validate();
    auto edges = g.undirected_edges();
    const std::size_t m = edges.size();
    const auto k = static_cast<std::size_t>(std::ceil(spec.ratio * double(m)));
    if (k == 0) return g;
    for (std::size_t idx : sample_without_replacement(rng, m, k))
        edges[idx].weight = rng.uniform_open01();
    return Graph(g.num_nodes(), g.features(), edges, g.label());
}

Graph drop_edge(const Graph& g, const AugmentSpec& spec, SplitMix64& rng) {
    spec.validate();
    auto edges = g.undirected_edges();
    const std::size_t m = edges.size();
    const auto k = static_cast<std::size_t>(std::ceil(spec.ratio * double(m)));
    if (k == 0) return g;
    auto drop = sample_without_replacement(rng, m, k);
    std::sort(drop.begin(), drop.end());
    std::vector<UndirectedEdge> kept;
    kept.reserve(m - k);
    std::size_t next = 0;
    for (std::size_t i = 0; i < m; i++) {
        if (next < drop.size() && drop[next] == i) next++;
        else kept.push_back(edges[i]);
    }
    return Graph(g.num_nodes(), g.features(), kept, g.label());
}

Graph drop_node(const Graph& g, const AugmentSpec& spec, SplitMix64& rng) {
    spec.validate();
    const auto n = static_cast<std::size_t>(g.num_nodes());
    auto k = static_cast<std::size_t>(std::floor(spec.ratio * double(n)));
    if (k >= n) k = n - 1;  // at least one survivor
    if (k == 0) return g;
    auto drop = sample_without_replacement(rng, n, k);
    std::vector<bool> dropped(n, false);
    for (std::size_t v : drop) dropped[v] = true;
    std::vector<int> remap(n, -1);
    int kept = 0;
    for (std::size_t v = 0; v < n; v++)
        if (!dropped[v]) remap[v] = kept++;
    Matrix feats(kept, g.feature_dim());
    for (std::size_t v = 0; v < n; v++)
        if (!dropped[v])
            for (int c = 0; c < g.feature_dim(); c++) feats.at(remap[v], c) = g.features().at(int(v), c);
    std::vector<UndirectedEdge> edges;
    for (const auto& e : g.undirected_edges())
        if (!dropped[std::size_t(e.u)] && !dropped[std::size_t(e.v)])
            edges.push_back({remap[std::size_t(e.u)], remap[std::size_t(e.v)], e.weight});
    return Graph(kept, std::move(feats), edges, g.label());
}

Graph augment_graph(const Graph& g, const AugmentSpec& spec, SplitMix64& rng) {
    switch (spec.method) {
        case AugmentMethod::None: return g;
        case AugmentMethod::SoftEdge: return soft_edge(g, spec, rng);
        case AugmentMethod::DropEdge: return drop_edge(g, spec, rng);
        case AugmentMethod::DropNode: return g.num_nodes() >= 2 ? drop_node(g, spec, rng) : g;
    }
    throw std::logic_error("unreachable");
}

Dataset augment_epoch(const Dataset& ds, const AugmentSpec& spec, std::uint64_t epoch) {
    if (spec.method == AugmentMethod::None || spec.ratio == 0.0) return ds;
    Dataset out;
    out.name = ds.name;
    out.num_classes = ds.num_classes;
    out.feature_dim = ds.feature_dim;
    out.graphs.reserve(ds.graphs.size());
    for (std::size_t i = 0; i < ds.graphs.size(); i++) {
        SplitMix64 rng(derive_stream(spec.seed, epoch, i));
        out.graphs.push_back(augment_graph(ds.graphs[i], spec, rng));
    }
    return out;
}

}  // namespace softgraph
