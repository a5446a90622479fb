#include "softgraph/fixtures.hpp"

namespace softgraph::fixtures {
namespace {

Matrix uniform_feature(int n) { return Matrix(n, 1, 1.0); }

Graph path_with_chords(int n, const std::vector<std::pair<int, int>>& chords, int label) {
    std::vector<UndirectedEdge> edges;
    for (int v = 0; v + 1 < n; v++) edges.push_back({v, v + 1, 1.0});
    for (auto [u, v] : chords) edges.push_back({u, v, 1.0});
    return Graph(n, uniform_feature(n), edges, label);
}

}  // namespace

Graph decalin(int label) {
    // Hexagons 0-1-2-3-4-5 and 0-5-6-7-8-9 sharing edge (0,5).
    std::vector<UndirectedEdge> edges = {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 0},
                                         {5, 6}, {6, 7}, {7, 8}, {8, 9}, {9, 0}};
    return Graph(10, uniform_feature(10), edges, label);
}

Graph bicyclopentyl(int label) {
    // Pentagons 0-1-2-3-4 and 5-6-7-8-9 with bridge (0,5).
    std::vector<UndirectedEdge> edges = {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}, {5, 6},
                                         {6, 7}, {7, 8}, {8, 9}, {9, 5}, {0, 5}};
    return Graph(10, uniform_feature(10), edges, label);
}

Dataset wl_pair_dataset() {
    Dataset ds;
    ds.name = "WLPAIR";
    ds.num_classes = 2;
    ds.feature_dim = 1;
    ds.graphs = {decalin(0), bicyclopentyl(1)};
    ds.validate();
    return ds;
}

Dataset collision_pairs_dataset() {
    Dataset ds;
    ds.name = "COLPAIRS";
    ds.num_classes = 2;
    ds.feature_dim = 1;
    // Pair 1: 10-node path + one chord, at the end vs. in the middle.
    ds.graphs.push_back(path_with_chords(10, {{0, 2}}, 0));
    ds.graphs.push_back(path_with_chords(10, {{3, 5}}, 1));
    // Pair 2: 9-node path + two chords.
    ds.graphs.push_back(path_with_chords(9, {{0, 2}, {4, 6}}, 0));
    ds.graphs.push_back(path_with_chords(9, {{2, 4}, {5, 7}}, 1));
    // Pair 3: 8-node path + three chords.
    ds.graphs.push_back(path_with_chords(8, {{0, 2}, {2, 4}, {4, 6}}, 0));
    ds.graphs.push_back(path_with_chords(8, {{1, 3}, {3, 5}, {5, 7}}, 1));
    ds.validate();
    return ds;
}

Dataset toy_separable_dataset() {
    Dataset ds;
    ds.name = "TOYSEP";
    ds.num_classes = 2;
    ds.feature_dim = 1;
    auto clique = [](int n, int label) {
        std::vector<UndirectedEdge> edges;
        for (int u = 0; u < n; u++)
            for (int v = u + 1; v < n; v++) edges.push_back({u, v, 1.0});
        return Graph(n, uniform_feature(n), edges, label);
    };
    for (int i = 0; i < 4; i++) ds.graphs.push_back(clique(3, 0));
    for (int i = 0; i < 4; i++) ds.graphs.push_back(clique(8, 1));
    ds.validate();
    return ds;
}

}  // namespace softgraph::fixtures
