#include <doctest.h>

#include "softgraph/graph.hpp"
#include "test_util.hpp"

using namespace softgraph;

namespace {

Graph triangle() {
    return Graph(3, Matrix(3, 1, 1.0), {{0, 1, 1.0}, {1, 2, 1.0}, {2, 0, 1.0}}, 0);
}

}  // namespace

TEST_CASE("neighbors enumerates ascending with weights") {
    const Graph g = triangle();
    const auto nbr = g.neighbors(1);
    REQUIRE(nbr.size() == 2);
    CHECK(nbr[0].dst == 0);
    CHECK(nbr[0].weight == 1.0);
    CHECK(nbr[1].dst == 2);
    CHECK(nbr[1].weight == 1.0);
}

TEST_CASE("neighbors of an isolated node is empty") {
    const Graph g(1, Matrix(1, 1, 1.0), {}, 0);
    CHECK(g.neighbors(0).empty());
}

TEST_CASE("neighbors on a weighted path") {
    const Graph g(2, Matrix(2, 1, 1.0), {{0, 1, 0.3}}, 0);
    const auto nbr = g.neighbors(0);
    REQUIRE(nbr.size() == 1);
    CHECK(nbr[0].dst == 1);
    CHECK(nbr[0].weight == doctest::Approx(0.3));
    CHECK_THROWS_AS((void)g.neighbors(2), std::out_of_range);
}

TEST_CASE("degree_weighted includes the self term") {
    const Graph isolated(1, Matrix(1, 1, 1.0), {}, 0);
    CHECK(isolated.degree_weighted(0) == 1.0);

    const Graph g = triangle();
    CHECK(g.degree_weighted(0) == 3.0);  // 1 + 1 + 1

    const Graph weighted(3, Matrix(3, 1, 1.0), {{0, 1, 0.5}, {0, 2, 0.25}}, 0);
    CHECK(weighted.degree_weighted(0) == doctest::Approx(1.75));
}

TEST_CASE("permute identity and involution") {
    const Graph g = triangle();
    CHECK(g.permute({0, 1, 2}) == g);

    const Graph path(2, Matrix(2, 1, 1.0), {{0, 1, 0.7}}, 1);
    const Graph swapped = path.permute({1, 0});
    const auto nbr = swapped.neighbors(0);
    REQUIRE(nbr.size() == 1);
    CHECK(nbr[0].dst == 1);
    CHECK(nbr[0].weight == doctest::Approx(0.7));
    CHECK(swapped.permute({1, 0}) == path);
}

TEST_CASE("permute rejects non-bijections") {
    const Graph g = triangle();
    CHECK_THROWS_AS(g.permute({0, 0, 1}), std::invalid_argument);
    CHECK_THROWS_AS(g.permute({0, 1}), std::invalid_argument);
}

TEST_CASE("constructor validates weights, ranges and duplicates") {
    Matrix f(2, 1, 1.0);
    CHECK_THROWS_AS(Graph(2, f, {{0, 1, 0.0}}, 0), DataError);
    CHECK_THROWS_AS(Graph(2, f, {{0, 1, 1.5}}, 0), DataError);
    CHECK_THROWS_AS(Graph(2, f, {{0, 0, 1.0}}, 0), DataError);
    CHECK_THROWS_AS(Graph(2, f, {{0, 2, 1.0}}, 0), DataError);
    CHECK_THROWS_AS(Graph(2, f, {{0, 1, 1.0}, {1, 0, 0.5}}, 0), DataError);
    CHECK_THROWS_AS(Graph(0, Matrix(0, 1), {}, 0), DataError);
}

TEST_CASE("arc symmetry and weight range hold for random graphs") {
    SplitMix64 rng(2024);
    for (int trial = 0; trial < 50; trial++) {
        const Graph g = testing::random_graph(rng, 2 + int(rng.below(10)), 3, 0.4, true);
        for (const auto& a : g.arcs()) {
            CHECK(a.weight > 0.0);
            CHECK(a.weight <= 1.0);
            bool has_reverse = false;
            for (const auto& r : g.neighbors(a.dst))
                if (r.dst == a.src && r.weight == a.weight) has_reverse = true;
            CHECK(has_reverse);
        }
    }
}

TEST_CASE("permute round trip is the identity for random graphs and perms") {
    SplitMix64 rng(99);
    for (int trial = 0; trial < 30; trial++) {
        const int n = 2 + int(rng.below(9));
        const Graph g = testing::random_graph(rng, n, 2, 0.5, true);
        const auto perm = testing::random_permutation(rng, n);
        std::vector<int> inverse(perm.size());
        for (int i = 0; i < n; i++) inverse[std::size_t(perm[std::size_t(i)])] = i;
        CHECK(g.permute(perm).permute(inverse) == g);
    }
}

TEST_CASE("degree_weighted equals 1 + unweighted degree on unit graphs") {
    SplitMix64 rng(7);
    for (int trial = 0; trial < 20; trial++) {
        const Graph g = testing::random_graph(rng, 2 + int(rng.below(8)), 2, 0.5, false);
        for (int v = 0; v < g.num_nodes(); v++)
            CHECK(g.degree_weighted(v) == doctest::Approx(1.0 + double(g.neighbors(v).size())));
    }
}
