#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "softgraph/fixtures.hpp"
#include "softgraph/tudataset.hpp"
#include "test_util.hpp"

using namespace softgraph;

namespace {

const std::filesystem::path kDataDir = TEST_DATA_DIR;

std::filesystem::path temp_dir(const std::string& tag) {
    auto dir = std::filesystem::temp_directory_path() / ("softgraph_test_" + tag);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

bool dataset_close(const Dataset& a, const Dataset& b, double tol) {
    if (a.graphs.size() != b.graphs.size() || a.num_classes != b.num_classes ||
        a.feature_dim != b.feature_dim)
        return false;
    for (std::size_t i = 0; i < a.graphs.size(); i++) {
        const Graph& ga = a.graphs[i];
        const Graph& gb = b.graphs[i];
        if (ga.num_nodes() != gb.num_nodes() || ga.label() != gb.label()) return false;
        if (ga.arcs().size() != gb.arcs().size()) return false;
        for (std::size_t k = 0; k < ga.arcs().size(); k++) {
            if (ga.arcs()[k].src != gb.arcs()[k].src || ga.arcs()[k].dst != gb.arcs()[k].dst)
                return false;
            if (std::abs(ga.arcs()[k].weight - gb.arcs()[k].weight) > tol) return false;
        }
        for (std::size_t k = 0; k < ga.features().data.size(); k++)
            if (std::abs(ga.features().data[k] - gb.features().data[k]) > tol) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("MUTAG matches the published statistics") {
    const Dataset ds = load_tudataset(TuDatasetFiles::discover(kDataDir, "MUTAG"));
    CHECK(ds.graphs.size() == 188);
    const DatasetStats s = compute_stats(ds);
    CHECK(s.avg_nodes == doctest::Approx(17.9).epsilon(0.01));
    CHECK(s.avg_edges == doctest::Approx(39.6).epsilon(0.01));
    CHECK(s.feature_dim == 7);
    CHECK(s.num_classes == 2);
    CHECK(s.csv_row("MUTAG") == "MUTAG,188,17.9,39.6,7,2");
    for (const auto& g : ds.graphs)
        for (const auto& a : g.arcs()) CHECK(a.weight == 1.0);
}

TEST_CASE("NCI1 and ENZYMES match the published statistics") {
    const Dataset nci1 = load_tudataset(TuDatasetFiles::discover(kDataDir, "NCI1"));
    const DatasetStats s1 = compute_stats(nci1);
    CHECK(nci1.graphs.size() == 4110);
    CHECK(s1.feature_dim == 37);
    CHECK(s1.num_classes == 2);

    const Dataset enz = load_tudataset(TuDatasetFiles::discover(kDataDir, "ENZYMES"));
    const DatasetStats s2 = compute_stats(enz);
    CHECK(enz.graphs.size() == 600);
    CHECK(s2.num_classes == 6);
    CHECK(s2.feature_dim == 3);
}

TEST_CASE("stats on a single triangle") {
    Dataset ds;
    ds.name = "TRI";
    ds.num_classes = 1;
    ds.feature_dim = 1;
    ds.graphs.push_back(Graph(3, Matrix(3, 1, 1.0), {{0, 1}, {1, 2}, {2, 0}}, 0));
    const DatasetStats s = compute_stats(ds);
    CHECK(s.avg_nodes == 3.0);
    CHECK(s.avg_edges == 6.0);  // 3 undirected edges = 6 arcs
}

TEST_CASE("fixture round trip with node labels") {
    Dataset ds;
    ds.name = "RT1";
    ds.num_classes = 2;
    ds.feature_dim = 2;
    Matrix f1(3, 2);
    f1.at(0, 0) = 1.0;
    f1.at(1, 1) = 1.0;
    f1.at(2, 0) = 1.0;
    ds.graphs.push_back(Graph(3, f1, {{0, 1}, {1, 2}}, 0));
    Matrix f2(2, 2);
    f2.at(0, 1) = 1.0;
    f2.at(1, 1) = 1.0;
    ds.graphs.push_back(Graph(2, f2, {{0, 1}}, 1));

    const auto dir = temp_dir("rt1");
    const auto files = write_fixture(ds, dir);
    CHECK(files.node_labels.has_value());
    CHECK_FALSE(files.node_attributes.has_value());
    const Dataset back = load_tudataset(files);
    CHECK(dataset_close(ds, back, 0.0));
}

TEST_CASE("fixture round trip with attributes and soft weights") {
    SplitMix64 rng(5);
    Dataset ds;
    ds.name = "RT2";
    ds.num_classes = 2;
    ds.feature_dim = 3;
    for (int i = 0; i < 4; i++)
        ds.graphs.push_back(testing::random_graph(rng, 2 + int(rng.below(5)), 3, 0.7, true));
    ds.num_classes = 2;

    const auto dir = temp_dir("rt2");
    const auto files = write_fixture(ds, dir);
    CHECK(files.node_attributes.has_value());
    CHECK_FALSE(files.node_labels.has_value());
    CHECK(files.edge_weights.has_value());
    const Dataset back = load_tudataset(files);
    CHECK(dataset_close(ds, back, 1e-12));
}

TEST_CASE("fixture round trip of the molecular WL pair") {
    const Dataset ds = fixtures::wl_pair_dataset();
    const auto dir = temp_dir("wlpair");
    const auto files = write_fixture(ds, dir);
    const Dataset back = load_tudataset(files);
    REQUIRE(back.graphs.size() == 2);
    CHECK(back.graphs[0].num_nodes() == 10);
    CHECK(back.graphs[1].num_nodes() == 10);
    CHECK(back.graphs[0].num_undirected_edges() == 11);
    CHECK(back.graphs[1].num_undirected_edges() == 11);
    CHECK(dataset_close(ds, back, 0.0));
}

TEST_CASE("parser reports malformed lines with location") {
    const auto dir = temp_dir("bad");
    std::filesystem::create_directories(dir / "BAD");
    auto write = [&](const std::string& file, const std::string& content) {
        std::ofstream out(dir / "BAD" / file);
        out << content;
    };
    write("BAD_graph_indicator.txt", "1\n1\n");
    write("BAD_graph_labels.txt", "0\n");
    write("BAD_node_labels.txt", "0\n0\n");
    write("BAD_A.txt", "1, x\n");
    CHECK_THROWS_WITH_AS(load_tudataset(TuDatasetFiles::discover(dir, "BAD")),
                         doctest::Contains("BAD_A.txt:1"), DataError);

    write("BAD_A.txt", "1, 2\n2, 1\n");
    CHECK_NOTHROW(load_tudataset(TuDatasetFiles::discover(dir, "BAD")));

    // Cross-graph edge.
    write("BAD_graph_indicator.txt", "1\n2\n");
    write("BAD_graph_labels.txt", "0\n1\n");
    CHECK_THROWS_WITH_AS(load_tudataset(TuDatasetFiles::discover(dir, "BAD")),
                         doctest::Contains("joins two graphs"), DataError);

    // Node id out of range.
    write("BAD_graph_indicator.txt", "1\n1\n");
    write("BAD_graph_labels.txt", "0\n");
    write("BAD_A.txt", "1, 3\n");
    CHECK_THROWS_WITH_AS(load_tudataset(TuDatasetFiles::discover(dir, "BAD")),
                         doctest::Contains("out of range"), DataError);

    // Missing file.
    std::filesystem::remove(dir / "BAD" / "BAD_graph_labels.txt");
    CHECK_THROWS_AS(load_tudataset(TuDatasetFiles::discover(dir, "BAD")), DataError);
}

TEST_CASE("whitespace variants and trailing blank lines are accepted") {
    const auto dir = temp_dir("ws");
    std::filesystem::create_directories(dir / "WS");
    auto write = [&](const std::string& file, const std::string& content) {
        std::ofstream out(dir / "WS" / file);
        out << content;
    };
    write("WS_graph_indicator.txt", "1\n1\n1\n\n");
    write("WS_graph_labels.txt", " -1 \n");
    write("WS_A.txt", "1,2\n2, 1\n2,  3\n3,2\n");
    write("WS_node_labels.txt", "0\n1\n0\n");
    const Dataset ds = load_tudataset(TuDatasetFiles::discover(dir, "WS"));
    REQUIRE(ds.graphs.size() == 1);
    CHECK(ds.graphs[0].num_nodes() == 3);
    CHECK(ds.graphs[0].num_undirected_edges() == 2);
    CHECK(ds.graphs[0].label() == 0);  // -1 remapped
    CHECK(ds.feature_dim == 2);
}

TEST_CASE("graphs with zero edges are kept") {
    const auto dir = temp_dir("edgeless");
    std::filesystem::create_directories(dir / "EL");
    auto write = [&](const std::string& file, const std::string& content) {
        std::ofstream out(dir / "EL" / file);
        out << content;
    };
    write("EL_graph_indicator.txt", "1\n2\n2\n");
    write("EL_graph_labels.txt", "5\n7\n");
    write("EL_A.txt", "2, 3\n3, 2\n");
    write("EL_node_labels.txt", "0\n0\n0\n");
    const Dataset ds = load_tudataset(TuDatasetFiles::discover(dir, "EL"));
    REQUIRE(ds.graphs.size() == 2);
    CHECK(ds.graphs[0].num_undirected_edges() == 0);
    CHECK(ds.graphs[1].num_undirected_edges() == 1);
    CHECK(ds.graphs[0].label() == 0);
    CHECK(ds.graphs[1].label() == 1);
}

TEST_CASE("label remap follows ascending original order") {
    const auto dir = temp_dir("remap");
    std::filesystem::create_directories(dir / "RM");
    auto write = [&](const std::string& file, const std::string& content) {
        std::ofstream out(dir / "RM" / file);
        out << content;
    };
    write("RM_graph_indicator.txt", "1\n2\n3\n");
    write("RM_graph_labels.txt", "1\n-1\n1\n");
    write("RM_A.txt", "");
    write("RM_node_labels.txt", "4\n2\n4\n");
    const Dataset ds = load_tudataset(TuDatasetFiles::discover(dir, "RM"));
    CHECK(ds.graphs[0].label() == 1);
    CHECK(ds.graphs[1].label() == 0);
    CHECK(ds.graphs[2].label() == 1);
    // node label 2 -> column 0, label 4 -> column 1
    CHECK(ds.graphs[0].features().at(0, 1) == 1.0);
    CHECK(ds.graphs[1].features().at(0, 0) == 1.0);
}
