#include "softgraph/tudataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

namespace softgraph {
namespace {

std::string loc(const std::filesystem::path& file, std::size_t line) {
    return file.filename().string() + ":" + std::to_string(line);
}

std::vector<std::string> read_lines(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw DataError("cannot open " + file.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    // Trailing blank lines are tolerated.
    while (!lines.empty() && lines.back().find_first_not_of(" \t") == std::string::npos)
        lines.pop_back();
    return lines;
}

long parse_int(std::string_view token, const std::filesystem::path& file, std::size_t line) {
    const char* b = token.data();
    const char* e = b + token.size();
    while (b < e && (*b == ' ' || *b == '\t')) b++;
    while (e > b && (e[-1] == ' ' || e[-1] == '\t')) e--;
    long value = 0;
    auto [ptr, ec] = std::from_chars(b, e, value);
    if (ec != std::errc() || ptr != e)
        throw DataError("malformed integer at " + loc(file, line));
    return value;
}

double parse_real(std::string_view token, const std::filesystem::path& file, std::size_t line) {
    const char* b = token.data();
    const char* e = b + token.size();
    while (b < e && (*b == ' ' || *b == '\t')) b++;
    while (e > b && (e[-1] == ' ' || e[-1] == '\t')) e--;
    double value = 0;
    auto [ptr, ec] = std::from_chars(b, e, value);
    if (ec != std::errc() || ptr != e)
        throw DataError("malformed real at " + loc(file, line));
    return value;
}

std::vector<std::string_view> split_commas(const std::string& line) {
    std::vector<std::string_view> out;
    std::string_view rest = line;
    for (;;) {
        auto pos = rest.find(',');
        if (pos == std::string_view::npos) {
            out.push_back(rest);
            return out;
        }
        out.push_back(rest.substr(0, pos));
        rest.remove_prefix(pos + 1);
    }
}

}  // namespace

TuDatasetFiles TuDatasetFiles::discover(const std::filesystem::path& dir, const std::string& name,
                                        bool use_node_attributes) {
    const auto base = dir / name / name;
    TuDatasetFiles f;
    f.name = name;
    f.adjacency = base.string() + "_A.txt";
    f.graph_indicator = base.string() + "_graph_indicator.txt";
    f.graph_labels = base.string() + "_graph_labels.txt";
    auto maybe = [&](const std::string& suffix) -> std::optional<std::filesystem::path> {
        std::filesystem::path p = base.string() + suffix;
        if (std::filesystem::exists(p)) return p;
        return std::nullopt;
    };
    f.node_labels = maybe("_node_labels.txt");
    f.node_attributes = maybe("_node_attributes.txt");
    if (f.node_labels && f.node_attributes && !use_node_attributes) f.node_attributes.reset();
    f.edge_weights = maybe("_edge_weights.txt");
    if (std::filesystem::exists(base.string() + "_edge_labels.txt"))
        std::cerr << "warning: " << name << "_edge_labels.txt is ignored\n";
    return f;
}

Dataset load_tudataset(const TuDatasetFiles& files) {
    // graph_indicator: line n = 1-based graph id of 1-based node n.
    const auto indicator_lines = read_lines(files.graph_indicator);
    const std::size_t total_nodes = indicator_lines.size();
    if (total_nodes == 0) throw DataError("empty graph_indicator file");
    std::vector<std::size_t> node_graph(total_nodes);
    std::size_t num_graphs = 0;
    for (std::size_t i = 0; i < total_nodes; i++) {
        long gid = parse_int(indicator_lines[i], files.graph_indicator, i + 1);
        if (gid < 1) throw DataError("graph id must be positive at " + loc(files.graph_indicator, i + 1));
        node_graph[i] = std::size_t(gid) - 1;
        num_graphs = std::max(num_graphs, std::size_t(gid));
    }
    // Node ids must form contiguous blocks per graph for the local reindexing
    // below; TU files satisfy this.
    std::vector<std::size_t> graph_num_nodes(num_graphs, 0);
    std::vector<std::size_t> node_local(total_nodes);
    for (std::size_t i = 0; i < total_nodes; i++) node_local[i] = graph_num_nodes[node_graph[i]]++;
    for (std::size_t g = 0; g < num_graphs; g++)
        if (graph_num_nodes[g] == 0) throw DataError("graph id gap: graph " + std::to_string(g + 1) + " has no nodes");

    // graph labels, remapped ascending to {0..C-1}.
    const auto label_lines = read_lines(files.graph_labels);
    if (label_lines.size() != num_graphs)
        throw DataError("graph_labels has " + std::to_string(label_lines.size()) + " lines, expected " +
                        std::to_string(num_graphs));
    std::vector<long> raw_labels(num_graphs);
    std::set<long> label_values;
    for (std::size_t g = 0; g < num_graphs; g++) {
        raw_labels[g] = parse_int(label_lines[g], files.graph_labels, g + 1);
        label_values.insert(raw_labels[g]);
    }
    std::map<long, int> label_remap;
    for (long v : label_values) label_remap.emplace(v, int(label_remap.size()));

    // Node features: one-hot labels, attributes, or their concatenation.
    std::vector<long> node_label_values;
    std::map<long, int> node_label_remap;
    if (files.node_labels) {
        const auto lines = read_lines(*files.node_labels);
        if (lines.size() != total_nodes)
            throw DataError("node_labels has " + std::to_string(lines.size()) + " lines, expected " +
                            std::to_string(total_nodes));
        node_label_values.resize(total_nodes);
        std::set<long> values;
        for (std::size_t i = 0; i < total_nodes; i++) {
            node_label_values[i] = parse_int(lines[i], *files.node_labels, i + 1);
            values.insert(node_label_values[i]);
        }
        for (long v : values) node_label_remap.emplace(v, int(node_label_remap.size()));
    }
    std::vector<std::vector<double>> node_attr;
    int attr_dim = 0;
    if (files.node_attributes) {
        const auto lines = read_lines(*files.node_attributes);
        if (lines.size() != total_nodes)
            throw DataError("node_attributes has " + std::to_string(lines.size()) + " lines, expected " +
                            std::to_string(total_nodes));
        node_attr.resize(total_nodes);
        for (std::size_t i = 0; i < total_nodes; i++) {
            const auto tokens = split_commas(lines[i]);
            if (i == 0) attr_dim = int(tokens.size());
            if (int(tokens.size()) != attr_dim)
                throw DataError("inconsistent attribute count at " + loc(*files.node_attributes, i + 1));
            node_attr[i].reserve(tokens.size());
            for (auto t : tokens) node_attr[i].push_back(parse_real(t, *files.node_attributes, i + 1));
        }
    }
    const int label_dim = int(node_label_remap.size());
    const int feature_dim = label_dim + attr_dim;
    if (feature_dim == 0) throw DataError("dataset has neither node labels nor node attributes");

    // Adjacency rows: "i, j" with 1-based global node ids, symmetrized and
    // de-duplicated into per-graph undirected edge sets.
    const auto adj_lines = read_lines(files.adjacency);
    std::vector<double> arc_weights;
    if (files.edge_weights) {
        const auto lines = read_lines(*files.edge_weights);
        if (lines.size() != adj_lines.size())
            throw DataError("edge_weights has " + std::to_string(lines.size()) + " lines, expected " +
                            std::to_string(adj_lines.size()));
        arc_weights.resize(lines.size());
        for (std::size_t i = 0; i < lines.size(); i++)
            arc_weights[i] = parse_real(lines[i], *files.edge_weights, i + 1);
    }
    // Per-graph map (local u, local v) -> weight, u < v.
    std::vector<std::map<std::pair<int, int>, double>> graph_edges(num_graphs);
    for (std::size_t i = 0; i < adj_lines.size(); i++) {
        const auto tokens = split_commas(adj_lines[i]);
        if (tokens.size() != 2) throw DataError("expected \"i, j\" at " + loc(files.adjacency, i + 1));
        long a = parse_int(tokens[0], files.adjacency, i + 1);
        long b = parse_int(tokens[1], files.adjacency, i + 1);
        if (a < 1 || b < 1 || std::size_t(a) > total_nodes || std::size_t(b) > total_nodes)
            throw DataError("node id out of range at " + loc(files.adjacency, i + 1));
        const std::size_t na = std::size_t(a) - 1, nb = std::size_t(b) - 1;
        if (node_graph[na] != node_graph[nb])
            throw DataError("edge joins two graphs at " + loc(files.adjacency, i + 1));
        if (na == nb) throw DataError("self-loop at " + loc(files.adjacency, i + 1));
        const double w = arc_weights.empty() ? 1.0 : arc_weights[i];
        int u = int(node_local[na]), v = int(node_local[nb]);
        if (u > v) std::swap(u, v);
        auto [it, inserted] = graph_edges[node_graph[na]].try_emplace({u, v}, w);
        if (!inserted && std::abs(it->second - w) > 1e-9)
            throw DataError("conflicting weights for one edge at " + loc(files.adjacency, i + 1));
    }

    Dataset ds;
    ds.name = files.name;
    ds.num_classes = int(label_remap.size());
    ds.feature_dim = feature_dim;
    ds.graphs.reserve(num_graphs);
    std::size_t node_base = 0;
    for (std::size_t g = 0; g < num_graphs; g++) {
        const int n = int(graph_num_nodes[g]);
        Matrix feats(n, feature_dim);
        for (int v = 0; v < n; v++) {
            const std::size_t global = node_base + std::size_t(v);
            if (label_dim > 0) feats.at(v, node_label_remap.at(node_label_values[global])) = 1.0;
            for (int c = 0; c < attr_dim; c++) feats.at(v, label_dim + c) = node_attr[global][c];
        }
        std::vector<UndirectedEdge> edges;
        edges.reserve(graph_edges[g].size());
        for (const auto& [uv, w] : graph_edges[g]) edges.push_back({uv.first, uv.second, w});
        ds.graphs.emplace_back(n, std::move(feats), edges, label_remap.at(raw_labels[g]));
        node_base += std::size_t(n);
    }
    ds.validate();
    return ds;
}

DatasetStats compute_stats(const Dataset& ds) {
    if (ds.graphs.empty()) throw DataError("empty dataset");
    DatasetStats s;
    s.num_graphs = ds.graphs.size();
    double nodes = 0, arcs = 0;
    for (const auto& g : ds.graphs) {
        nodes += g.num_nodes();
        arcs += double(g.arcs().size());
    }
    s.avg_nodes = nodes / double(s.num_graphs);
    s.avg_edges = arcs / double(s.num_graphs);
    s.feature_dim = ds.feature_dim;
    s.num_classes = ds.num_classes;
    return s;
}

std::string DatasetStats::csv_row(const std::string& name) const {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s,%zu,%.1f,%.1f,%d,%d", name.c_str(), num_graphs, avg_nodes,
                  avg_edges, feature_dim, num_classes);
    return buf;
}

TuDatasetFiles write_fixture(const Dataset& ds, const std::filesystem::path& dir,
                             bool force_weight_sidecar) {
    namespace fs = std::filesystem;
    const fs::path root = dir / ds.name;
    fs::create_directories(root);
    const std::string base = (root / ds.name).string();

    const bool one_hot_features = [&] {
        for (const auto& g : ds.graphs)
            for (int v = 0; v < g.num_nodes(); v++) {
                int ones = 0;
                for (double x : g.features().row(v)) {
                    if (x == 1.0) ones++;
                    else if (x != 0.0) return false;
                }
                if (ones != 1) return false;
            }
        return true;
    }();
    bool any_soft = force_weight_sidecar;
    for (const auto& g : ds.graphs)
        for (const auto& a : g.arcs())
            if (a.weight != 1.0) any_soft = true;

    auto open = [](const std::string& path) {
        std::ofstream out(path);
        if (!out) throw DataError("cannot write " + path);
        return out;
    };

    TuDatasetFiles f;
    f.name = ds.name;
    f.adjacency = base + "_A.txt";
    f.graph_indicator = base + "_graph_indicator.txt";
    f.graph_labels = base + "_graph_labels.txt";

    auto adj = open(f.adjacency.string());
    auto ind = open(f.graph_indicator.string());
    auto lab = open(f.graph_labels.string());
    std::ofstream weights;
    if (any_soft) {
        f.edge_weights = base + "_edge_weights.txt";
        weights = open(f.edge_weights->string());
        weights.precision(17);
    }
    std::ofstream nlab, nattr;
    if (one_hot_features) {
        f.node_labels = base + "_node_labels.txt";
        nlab = open(f.node_labels->string());
    } else {
        f.node_attributes = base + "_node_attributes.txt";
        nattr = open(f.node_attributes->string());
        nattr.precision(17);
    }

    std::size_t node_base = 0;
    for (std::size_t g = 0; g < ds.graphs.size(); g++) {
        const Graph& graph = ds.graphs[g];
        lab << graph.label() << "\n";
        for (int v = 0; v < graph.num_nodes(); v++) {
            ind << g + 1 << "\n";
            if (one_hot_features) {
                const auto row = graph.features().row(v);
                nlab << int(std::find(row.begin(), row.end(), 1.0) - row.begin()) << "\n";
            } else {
                const auto row = graph.features().row(v);
                for (std::size_t c = 0; c < row.size(); c++)
                    nattr << (c ? ", " : "") << row[c];
                nattr << "\n";
            }
        }
        for (const auto& a : graph.arcs()) {
            adj << node_base + std::size_t(a.src) + 1 << ", " << node_base + std::size_t(a.dst) + 1 << "\n";
            if (any_soft) weights << a.weight << "\n";
        }
        node_base += std::size_t(graph.num_nodes());
    }
    return f;
}

}  // namespace softgraph
