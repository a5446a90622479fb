#include "softgraph/gnn.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace softgraph {

Arch arch_from_string(const std::string& s) {
    if (s == "resgcn" || s == "gcn") return Arch::ResGCN;
    if (s == "gin") return Arch::GIN;
    throw std::invalid_argument("unknown architecture: " + s);
}

std::string to_string(Arch a) { return a == Arch::ResGCN ? "resgcn" : "gin"; }

Readout default_readout(Arch a) { return a == Arch::GIN ? Readout::Sum : Readout::Mean; }

Readout readout_from_string(const std::string& s) {
    if (s == "sum") return Readout::Sum;
    if (s == "mean") return Readout::Mean;
    if (s == "max") return Readout::Max;
    throw std::invalid_argument("unknown readout: " + s);
}

std::string to_string(Readout r) {
    switch (r) {
        case Readout::Sum: return "sum";
        case Readout::Mean: return "mean";
        case Readout::Max: return "max";
    }
    return "?";
}

void ModelConfig::validate() const {
    if (num_layers < 1) throw std::invalid_argument("num_layers must be >= 1");
    if (hidden_dim < 1) throw std::invalid_argument("hidden_dim must be >= 1");
    if (input_dim < 1 || num_classes < 1)
        throw std::invalid_argument("input_dim and num_classes must be set");
    if (dropout_after_dense < 0.0 || dropout_after_dense >= 1.0)
        throw std::invalid_argument("dropout must be in [0, 1)");
}

namespace {

Matrix glorot(int rows, int cols, SplitMix64& rng) {
    Matrix m(rows, cols);
    const double bound = std::sqrt(6.0 / double(rows + cols));
    for (auto& x : m.data) x = (2.0 * rng.uniform() - 1.0) * bound;
    return m;
}

}  // namespace

ModelParams ModelParams::init(const ModelConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    SplitMix64 rng(mix_u64(seed, 0x6d6f64656c));
    ModelParams p;
    auto push = [&](const std::string& name, Matrix m, bool trainable = true) {
        p.entries.push_back({name, std::move(m), trainable});
    };
    for (int k = 0; k < cfg.num_layers; k++) {
        const int d_in = k == 0 ? cfg.input_dim : cfg.hidden_dim;
        const std::string prefix = "layer" + std::to_string(k);
        if (cfg.arch == Arch::ResGCN) {
            push(prefix + ".weight", glorot(d_in, cfg.hidden_dim, rng));
        } else {
            push(prefix + ".mlp1.weight", glorot(d_in, cfg.hidden_dim, rng));
            push(prefix + ".mlp1.bias", Matrix(1, cfg.hidden_dim));
            push(prefix + ".mlp2.weight", glorot(cfg.hidden_dim, cfg.hidden_dim, rng));
            push(prefix + ".mlp2.bias", Matrix(1, cfg.hidden_dim));
            push(prefix + ".eps", Matrix(1, 1), cfg.gin_epsilon_learnable);
        }
    }
    push("head.weight", glorot(cfg.hidden_dim, cfg.num_classes, rng));
    push("head.bias", Matrix(1, cfg.num_classes));
    return p;
}

std::size_t ModelParams::total_values() const {
    std::size_t n = 0;
    for (const auto& e : entries) n += e.value.data.size();
    return n;
}

BatchView BatchView::from_graphs(const std::vector<const Graph*>& graphs) {
    if (graphs.empty()) throw std::invalid_argument("empty batch");
    BatchView b;
    b.num_graphs = int(graphs.size());
    for (const auto* g : graphs) b.total_nodes += g->num_nodes();
    const int d = graphs[0]->feature_dim();
    b.features = Matrix(b.total_nodes, d);
    int base = 0;
    for (std::size_t gi = 0; gi < graphs.size(); gi++) {
        const Graph& g = *graphs[gi];
        if (g.feature_dim() != d) throw std::invalid_argument("feature dim mismatch in batch");
        for (int v = 0; v < g.num_nodes(); v++) {
            for (int c = 0; c < d; c++) b.features.at(base + v, c) = g.features().at(v, c);
            b.segment.push_back(int(gi));
        }
        for (const auto& a : g.arcs()) {
            b.arc_src.push_back(base + a.src);
            b.arc_tgt.push_back(base + a.dst);
            b.arc_weight.push_back(a.weight);
        }
        b.labels.push_back(g.label());
        base += g.num_nodes();
    }
    return b;
}

BatchView BatchView::from_graph(const Graph& g) { return from_graphs({&g}); }

Tensor gcn_layer_forward(Tape& tape, Tensor h, const BatchView& g, Tensor weight) {
    // dhat_v = 1 + sum of incident arc weights; the self term is e_vv = 1.
    std::vector<double> dhat(std::size_t(g.total_nodes), 1.0);
    for (std::size_t i = 0; i < g.arc_tgt.size(); i++)
        dhat[std::size_t(g.arc_tgt[i])] += g.arc_weight[i];
    std::vector<double> arc_coef(g.arc_weight.size());
    for (std::size_t i = 0; i < arc_coef.size(); i++)
        arc_coef[i] = g.arc_weight[i] /
                      std::sqrt(dhat[std::size_t(g.arc_src[i])] * dhat[std::size_t(g.arc_tgt[i])]);
    std::vector<double> self_coef(dhat.size());
    for (std::size_t v = 0; v < dhat.size(); v++) self_coef[v] = 1.0 / dhat[v];

    Tensor agg = tape.scale_rows(h, std::move(self_coef));
    if (!g.arc_src.empty()) {
        Tensor messages = tape.row_gather(h, g.arc_src);
        Tensor neighbor_sum =
            tape.scatter_weighted_sum(messages, g.arc_tgt, std::move(arc_coef), g.total_nodes);
        agg = tape.add(agg, neighbor_sum);
    }
    return tape.relu(tape.matmul(agg, weight));
}

Tensor gin_layer_forward(Tape& tape, Tensor h, const BatchView& g, Tensor w1, Tensor b1,
                         Tensor w2, Tensor b2, Tensor eps) {
    Tensor self = tape.scale_scalar_param(h, eps, 1.0);
    Tensor z = self;
    if (!g.arc_src.empty()) {
        Tensor messages = tape.row_gather(h, g.arc_src);
        Tensor neighbor_sum =
            tape.scatter_weighted_sum(messages, g.arc_tgt, g.arc_weight, g.total_nodes);
        z = tape.add(self, neighbor_sum);
    }
    Tensor hidden = tape.relu(tape.add_row_broadcast(tape.matmul(z, w1), b1));
    return tape.add_row_broadcast(tape.matmul(hidden, w2), b2);
}

ForwardResult forward_batch(Tape& tape, const BatchView& batch, const ModelParams& params,
                            const ModelConfig& cfg, bool train_mode, SplitMix64* dropout_rng) {
    cfg.validate();
    ForwardResult result;
    result.params.reserve(params.entries.size());
    for (const auto& e : params.entries)
        result.params.push_back(tape.leaf(e.value, e.trainable));

    std::size_t next = 0;
    auto take = [&] { return result.params[next++]; };

    Tensor h = tape.leaf(batch.features, false);
    for (int k = 0; k < cfg.num_layers; k++) {
        if (cfg.arch == Arch::ResGCN) {
            Tensor out = gcn_layer_forward(tape, h, batch, take());
            // Identity skip once dimensions match; the first projection layer
            // has none.
            h = (k > 0) ? tape.add(out, h) : out;
        } else {
            Tensor w1 = take(), b1 = take(), w2 = take(), b2 = take(), eps = take();
            h = gin_layer_forward(tape, h, batch, w1, b1, w2, b2, eps);
        }
    }
    result.embeddings = tape.segment_readout(h, batch.segment, batch.num_graphs, cfg.readout);

    Tensor pooled = result.embeddings;
    if (cfg.dropout_after_dense > 0.0 && train_mode) {
        if (dropout_rng == nullptr) throw std::logic_error("dropout requires an RNG in train mode");
        pooled = tape.dropout(pooled, cfg.dropout_after_dense, *dropout_rng, true);
    }
    Tensor head_w = take(), head_b = take();
    result.logits = tape.add_row_broadcast(tape.matmul(pooled, head_w), head_b);
    return result;
}

ForwardResult forward_graph(Tape& tape, const Graph& g, const ModelParams& params,
                            const ModelConfig& cfg, bool train_mode, SplitMix64* dropout_rng) {
    return forward_batch(tape, BatchView::from_graph(g), params, cfg, train_mode, dropout_rng);
}

namespace {
constexpr int kCheckpointVersion = 1;
}

void save_checkpoint(const ModelConfig& cfg, const ModelParams& params,
                     const std::filesystem::path& path) {
    nlohmann::json j;
    j["version"] = kCheckpointVersion;
    j["config"] = {{"arch", to_string(cfg.arch)},
                   {"num_layers", cfg.num_layers},
                   {"hidden_dim", cfg.hidden_dim},
                   {"readout", to_string(cfg.readout)},
                   {"dropout_after_dense", cfg.dropout_after_dense},
                   {"gin_epsilon_learnable", cfg.gin_epsilon_learnable},
                   {"input_dim", cfg.input_dim},
                   {"num_classes", cfg.num_classes}};
    auto& entries = j["params"] = nlohmann::json::array();
    for (const auto& e : params.entries)
        entries.push_back({{"name", e.name},
                           {"rows", e.value.rows},
                           {"cols", e.value.cols},
                           {"trainable", e.trainable},
                           {"values", e.value.data}});
    std::ofstream out(path);
    if (!out) throw DataError("cannot write checkpoint " + path.string());
    out << j.dump(2) << "\n";
}

std::pair<ModelConfig, ModelParams> load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open checkpoint " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("malformed checkpoint: " + std::string(e.what()));
    }
    if (j.value("version", 0) != kCheckpointVersion)
        throw DataError("unsupported checkpoint version");
    ModelConfig cfg;
    const auto& c = j.at("config");
    cfg.arch = arch_from_string(c.at("arch").get<std::string>());
    cfg.num_layers = c.at("num_layers").get<int>();
    cfg.hidden_dim = c.at("hidden_dim").get<int>();
    cfg.readout = readout_from_string(c.at("readout").get<std::string>());
    cfg.dropout_after_dense = c.at("dropout_after_dense").get<double>();
    cfg.gin_epsilon_learnable = c.at("gin_epsilon_learnable").get<bool>();
    cfg.input_dim = c.at("input_dim").get<int>();
    cfg.num_classes = c.at("num_classes").get<int>();
    cfg.validate();
    ModelParams params;
    for (const auto& e : j.at("params")) {
        Matrix m(e.at("rows").get<int>(), e.at("cols").get<int>());
        const auto values = e.at("values").get<std::vector<double>>();
        if (values.size() != m.data.size()) throw DataError("checkpoint value count mismatch");
        m.data = values;
        params.entries.push_back({e.at("name").get<std::string>(), std::move(m),
                                  e.at("trainable").get<bool>()});
    }
    return {cfg, std::move(params)};
}

}  // namespace softgraph
