#include "softgraph/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <iostream>
#include <map>
#include <numeric>
#include <ostream>

#include <json.hpp>

namespace softgraph {

AdamW::AdamW(const ModelParams& params, AdamWConfig cfg) : cfg_(cfg) {
    m_.reserve(params.entries.size());
    v_.reserve(params.entries.size());
    for (const auto& e : params.entries) {
        m_.emplace_back(e.value.data.size(), 0.0);
        v_.emplace_back(e.value.data.size(), 0.0);
    }
}

void AdamW::step(ModelParams& params, const std::vector<Tensor>& leaves, double lr) {
    if (leaves.size() != params.entries.size())
        throw std::invalid_argument("leaf/param count mismatch");
    t_++;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, double(t_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, double(t_));
    for (std::size_t p = 0; p < params.entries.size(); p++) {
        auto& entry = params.entries[p];
        if (!entry.trainable) continue;
        const auto& grad = leaves[p].grad();
        auto& theta = entry.value.data;
        auto& m = m_[p];
        auto& v = v_[p];
        for (std::size_t i = 0; i < theta.size(); i++) {
            const double g = grad[i];
            m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * g;
            v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * g * g;
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            // Decoupled decay: applied to the pre-step value, separate from
            // the moment update.
            theta[i] -= lr * (mhat / (std::sqrt(vhat) + cfg_.eps) + cfg_.weight_decay * theta[i]);
        }
    }
}

double lr_schedule(int epoch, double lr0, int period) {
    if (epoch < 0 || period < 1) throw std::invalid_argument("bad schedule arguments");
    return lr0 * std::pow(0.5, double(epoch / period));
}

void RunConfig::validate() const {
    if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
    if (folds < 2) throw std::invalid_argument("folds must be >= 2");
    if (repeats < 1) throw std::invalid_argument("repeats must be >= 1");
    if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
    if (lr0 <= 0.0) throw std::invalid_argument("lr0 must be positive");
    if (jobs < 1) throw std::invalid_argument("jobs must be >= 1");
    augment.validate();
}

std::vector<int> stratified_folds(const Dataset& ds, int folds, std::uint64_t seed) {
    const std::size_t n = ds.graphs.size();
    if (n < std::size_t(folds)) throw std::invalid_argument("dataset smaller than fold count");
    std::map<int, std::vector<std::size_t>> by_label;
    for (std::size_t i = 0; i < n; i++) by_label[ds.graphs[i].label()].push_back(i);
    bool stratify = true;
    for (const auto& [label, members] : by_label)
        if (members.size() < std::size_t(folds)) stratify = false;
    if (!stratify)
        std::cerr << "warning: class with fewer members than folds; using unstratified split\n";

    std::vector<int> assignment(n, 0);
    SplitMix64 rng(mix_u64(seed, 0x73706c6974));
    if (stratify) {
        // Deal each class's shuffled members round-robin, rotating the
        // starting fold so remainders spread evenly.
        int start = 0;
        for (auto& [label, members] : by_label) {
            for (std::size_t i = members.size(); i > 1; i--)
                std::swap(members[i - 1], members[std::size_t(rng.below(i))]);
            for (std::size_t i = 0; i < members.size(); i++)
                assignment[members[i]] = int((std::size_t(start) + i) % std::size_t(folds));
            start = int((std::size_t(start) + members.size()) % std::size_t(folds));
        }
    } else {
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        for (std::size_t i = n; i > 1; i--)
            std::swap(order[i - 1], order[std::size_t(rng.below(i))]);
        for (std::size_t i = 0; i < n; i++) assignment[order[i]] = int(i % std::size_t(folds));
    }
    return assignment;
}

namespace {

double evaluate_accuracy(const Dataset& ds, const std::vector<std::size_t>& indices,
                         const ModelParams& params, const ModelConfig& cfg, int batch_size) {
    if (indices.empty()) return 0.0;
    std::size_t correct = 0;
    for (std::size_t at = 0; at < indices.size(); at += std::size_t(batch_size)) {
        const std::size_t end = std::min(indices.size(), at + std::size_t(batch_size));
        std::vector<const Graph*> graphs;
        graphs.reserve(end - at);
        for (std::size_t i = at; i < end; i++) graphs.push_back(&ds.graphs[indices[i]]);
        const BatchView batch = BatchView::from_graphs(graphs);
        Tape tape;
        const auto fwd = forward_batch(tape, batch, params, cfg, false);
        const auto& logits = fwd.logits.value();
        for (int b = 0; b < batch.num_graphs; b++) {
            int best = 0;
            for (int c = 1; c < cfg.num_classes; c++)
                if (logits[std::size_t(b) * cfg.num_classes + c] >
                    logits[std::size_t(b) * cfg.num_classes + best])
                    best = c;
            if (best == batch.labels[std::size_t(b)]) correct++;
        }
    }
    return double(correct) / double(indices.size());
}

struct FoldJob {
    const Dataset* ds;
    const RunConfig* cfg;
    int repeat;
    int fold;
    std::vector<std::size_t> train_idx;
    std::vector<std::size_t> test_idx;
};

FoldCurve train_fold(const FoldJob& job) {
    const Dataset& ds = *job.ds;
    const RunConfig& cfg = *job.cfg;
    ModelConfig model = cfg.model;
    model.input_dim = ds.feature_dim;
    model.num_classes = ds.num_classes;

    const std::uint64_t fold_key =
        mix_u64(mix_u64(cfg.seed, std::uint64_t(job.repeat)), std::uint64_t(job.fold));
    ModelParams params = ModelParams::init(model, mix_u64(fold_key, 0x696e6974));
    AdamW optimizer(params, cfg.adamw);
    SplitMix64 shuffle_rng(mix_u64(fold_key, 0x73687566));
    SplitMix64 dropout_rng(mix_u64(fold_key, 0x64726f70));

    // Repeats re-seed augmentation as well.
    AugmentSpec aug = cfg.augment;
    aug.seed = mix_u64(aug.seed, std::uint64_t(job.repeat));

    FoldCurve curve;
    curve.train_loss.reserve(std::size_t(cfg.epochs));
    curve.test_acc.reserve(std::size_t(cfg.epochs));
    std::vector<std::size_t> order = job.train_idx;

    for (int epoch = 0; epoch < cfg.epochs; epoch++) {
        const double lr = lr_schedule(epoch, cfg.lr0, cfg.lr_half_period);
        const Dataset augmented = augment_epoch(ds, aug, std::uint64_t(epoch) + 1);
        for (std::size_t i = order.size(); i > 1; i--)
            std::swap(order[i - 1], order[std::size_t(shuffle_rng.below(i))]);

        double loss_sum = 0.0;
        for (std::size_t at = 0; at < order.size(); at += std::size_t(cfg.batch_size)) {
            const std::size_t end = std::min(order.size(), at + std::size_t(cfg.batch_size));
            std::vector<const Graph*> graphs;
            graphs.reserve(end - at);
            for (std::size_t i = at; i < end; i++) graphs.push_back(&augmented.graphs[order[i]]);
            const BatchView batch = BatchView::from_graphs(graphs);
            Tape tape;
            auto fwd = forward_batch(tape, batch, params, model, true, &dropout_rng);
            Tensor loss = tape.softmax_cross_entropy(fwd.logits, batch.labels);
            tape.backward(loss);
            optimizer.step(params, fwd.params, lr);
            loss_sum += loss.scalar() * double(end - at);
        }
        curve.train_loss.push_back(loss_sum / double(order.size()));
        curve.test_acc.push_back(
            evaluate_accuracy(ds, job.test_idx, params, model, cfg.batch_size));
    }
    curve.final_acc = curve.test_acc.back();
    curve.best_acc = *std::max_element(curve.test_acc.begin(), curve.test_acc.end());
    return curve;
}

void mean_std(const std::vector<double>& xs, double& mean, double& std_dev) {
    mean = std::accumulate(xs.begin(), xs.end(), 0.0) / double(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    std_dev = xs.size() > 1 ? std::sqrt(var / double(xs.size())) : 0.0;
}

}  // namespace

RunResult cross_validate(const Dataset& ds, const RunConfig& cfg) {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    RunResult result;
    result.dataset = ds.name;
    result.config = cfg;
    result.curves.resize(std::size_t(cfg.repeats));

    for (int repeat = 0; repeat < cfg.repeats; repeat++) {
        const auto fold_of =
            stratified_folds(ds, cfg.folds, mix_u64(cfg.seed, std::uint64_t(repeat)));
        std::vector<FoldJob> jobs(std::size_t(cfg.folds));
        for (int f = 0; f < cfg.folds; f++) {
            jobs[std::size_t(f)] = {&ds, &cfg, repeat, f, {}, {}};
            for (std::size_t i = 0; i < ds.graphs.size(); i++) {
                if (fold_of[i] == f) jobs[std::size_t(f)].test_idx.push_back(i);
                else jobs[std::size_t(f)].train_idx.push_back(i);
            }
        }
        auto& curves = result.curves[std::size_t(repeat)];
        curves.resize(std::size_t(cfg.folds));
        for (int base = 0; base < cfg.folds; base += cfg.jobs) {
            std::vector<std::future<FoldCurve>> running;
            const int top = std::min(cfg.folds, base + cfg.jobs);
            for (int f = base; f < top; f++)
                running.push_back(std::async(std::launch::async, train_fold,
                                             std::cref(jobs[std::size_t(f)])));
            for (int f = base; f < top; f++)
                curves[std::size_t(f)] = running[std::size_t(f - base)].get();
        }
        std::vector<double> finals, bests;
        for (const auto& c : curves) {
            finals.push_back(c.final_acc);
            bests.push_back(c.best_acc);
        }
        double mean = 0, unused = 0;
        mean_std(finals, mean, unused);
        result.repeat_final_acc.push_back(mean);
        mean_std(bests, mean, unused);
        result.repeat_best_acc.push_back(mean);
    }
    mean_std(result.repeat_final_acc, result.mean_final_acc, result.std_final_acc);
    mean_std(result.repeat_best_acc, result.mean_best_acc, result.std_best_acc);
    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

ModelParams train_full(const Dataset& ds, const RunConfig& cfg) {
    cfg.validate();
    FoldJob job{&ds, &cfg, 0, 0, {}, {}};
    job.train_idx.resize(ds.graphs.size());
    std::iota(job.train_idx.begin(), job.train_idx.end(), std::size_t{0});

    ModelConfig model = cfg.model;
    model.input_dim = ds.feature_dim;
    model.num_classes = ds.num_classes;
    const std::uint64_t fold_key = mix_u64(mix_u64(cfg.seed, 0), 0);
    ModelParams params = ModelParams::init(model, mix_u64(fold_key, 0x696e6974));
    AdamW optimizer(params, cfg.adamw);
    SplitMix64 shuffle_rng(mix_u64(fold_key, 0x73687566));
    SplitMix64 dropout_rng(mix_u64(fold_key, 0x64726f70));
    AugmentSpec aug = cfg.augment;
    aug.seed = mix_u64(aug.seed, 0);

    auto order = job.train_idx;
    for (int epoch = 0; epoch < cfg.epochs; epoch++) {
        const double lr = lr_schedule(epoch, cfg.lr0, cfg.lr_half_period);
        const Dataset augmented = augment_epoch(ds, aug, std::uint64_t(epoch) + 1);
        for (std::size_t i = order.size(); i > 1; i--)
            std::swap(order[i - 1], order[std::size_t(shuffle_rng.below(i))]);
        for (std::size_t at = 0; at < order.size(); at += std::size_t(cfg.batch_size)) {
            const std::size_t end = std::min(order.size(), at + std::size_t(cfg.batch_size));
            std::vector<const Graph*> graphs;
            for (std::size_t i = at; i < end; i++) graphs.push_back(&augmented.graphs[order[i]]);
            const BatchView batch = BatchView::from_graphs(graphs);
            Tape tape;
            auto fwd = forward_batch(tape, batch, params, model, true, &dropout_rng);
            Tensor loss = tape.softmax_cross_entropy(fwd.logits, batch.labels);
            tape.backward(loss);
            optimizer.step(params, fwd.params, lr);
        }
    }
    return params;
}

namespace {

nlohmann::json config_to_json(const RunConfig& cfg) {
    return {{"model",
             {{"arch", to_string(cfg.model.arch)},
              {"num_layers", cfg.model.num_layers},
              {"hidden_dim", cfg.model.hidden_dim},
              {"readout", to_string(cfg.model.readout)},
              {"dropout_after_dense", cfg.model.dropout_after_dense},
              {"gin_epsilon_learnable", cfg.model.gin_epsilon_learnable}}},
            {"augment",
             {{"method", to_string(cfg.augment.method)},
              {"ratio", cfg.augment.ratio},
              {"seed", cfg.augment.seed}}},
            {"lr0", cfg.lr0},
            {"batch_size", cfg.batch_size},
            {"epochs", cfg.epochs},
            {"lr_half_period", cfg.lr_half_period},
            {"folds", cfg.folds},
            {"repeats", cfg.repeats},
            {"seed", cfg.seed},
            {"adamw",
             {{"beta1", cfg.adamw.beta1},
              {"beta2", cfg.adamw.beta2},
              {"eps", cfg.adamw.eps},
              {"weight_decay", cfg.adamw.weight_decay}}}};
}

}  // namespace

std::string run_result_to_json(const RunResult& result) {
    nlohmann::json j;
    j["dataset"] = result.dataset;
    j["config"] = config_to_json(result.config);
    j["mean_final_acc"] = result.mean_final_acc;
    j["std_final_acc"] = result.std_final_acc;
    j["mean_best_acc"] = result.mean_best_acc;
    j["std_best_acc"] = result.std_best_acc;
    j["repeat_final_acc"] = result.repeat_final_acc;
    j["repeat_best_acc"] = result.repeat_best_acc;
    auto& repeats = j["curves"] = nlohmann::json::array();
    for (const auto& folds : result.curves) {
        nlohmann::json jr = nlohmann::json::array();
        for (const auto& c : folds)
            jr.push_back({{"train_loss", c.train_loss},
                          {"test_acc", c.test_acc},
                          {"final_acc", c.final_acc},
                          {"best_acc", c.best_acc}});
        repeats.push_back(std::move(jr));
    }
    return j.dump(2) + "\n";
}

std::string run_result_csv_row(const RunResult& result) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s,%s,%d,%s,%g,%.4f,%.4f", result.dataset.c_str(),
                  to_string(result.config.model.arch).c_str(), result.config.model.num_layers,
                  to_string(result.config.augment.method).c_str(), result.config.augment.ratio,
                  result.mean_final_acc, result.std_final_acc);
    return buf;
}

void export_embeddings(const Dataset& ds, const ModelParams& params, const ModelConfig& cfg,
                       std::ostream& out) {
    ModelConfig model = cfg;
    model.input_dim = ds.feature_dim;
    model.num_classes = ds.num_classes;
    out << "graph_index,label";
    for (int c = 0; c < model.hidden_dim; c++) out << ",e" << c;
    out << "\n";
    out.precision(17);
    for (std::size_t i = 0; i < ds.graphs.size(); i++) {
        Tape tape;
        const auto fwd = forward_graph(tape, ds.graphs[i], params, model, false);
        out << i << "," << ds.graphs[i].label();
        for (double x : fwd.embeddings.value()) out << "," << x;
        out << "\n";
    }
}

std::vector<RunConfig> grid_configs(const RunConfig& base, const GridOptions& options) {
    std::vector<RunConfig> out;
    const bool drop_method = base.augment.method == AugmentMethod::DropEdge ||
                             base.augment.method == AugmentMethod::DropNode;
    const std::vector<double> ratios = base.augment.method == AugmentMethod::None
                                           ? std::vector<double>{0.0}
                                       : drop_method ? options.ratios
                                                     : std::vector<double>{0.2};
    for (int layers : options.layer_counts)
        for (double lr : options.lrs)
            for (int batch : options.batch_sizes)
                for (double dropout : options.dropouts)
                    for (double ratio : ratios) {
                        RunConfig cfg = base;
                        cfg.model.num_layers = layers;
                        cfg.lr0 = lr;
                        cfg.batch_size = batch;
                        cfg.model.dropout_after_dense = dropout;
                        cfg.augment.ratio = ratio;
                        out.push_back(cfg);
                    }
    return out;
}

}  // namespace softgraph
