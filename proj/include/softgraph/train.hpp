#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "softgraph/augment.hpp"
#include "softgraph/gnn.hpp"
#include "softgraph/graph.hpp"

namespace softgraph {

struct AdamWConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.01;
};

// AdamW with decoupled weight decay and bias-corrected moments. Moment state
// is aligned with the ModelParams entry order.
class AdamW {
public:
    AdamW(const ModelParams& params, AdamWConfig cfg = {});

    // Applies one update from the gradients accumulated in `leaves` (the
    // tape leaves returned by forward_batch, aligned with params.entries).
    void step(ModelParams& params, const std::vector<Tensor>& leaves, double lr);

    long steps_taken() const { return t_; }

private:
    AdamWConfig cfg_;
    std::vector<std::vector<double>> m_;
    std::vector<std::vector<double>> v_;
    long t_ = 0;
};

// lr0 * 0.5^floor(epoch / period): halves every `period` epochs.
double lr_schedule(int epoch, double lr0, int period = 50);

struct RunConfig {
    ModelConfig model;
    AugmentSpec augment;
    double lr0 = 0.0005;
    int batch_size = 32;
    int epochs = 350;
    int lr_half_period = 50;
    int folds = 10;
    int repeats = 3;
    std::uint64_t seed = 0;
    AdamWConfig adamw;
    int jobs = 1;

    void validate() const;
};

struct FoldCurve {
    std::vector<double> train_loss;  // per epoch
    std::vector<double> test_acc;    // per epoch, on original graphs
    double final_acc = 0.0;
    double best_acc = 0.0;
};

struct RunResult {
    std::string dataset;
    RunConfig config;
    std::vector<std::vector<FoldCurve>> curves;  // [repeat][fold]
    std::vector<double> repeat_final_acc;        // mean over folds
    std::vector<double> repeat_best_acc;
    double mean_final_acc = 0.0;
    double std_final_acc = 0.0;
    double mean_best_acc = 0.0;
    double std_best_acc = 0.0;
    // Wall-clock time; reported on stderr, never serialized, so equal seeds
    // give byte-identical JSON.
    double wall_seconds = 0.0;
};

// Stratified fold assignment (fold id per graph). Falls back to unstratified
// with a warning when some class has fewer members than folds.
std::vector<int> stratified_folds(const Dataset& ds, int folds, std::uint64_t seed);

// The evaluation protocol: per repeat, a seeded stratified split; per fold,
// training on the other folds with per-epoch augmentation and evaluation on
// the held-out originals. Repeats re-seed both the split and training.
RunResult cross_validate(const Dataset& ds, const RunConfig& cfg);

// Final trained parameters of a single training run on the full dataset
// (used by the train CLI to produce a checkpoint for embedding export).
ModelParams train_full(const Dataset& ds, const RunConfig& cfg);

std::string run_result_to_json(const RunResult& result);
std::string run_result_csv_row(const RunResult& result);

// One row per original graph: graph-index, label, readout embedding values.
void export_embeddings(const Dataset& ds, const ModelParams& params, const ModelConfig& cfg,
                       std::ostream& out);

struct GridOptions {
    std::vector<double> lrs = {0.01, 0.0005};
    std::vector<int> batch_sizes = {32, 128};
    std::vector<double> dropouts = {0.0, 0.5};
    std::vector<int> layer_counts = {3, 5, 8, 16, 32, 64, 100};
    std::vector<double> ratios = {0.2, 0.4};  // DropEdge / DropNode; SoftEdge stays at 0.2
};

std::vector<RunConfig> grid_configs(const RunConfig& base, const GridOptions& options);

}  // namespace softgraph
