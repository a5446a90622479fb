#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "softgraph/fixtures.hpp"
#include "softgraph/train.hpp"
#include "softgraph/tudataset.hpp"
#include "softgraph/verify.hpp"
#include "softgraph/wl.hpp"

namespace {

using namespace softgraph;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

struct DatasetArgs {
    std::string name;
    std::string dir = "data";
    bool use_node_attributes = false;

    Dataset load() const {
        // Built-in fixtures are addressable like datasets so README examples
        // need no extra files.
        if (name == "WLPAIR") return fixtures::wl_pair_dataset();
        if (name == "COLPAIRS") return fixtures::collision_pairs_dataset();
        return load_tudataset(TuDatasetFiles::discover(dir, name, use_node_attributes));
    }
};

void add_dataset_options(CLI::App* cmd, DatasetArgs& args) {
    cmd->add_option("--dataset", args.name, "dataset name (<dir>/<name>/<name>_*.txt, or WLPAIR / COLPAIRS)")
        ->required();
    cmd->add_option("--dir", args.dir, "dataset root directory");
    cmd->add_flag("--use-node-attributes", args.use_node_attributes,
                  "append node attributes to one-hot node labels");
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& seed) {
    if (seed) return *seed;
    std::cerr << "notice: --seed not given, using seed 0\n";
    return 0;
}

void write_or_print(const std::optional<std::string>& path, const std::string& content) {
    if (!path) {
        std::cout << content;
        return;
    }
    std::ofstream out(*path);
    if (!out) throw DataError("cannot write " + *path);
    out << content;
}

int run(int argc, char** argv) {
    CLI::App app{"graph classification lab: soft-edge augmentation, WL collision audit, training"};
    app.require_subcommand(1);

    // stats
    auto* stats_cmd = app.add_subcommand("stats", "dataset statistics as a CSV row");
    DatasetArgs stats_args;
    add_dataset_options(stats_cmd, stats_args);

    // audit
    auto* audit_cmd = app.add_subcommand("audit", "collision report for a dataset and augmentation policy");
    DatasetArgs audit_args;
    add_dataset_options(audit_cmd, audit_args);
    std::string audit_method = "none";
    double audit_lambda = 0.2;
    std::uint64_t audit_epochs = 1;
    int audit_k = 0;
    std::optional<std::uint64_t> audit_seed;
    std::optional<std::string> audit_out;
    std::size_t audit_cap = 100;
    audit_cmd->add_option("--method", audit_method, "none | softedge | dropedge | dropnode");
    audit_cmd->add_option("--lambda", audit_lambda, "augmentation ratio in [0,1)");
    audit_cmd->add_option("--epochs", audit_epochs, "augmented epochs to pool");
    audit_cmd->add_option("--k", audit_k, "WL rounds (default: max node count)");
    audit_cmd->add_option("--seed", audit_seed, "RNG seed");
    audit_cmd->add_option("--out", audit_out, "write JSON report here (default: stdout)");
    audit_cmd->add_option("--witness-cap", audit_cap, "max witness pairs listed per type");

    // augment
    auto* augment_cmd = app.add_subcommand("augment", "write one augmented epoch in TUDataset format");
    DatasetArgs augment_args;
    add_dataset_options(augment_cmd, augment_args);
    std::string augment_method = "softedge";
    double augment_lambda = 0.2;
    std::uint64_t augment_epoch_index = 1;
    std::optional<std::uint64_t> augment_seed;
    std::string augment_out_dir;
    augment_cmd->add_option("--method", augment_method, "softedge | dropedge | dropnode");
    augment_cmd->add_option("--lambda", augment_lambda, "augmentation ratio in [0,1)");
    augment_cmd->add_option("--epoch", augment_epoch_index, "epoch index for stream derivation");
    augment_cmd->add_option("--seed", augment_seed, "RNG seed");
    augment_cmd->add_option("--out-dir", augment_out_dir, "output directory")->required();

    // train / grid share most options
    auto* train_cmd = app.add_subcommand("train", "one cross-validated run");
    auto* grid_cmd = app.add_subcommand("grid", "hyperparameter grid sweep");
    struct TrainArgs {
        DatasetArgs data;
        std::string arch = "gin";
        int layers = 5;
        int hidden = 64;
        std::string readout;
        double dropout = 0.0;
        bool eps_learnable = false;
        double lr = 0.0005;
        int batch = 32;
        int epochs = 350;
        int folds = 10;
        int repeats = 3;
        std::string method = "none";
        double lambda = 0.2;
        std::optional<std::uint64_t> seed;
        int jobs = 1;
        std::optional<std::string> out;
        std::optional<std::string> checkpoint;

        RunConfig to_config() const {
            RunConfig cfg;
            cfg.model.arch = arch_from_string(arch);
            cfg.model.num_layers = layers;
            cfg.model.hidden_dim = hidden;
            cfg.model.readout =
                readout.empty() ? default_readout(cfg.model.arch) : readout_from_string(readout);
            cfg.model.dropout_after_dense = dropout;
            cfg.model.gin_epsilon_learnable = eps_learnable;
            cfg.augment.method = augment_method_from_string(method);
            cfg.augment.ratio = cfg.augment.method == AugmentMethod::None ? 0.0 : lambda;
            cfg.lr0 = lr;
            cfg.batch_size = batch;
            cfg.epochs = epochs;
            cfg.folds = folds;
            cfg.repeats = repeats;
            cfg.seed = resolve_seed(seed);
            cfg.augment.seed = cfg.seed;
            cfg.jobs = jobs;
            return cfg;
        }
    };
    TrainArgs train_args, grid_args;
    auto add_train_options = [](CLI::App* cmd, TrainArgs& args) {
        add_dataset_options(cmd, args.data);
        cmd->add_option("--arch", args.arch, "gin | resgcn");
        cmd->add_option("--layers", args.layers, "number of layers");
        cmd->add_option("--hidden", args.hidden, "hidden dimension");
        cmd->add_option("--readout", args.readout, "sum | mean | max (default per arch)");
        cmd->add_option("--dropout", args.dropout, "dropout after the dense readout");
        cmd->add_flag("--eps-learnable", args.eps_learnable, "learn the GIN epsilon");
        cmd->add_option("--lr", args.lr, "initial learning rate");
        cmd->add_option("--batch", args.batch, "batch size");
        cmd->add_option("--epochs", args.epochs, "training epochs");
        cmd->add_option("--folds", args.folds, "cross-validation folds");
        cmd->add_option("--repeats", args.repeats, "independent repeats");
        cmd->add_option("--augment", args.method, "none | softedge | dropedge | dropnode");
        cmd->add_option("--lambda", args.lambda, "augmentation ratio");
        cmd->add_option("--seed", args.seed, "RNG seed");
        cmd->add_option("--jobs", args.jobs, "parallel fold workers");
        cmd->add_option("--out", args.out, "result file (default: stdout)");
    };
    add_train_options(train_cmd, train_args);
    train_cmd->add_option("--checkpoint", train_args.checkpoint,
                          "also train once on the full dataset and save a checkpoint");
    add_train_options(grid_cmd, grid_args);
    std::vector<int> grid_layers = {3, 5, 8, 16, 32, 64, 100};
    std::vector<double> grid_lrs = {0.01, 0.0005};
    std::vector<int> grid_batches = {32, 128};
    std::vector<double> grid_dropouts = {0.0, 0.5};
    std::vector<double> grid_ratios = {0.2, 0.4};
    bool grid_per_config = false;
    grid_cmd->add_option("--grid-layers", grid_layers, "layer counts to sweep")->delimiter(',');
    grid_cmd->add_option("--grid-lrs", grid_lrs, "learning rates to sweep")->delimiter(',');
    grid_cmd->add_option("--grid-batches", grid_batches, "batch sizes to sweep")->delimiter(',');
    grid_cmd->add_option("--grid-dropouts", grid_dropouts, "dropout ratios to sweep")->delimiter(',');
    grid_cmd->add_option("--grid-ratios", grid_ratios, "drop ratios to sweep (dropedge/dropnode)")
        ->delimiter(',');
    grid_cmd->add_flag("--per-config", grid_per_config, "print one CSV row per configuration");

    // export-embeddings
    auto* export_cmd = app.add_subcommand("export-embeddings", "readout embeddings of originals as CSV");
    DatasetArgs export_args;
    add_dataset_options(export_cmd, export_args);
    std::string export_checkpoint;
    std::optional<std::string> export_out;
    export_cmd->add_option("--checkpoint", export_checkpoint, "model checkpoint")->required();
    export_cmd->add_option("--out", export_out, "CSV file (default: stdout)");

    // verify
    auto* verify_cmd = app.add_subcommand("verify", "built-in verification suites");
    std::string verify_suite = "all";
    std::size_t verify_trials = 0;
    std::optional<std::uint64_t> verify_seed;
    std::string verify_dir = "data";
    verify_cmd->add_option("--suite", verify_suite, "lemma2 | lemma3 | dropedge-equiv | gradcheck | all");
    verify_cmd->add_option("--trials", verify_trials, "trial count (default per suite)");
    verify_cmd->add_option("--seed", verify_seed, "RNG seed");
    verify_cmd->add_option("--dir", verify_dir, "dataset root (lemma2 uses MUTAG graph 0)");

    CLI11_PARSE(app, argc, argv);

    if (stats_cmd->parsed()) {
        const Dataset ds = stats_args.load();
        std::cout << "name,num_graphs,avg_nodes,avg_edges,feature_dim,num_classes\n";
        std::cout << compute_stats(ds).csv_row(ds.name) << "\n";
        return kExitOk;
    }

    if (audit_cmd->parsed()) {
        const Dataset ds = audit_args.load();
        AugmentSpec spec;
        spec.method = augment_method_from_string(audit_method);
        spec.ratio = spec.method == AugmentMethod::None ? 0.0 : audit_lambda;
        spec.seed = resolve_seed(audit_seed);
        const int k = audit_k > 0 ? audit_k : default_wl_rounds(ds);
        const CollisionReport report = audit_dataset(ds, spec, k, audit_epochs, audit_cap);
        std::cout << report_to_text(report);
        if (audit_out) write_or_print(audit_out, report_to_json(report));
        else std::cout << report_to_json(report);
        return kExitOk;
    }

    if (augment_cmd->parsed()) {
        const Dataset ds = augment_args.load();
        AugmentSpec spec;
        spec.method = augment_method_from_string(augment_method);
        spec.ratio = augment_lambda;
        spec.seed = resolve_seed(augment_seed);
        Dataset out = augment_epoch(ds, spec, augment_epoch_index);
        out.name = ds.name;
        const auto files = write_fixture(out, augment_out_dir,
                                         spec.method == AugmentMethod::SoftEdge);
        std::cout << "wrote " << (std::filesystem::path(augment_out_dir) / out.name).string()
                  << (files.edge_weights ? " (with edge_weights sidecar)" : "") << "\n";
        return kExitOk;
    }

    if (train_cmd->parsed()) {
        const Dataset ds = train_args.data.load();
        const RunConfig cfg = train_args.to_config();
        const RunResult result = cross_validate(ds, cfg);
        std::cerr << "wall: " << result.wall_seconds << " s\n";
        write_or_print(train_args.out, run_result_to_json(result));
        if (train_args.checkpoint) {
            ModelConfig model = cfg.model;
            model.input_dim = ds.feature_dim;
            model.num_classes = ds.num_classes;
            save_checkpoint(model, train_full(ds, cfg), *train_args.checkpoint);
            std::cerr << "checkpoint: " << *train_args.checkpoint << "\n";
        }
        return kExitOk;
    }

    if (grid_cmd->parsed()) {
        const Dataset ds = grid_args.data.load();
        GridOptions options;
        options.layer_counts = grid_layers;
        options.lrs = grid_lrs;
        options.batch_sizes = grid_batches;
        options.dropouts = grid_dropouts;
        options.ratios = grid_ratios;
        const auto configs = grid_configs(grid_args.to_config(), options);
        std::cout << "dataset,arch,layers,method,lambda,mean_acc,std_acc\n";
        std::optional<RunResult> best;
        for (const auto& cfg : configs) {
            const RunResult result = cross_validate(ds, cfg);
            if (grid_per_config) std::cout << run_result_csv_row(result) << "\n";
            if (!best || result.mean_final_acc > best->mean_final_acc) best = result;
        }
        std::cout << "# best of " << configs.size() << " configs\n";
        std::cout << run_result_csv_row(*best) << "\n";
        return kExitOk;
    }

    if (export_cmd->parsed()) {
        const Dataset ds = export_args.load();
        const auto [cfg, params] = load_checkpoint(export_checkpoint);
        std::ostringstream csv;
        export_embeddings(ds, params, cfg, csv);
        write_or_print(export_out, csv.str());
        return kExitOk;
    }

    if (verify_cmd->parsed()) {
        const std::uint64_t seed = resolve_seed(verify_seed);
        std::vector<checks::CheckResult> results;
        auto want = [&](const std::string& s) { return verify_suite == "all" || verify_suite == s; };
        if (want("lemma2")) {
            const Dataset mutag =
                load_tudataset(TuDatasetFiles::discover(verify_dir, "MUTAG"));
            const std::size_t trials = verify_trials ? verify_trials : 10000;
            results.push_back(checks::lemma2_check(mutag.graphs[0], 0.2, trials, seed));
        }
        if (want("lemma3")) {
            const std::size_t trials = verify_trials ? verify_trials : 1000;
            results.push_back(checks::lemma3_check(trials, trials - trials / 1000, seed));
        }
        if (want("dropedge-equiv")) {
            const std::size_t trials = verify_trials ? verify_trials : 1000;
            results.push_back(checks::dropedge_equivalence_check(trials, seed));
        }
        if (want("gradcheck")) {
            const std::size_t trials = verify_trials ? verify_trials : 100;
            results.push_back(checks::gradient_check(trials, seed));
        }
        if (results.empty()) {
            std::cerr << "unknown suite: " << verify_suite << "\n";
            return kExitUsage;
        }
        bool all_pass = true;
        for (const auto& r : results) {
            std::cout << (r.pass ? "PASS" : "FAIL") << " " << r.name << ": " << r.detail << "\n";
            all_pass = all_pass && r.pass;
        }
        return all_pass ? kExitOk : kExitInternal;
    }

    return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const softgraph::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const CLI::Error&) {
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInternal;
    }
}
