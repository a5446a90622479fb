#include "softgraph/verify.hpp"

#include <cmath>
#include <sstream>

#include "softgraph/augment.hpp"
#include "softgraph/fixtures.hpp"
#include "softgraph/gnn.hpp"
#include "softgraph/wl.hpp"

namespace softgraph::checks {
namespace {

std::string count_detail(std::size_t got, std::size_t want, const std::string& what) {
    std::ostringstream out;
    out << got << "/" << want << " " << what;
    return out.str();
}

Graph random_graph(SplitMix64& rng, int n, int feature_dim, double edge_prob,
                   bool soft_weights) {
    Matrix feats(n, feature_dim);
    for (auto& x : feats.data) x = 0.5 + rng.uniform();
    std::vector<UndirectedEdge> edges;
    for (int u = 0; u < n; u++)
        for (int v = u + 1; v < n; v++)
            if (rng.uniform() < edge_prob)
                edges.push_back({u, v, soft_weights ? rng.uniform_open01() : 1.0});
    return Graph(n, std::move(feats), edges, int(rng.below(2)));
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0;
    for (std::size_t i = 0; i < a.size(); i++) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

double l2_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); i++) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

}  // namespace

CheckResult lemma2_check(const Graph& g, double lambda, std::size_t trials, std::uint64_t seed) {
    const auto result = verify_lemma2(g, lambda, trials, seed);
    CheckResult check;
    check.name = "lemma2";
    if (result.lambda_zero_identity) {
        check.pass = false;
        check.detail = "lambda=0 is the identity transform; all " +
                       std::to_string(result.collisions) + " pairs coincide";
        return check;
    }
    check.pass = result.collisions == 0;
    check.detail = std::to_string(result.collisions) + " identical weight-vector pairs over " +
                   std::to_string(trials) + " draws";
    return check;
}

CheckResult lemma3_check(std::size_t trials, std::size_t required, std::uint64_t seed) {
    const Graph left = fixtures::decalin();
    const Graph right = fixtures::bicyclopentyl();
    const int k = 10;
    CheckResult check;
    check.name = "lemma3";

    if (!(wl_refine(left, k, false) == wl_refine(right, k, false))) {
        check.detail = "fixture pair is classically distinguishable; fixture broken";
        return check;
    }

    ModelConfig cfg;
    cfg.arch = Arch::GIN;
    cfg.num_layers = 3;
    cfg.hidden_dim = 16;
    cfg.readout = Readout::Sum;
    cfg.input_dim = 1;
    cfg.num_classes = 2;

    const AugmentSpec spec{AugmentMethod::SoftEdge, 0.2, seed};
    std::size_t unit_equal = 0, separated = 0;
    for (std::size_t t = 0; t < trials; t++) {
        const ModelParams params = ModelParams::init(cfg, mix_u64(seed, t));
        Tape unit_tape;
        const auto el = forward_graph(unit_tape, left, params, cfg, false);
        const auto er = forward_graph(unit_tape, right, params, cfg, false);
        if (max_abs_diff(el.embeddings.value(), er.embeddings.value()) < 1e-9) unit_equal++;

        SplitMix64 rl(derive_stream(seed, t, 0));
        SplitMix64 rr(derive_stream(seed, t, 1));
        const Graph al = soft_edge(left, spec, rl);
        const Graph ar = soft_edge(right, spec, rr);
        const bool sig_differ = !(wl_refine(al, k, true) == wl_refine(ar, k, true));
        Tape tape;
        const auto al_fwd = forward_graph(tape, al, params, cfg, false);
        const auto ar_fwd = forward_graph(tape, ar, params, cfg, false);
        const bool emb_differ = l2_diff(al_fwd.embeddings.value(), ar_fwd.embeddings.value()) > 1e-6;
        if (sig_differ && emb_differ) separated++;
    }
    check.pass = unit_equal == trials && separated >= required;
    check.detail = count_detail(unit_equal, trials, "unit-weight embeddings equal") + "; " +
                   count_detail(separated, trials, "soft-edge draws separated the pair");
    return check;
}

CheckResult dropedge_equivalence_check(std::size_t trials, std::uint64_t seed) {
    CheckResult check;
    check.name = "dropedge-equivalence";
    double worst = 0.0;
    std::size_t ok = 0;
    for (std::size_t t = 0; t < trials; t++) {
        SplitMix64 rng(mix_u64(seed, t));
        const int n = 3 + int(rng.below(6));
        const Graph g = random_graph(rng, n, 3, 0.5, false);
        const auto edges = g.undirected_edges();
        // Random edge subset to silence.
        std::vector<bool> zeroed(edges.size());
        for (auto&& z : zeroed) z = rng.below(2) == 1;

        BatchView direct = BatchView::from_graph(g);
        for (std::size_t i = 0; i < direct.arc_src.size(); i++) {
            const auto& a = direct;
            int u = a.arc_src[i], v = a.arc_tgt[i];
            if (u > v) std::swap(u, v);
            for (std::size_t e = 0; e < edges.size(); e++)
                if (zeroed[e] && edges[e].u == u && edges[e].v == v) direct.arc_weight[i] = 0.0;
        }
        std::vector<UndirectedEdge> kept;
        for (std::size_t e = 0; e < edges.size(); e++)
            if (!zeroed[e]) kept.push_back(edges[e]);
        const Graph deleted(g.num_nodes(), g.features(), kept, g.label());
        const BatchView deleted_view = BatchView::from_graph(deleted);

        double diff = 0.0;
        for (Arch arch : {Arch::GIN, Arch::ResGCN}) {
            ModelConfig cfg;
            cfg.arch = arch;
            cfg.num_layers = 3;
            cfg.hidden_dim = 8;
            cfg.readout = default_readout(arch);
            cfg.input_dim = 3;
            cfg.num_classes = 2;
            const ModelParams params = ModelParams::init(cfg, mix_u64(seed ^ 0xabcd, t));
            Tape tape;
            const auto a = forward_batch(tape, direct, params, cfg, false);
            const auto b = forward_batch(tape, deleted_view, params, cfg, false);
            diff = std::max(diff, max_abs_diff(a.logits.value(), b.logits.value()));
            diff = std::max(diff, max_abs_diff(a.embeddings.value(), b.embeddings.value()));
        }
        worst = std::max(worst, diff);
        if (diff <= 1e-12) ok++;
    }
    check.pass = ok == trials;
    std::ostringstream detail;
    detail << count_detail(ok, trials, "pairs matched within 1e-12") << "; worst " << worst;
    check.detail = detail.str();
    return check;
}

namespace {

double loss_of(const BatchView& batch, const ModelParams& params, const ModelConfig& cfg) {
    Tape tape;
    auto fwd = forward_batch(tape, batch, params, cfg, false);
    return tape.softmax_cross_entropy(fwd.logits, batch.labels).scalar();
}

double grad_rel_error(const BatchView& batch, ModelParams params, const ModelConfig& cfg) {
    Tape tape;
    auto fwd = forward_batch(tape, batch, params, cfg, false);
    Tensor loss = tape.softmax_cross_entropy(fwd.logits, batch.labels);
    tape.backward(loss);

    std::vector<double> analytic, numeric;
    const double h = 1e-5;
    for (std::size_t p = 0; p < params.entries.size(); p++) {
        if (!params.entries[p].trainable) continue;
        const auto& grad = fwd.params[p].grad();
        auto& theta = params.entries[p].value.data;
        for (std::size_t i = 0; i < theta.size(); i++) {
            const double keep = theta[i];
            theta[i] = keep + h;
            const double up = loss_of(batch, params, cfg);
            theta[i] = keep - h;
            const double down = loss_of(batch, params, cfg);
            theta[i] = keep;
            analytic.push_back(grad[i]);
            numeric.push_back((up - down) / (2 * h));
        }
    }
    double diff = 0, norm = 0;
    for (std::size_t i = 0; i < analytic.size(); i++) {
        diff += (analytic[i] - numeric[i]) * (analytic[i] - numeric[i]);
        norm += analytic[i] * analytic[i];
    }
    return std::sqrt(diff) / std::max(std::sqrt(norm), 1e-12);
}

}  // namespace

CheckResult gradient_check(std::size_t trials, std::uint64_t seed) {
    CheckResult check;
    check.name = "gradcheck";
    double worst = 0.0;
    std::size_t ok = 0;
    for (std::size_t t = 0; t < trials; t++) {
        SplitMix64 rng(mix_u64(seed ^ 0x67726164, t));
        const Graph g = random_graph(rng, 5, 4, 0.5, true);
        const BatchView batch = BatchView::from_graph(g);
        double err = 0.0;
        for (Arch arch : {Arch::GIN, Arch::ResGCN}) {
            ModelConfig cfg;
            cfg.arch = arch;
            cfg.num_layers = 3;
            cfg.hidden_dim = 8;
            cfg.readout = default_readout(arch);
            cfg.gin_epsilon_learnable = true;
            cfg.input_dim = 4;
            cfg.num_classes = 2;
            const ModelParams params = ModelParams::init(cfg, rng.next());
            err = std::max(err, grad_rel_error(batch, params, cfg));
        }
        worst = std::max(worst, err);
        if (err < 1e-4) ok++;
    }
    check.pass = ok == trials;
    std::ostringstream detail;
    detail << count_detail(ok, trials, "seeds under 1e-4 relative error") << "; worst " << worst;
    check.detail = detail.str();
    return check;
}

}  // namespace softgraph::checks
