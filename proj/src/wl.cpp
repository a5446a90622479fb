#include "softgraph/wl.hpp"

#include <algorithm>
#include <array>
#include <cstring>
#include <map>
#include <sstream>

#include <json.hpp>

namespace softgraph {
namespace {

std::uint64_t double_bits(double x) {
    std::uint64_t b;
    std::memcpy(&b, &x, sizeof b);
    return b;
}

void append_u64(std::vector<std::uint8_t>& buf, std::uint64_t x) {
    const std::size_t at = buf.size();
    buf.resize(at + 8);
    std::memcpy(buf.data() + at, &x, 8);
}

std::vector<Digest128> initial_colors(const Graph& g) {
    std::vector<Digest128> colors(std::size_t(g.num_nodes()));
    for (int v = 0; v < g.num_nodes(); v++) {
        const auto row = g.features().row(v);
        colors[std::size_t(v)] = hash_bytes(row.data(), row.size() * sizeof(double));
    }
    return colors;
}

}  // namespace

WlSignature wl_refine(const Graph& g, int k, bool weighted) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    auto colors = initial_colors(g);
    std::vector<Digest128> next(colors.size());
    std::vector<std::array<std::uint64_t, 3>> contrib;
    std::vector<std::uint8_t> buf;
    for (int round = 0; round < k; round++) {
        for (int v = 0; v < g.num_nodes(); v++) {
            contrib.clear();
            for (const auto& a : g.neighbors(v)) {
                const auto& c = colors[std::size_t(a.dst)];
                contrib.push_back({c.hi, c.lo, weighted ? double_bits(a.weight) : 0});
            }
            std::sort(contrib.begin(), contrib.end());
            buf.clear();
            append_u64(buf, colors[std::size_t(v)].hi);
            append_u64(buf, colors[std::size_t(v)].lo);
            for (const auto& c : contrib) {
                append_u64(buf, c[0]);
                append_u64(buf, c[1]);
                if (weighted) append_u64(buf, c[2]);
            }
            next[std::size_t(v)] = hash_bytes(buf.data(), buf.size());
        }
        std::swap(colors, next);
    }
    std::sort(colors.begin(), colors.end());
    buf.clear();
    append_u64(buf, std::uint64_t(g.num_nodes()));
    for (const auto& c : colors) {
        append_u64(buf, c.hi);
        append_u64(buf, c.lo);
    }
    return WlSignature{k, weighted, hash_bytes(buf.data(), buf.size())};
}

int default_wl_rounds(const Dataset& ds) {
    int k = 1;
    for (const auto& g : ds.graphs) k = std::max(k, g.num_nodes());
    return k;
}

namespace {

struct PoolEntry {
    SyntheticRef ref;
    int label;
};

// Cross-label pair count within one signature bucket: (total^2 - sum_l c_l^2)/2.
std::size_t cross_label_pairs(const std::map<int, std::size_t>& label_counts) {
    std::size_t total = 0, same = 0;
    for (const auto& [label, c] : label_counts) {
        total += c;
        same += c * c;
    }
    return (total * total - same) / 2;
}

}  // namespace

CollisionReport audit_dataset(const Dataset& ds, const AugmentSpec& spec, int k,
                              std::uint64_t epochs, std::size_t witness_cap) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
    CollisionReport report;
    report.dataset = ds.name;
    report.spec = spec;
    report.rounds = k;
    report.epochs = epochs;
    report.witness_cap = witness_cap;

    // Type 3: originals under the classical (unit-weight) test.
    std::map<Digest128, std::vector<std::size_t>> original_groups;
    for (std::size_t i = 0; i < ds.graphs.size(); i++)
        original_groups[wl_refine(ds.graphs[i], k, false).hash].push_back(i);
    for (const auto& [sig, members] : original_groups) {
        std::map<int, std::size_t> label_counts;
        for (std::size_t i : members) label_counts[ds.graphs[i].label()]++;
        report.type3_count += cross_label_pairs(label_counts);
        for (std::size_t a = 0; a < members.size(); a++)
            for (std::size_t b = a + 1; b < members.size(); b++)
                if (ds.graphs[members[a]].label() != ds.graphs[members[b]].label() &&
                    report.type3.size() < witness_cap)
                    report.type3.emplace_back(members[a], members[b]);
    }

    if (spec.method == AugmentMethod::None || spec.ratio == 0.0) return report;

    // Weighted signatures of the originals, for synthetic-vs-original checks.
    std::map<Digest128, std::map<int, std::size_t>> original_weighted;
    std::map<Digest128, std::vector<std::size_t>> original_weighted_members;
    for (std::size_t i = 0; i < ds.graphs.size(); i++) {
        const auto sig = wl_refine(ds.graphs[i], k, true).hash;
        original_weighted[sig][ds.graphs[i].label()]++;
        original_weighted_members[sig].push_back(i);
    }

    // Synthetic pool over all epochs.
    std::map<Digest128, std::vector<PoolEntry>> pool;
    for (std::uint64_t epoch = 1; epoch <= epochs; epoch++) {
        const Dataset aug = augment_epoch(ds, spec, epoch);
        for (std::size_t i = 0; i < aug.graphs.size(); i++) {
            const auto sig = wl_refine(aug.graphs[i], k, true).hash;
            pool[sig].push_back({{epoch, i}, aug.graphs[i].label()});
        }
    }

    for (const auto& [sig, entries] : pool) {
        // Type 1: synthetic vs. original.
        if (auto it = original_weighted.find(sig); it != original_weighted.end()) {
            std::size_t originals_total = 0;
            for (const auto& [label, c] : it->second) originals_total += c;
            for (const auto& entry : entries) {
                const auto same_it = it->second.find(entry.label);
                const std::size_t same = same_it == it->second.end() ? 0 : same_it->second;
                report.type1_count += originals_total - same;
                if (originals_total > same && report.type1.size() < witness_cap)
                    for (std::size_t orig : original_weighted_members.at(sig))
                        if (ds.graphs[orig].label() != entry.label &&
                            report.type1.size() < witness_cap)
                            report.type1.emplace_back(entry.ref, orig);
            }
        }
        // Type 2: within the pool.
        std::map<int, std::size_t> label_counts;
        for (const auto& entry : entries) label_counts[entry.label]++;
        report.type2_count += cross_label_pairs(label_counts);
        if (label_counts.size() > 1)
            for (std::size_t a = 0; a < entries.size(); a++)
                for (std::size_t b = a + 1; b < entries.size(); b++)
                    if (entries[a].label != entries[b].label && report.type2.size() < witness_cap)
                        report.type2.emplace_back(entries[a].ref, entries[b].ref);
    }
    return report;
}

Lemma2Result verify_lemma2(const Graph& g, double lambda, std::size_t trials,
                           std::uint64_t seed) {
    if (trials < 2) throw std::invalid_argument("trials must be >= 2");
    Lemma2Result result;
    result.trials = trials;
    if (lambda == 0.0) {
        result.lambda_zero_identity = true;
        result.collisions = trials * (trials - 1) / 2;
        return result;
    }
    AugmentSpec spec{AugmentMethod::SoftEdge, lambda, seed};
    std::map<std::vector<double>, std::size_t> seen;
    for (std::size_t t = 0; t < trials; t++) {
        SplitMix64 rng(derive_stream(seed, t, 0));
        const Graph aug = soft_edge(g, spec, rng);
        std::vector<double> weights;
        weights.reserve(aug.arcs().size());
        for (const auto& a : aug.arcs()) weights.push_back(a.weight);
        seen[std::move(weights)]++;
    }
    for (const auto& [vec, c] : seen) result.collisions += c * (c - 1) / 2;
    return result;
}

namespace {

nlohmann::json spec_to_json(const AugmentSpec& spec) {
    return {{"method", to_string(spec.method)}, {"ratio", spec.ratio}, {"seed", spec.seed}};
}

nlohmann::json ref_to_json(const SyntheticRef& r) {
    return {{"epoch", r.epoch}, {"graph", r.graph_index}};
}

}  // namespace

std::string report_to_json(const CollisionReport& report) {
    nlohmann::json j;
    j["dataset"] = report.dataset;
    j["augment"] = spec_to_json(report.spec);
    j["rounds"] = report.rounds;
    j["epochs"] = report.epochs;
    j["witness_cap"] = report.witness_cap;
    j["counts"] = {{"type1", report.type1_count},
                   {"type2", report.type2_count},
                   {"type3", report.type3_count}};
    auto& t1 = j["witnesses"]["type1"] = nlohmann::json::array();
    for (const auto& [ref, orig] : report.type1)
        t1.push_back({{"synthetic", ref_to_json(ref)}, {"original", orig}});
    auto& t2 = j["witnesses"]["type2"] = nlohmann::json::array();
    for (const auto& [a, b] : report.type2)
        t2.push_back({{"a", ref_to_json(a)}, {"b", ref_to_json(b)}});
    auto& t3 = j["witnesses"]["type3"] = nlohmann::json::array();
    for (const auto& [a, b] : report.type3) t3.push_back({{"a", a}, {"b", b}});
    return j.dump(2) + "\n";
}

std::string report_to_text(const CollisionReport& report) {
    std::ostringstream out;
    out << "dataset: " << report.dataset << "  method: " << to_string(report.spec.method)
        << "  ratio: " << report.spec.ratio << "  epochs: " << report.epochs
        << "  k: " << report.rounds << "\n";
    out << "type  count  description\n";
    out << "   1  " << report.type1_count << "  synthetic vs original, equal signature, labels differ\n";
    out << "   2  " << report.type2_count << "  synthetic vs synthetic, equal signature, labels differ\n";
    out << "   3  " << report.type3_count << "  originals WL-indistinguishable, labels differ\n";
    return out.str();
}

}  // namespace softgraph
