#pragma once

#include <functional>
#include <vector>

#include "softgraph/graph.hpp"
#include "softgraph/rng.hpp"

namespace softgraph {

enum class Readout { Sum, Mean, Max };

class Tape;

// Handle to a node on a Tape. Values and gradients live in the tape; handles
// stay valid for the tape's lifetime.
class Tensor {
public:
    Tensor() = default;

    int rows() const;
    int cols() const;
    const std::vector<double>& value() const;
    const std::vector<double>& grad() const;
    bool requires_grad() const;
    double scalar() const;  // value of a 1x1 tensor

private:
    friend class Tape;
    Tensor(Tape* tape, std::size_t index) : tape_(tape), index_(index) {}
    Tape* tape_ = nullptr;
    std::size_t index_ = 0;
};

// Records forward operations together with backward closures; backward()
// replays them in reverse. Rank <= 2, doubles only. One tape per
// forward/backward pass, owned by a single thread.
class Tape {
public:
    Tensor leaf(int rows, int cols, std::vector<double> values, bool requires_grad = false);
    Tensor leaf(const Matrix& m, bool requires_grad = false);

    // a[m x k] * b[k x n]
    Tensor matmul(Tensor a, Tensor b);
    Tensor add(Tensor a, Tensor b);
    // a[n x d] + bias[1 x d] broadcast over rows
    Tensor add_row_broadcast(Tensor a, Tensor bias);
    Tensor mul(Tensor a, Tensor b);
    Tensor scale(Tensor a, double c);
    // Per-row constant factors (not differentiated through).
    Tensor scale_rows(Tensor a, std::vector<double> coef);
    // (offset + s) * a with s a 1x1 parameter; gradients flow to both a and s.
    Tensor scale_scalar_param(Tensor a, Tensor s, double offset);
    Tensor relu(Tensor a);
    // out[i] = a[rows[i]]
    Tensor row_gather(Tensor a, std::vector<int> rows);
    // out[t] = sum over arcs i with targets[i] = t of weights[i] * messages[i];
    // weights are constants, rows of out without incoming arcs are zero.
    Tensor scatter_weighted_sum(Tensor messages, std::vector<int> targets,
                                std::vector<double> weights, int out_rows);
    // Per-segment Sum / Mean / Max pooling of rows; segment ids must be in
    // [0, num_segments). Max breaks ties toward the lowest row index.
    Tensor segment_readout(Tensor a, std::vector<int> segment, int num_segments, Readout kind);
    // Inverted-scaling dropout: at train time keeps entries with probability
    // 1-p and divides by it; identity at eval time.
    Tensor dropout(Tensor a, double drop_prob, SplitMix64& rng, bool train);
    // Mean negative log-softmax of the true class, row-max stabilized. 1x1.
    Tensor softmax_cross_entropy(Tensor logits, std::vector<int> labels);

    // Seeds d(loss)/d(loss) = 1 and accumulates gradients into every
    // requires-grad node reachable backward from it.
    void backward(Tensor loss);

private:
    friend class Tensor;
    struct Node {
        int rows = 0;
        int cols = 0;
        std::vector<double> value;
        std::vector<double> grad;
        bool requires_grad = false;
    };

    std::size_t make_node(int rows, int cols, bool requires_grad);
    Node& node(std::size_t i) { return nodes_[i]; }
    const Node& node(std::size_t i) const { return nodes_[i]; }
    void check_finite(std::size_t i) const;

    std::vector<Node> nodes_;
    std::vector<std::function<void()>> steps_;
};

// Switches matmul to a cache-blocked kernel (same contract, same operands).
void set_blocked_matmul(bool enabled);
bool blocked_matmul_enabled();

}  // namespace softgraph
