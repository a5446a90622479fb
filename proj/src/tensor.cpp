#include "softgraph/tensor.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace softgraph {

namespace {
bool g_blocked_matmul = false;
}

void set_blocked_matmul(bool enabled) { g_blocked_matmul = enabled; }
bool blocked_matmul_enabled() { return g_blocked_matmul; }

int Tensor::rows() const { return tape_->node(index_).rows; }
int Tensor::cols() const { return tape_->node(index_).cols; }
const std::vector<double>& Tensor::value() const { return tape_->node(index_).value; }
const std::vector<double>& Tensor::grad() const { return tape_->node(index_).grad; }
bool Tensor::requires_grad() const { return tape_->node(index_).requires_grad; }

double Tensor::scalar() const {
    const auto& n = tape_->node(index_);
    if (n.rows != 1 || n.cols != 1) throw std::logic_error("scalar() on non-1x1 tensor");
    return n.value[0];
}

std::size_t Tape::make_node(int rows, int cols, bool requires_grad) {
    Node n;
    n.rows = rows;
    n.cols = cols;
    n.value.assign(std::size_t(rows) * cols, 0.0);
    n.requires_grad = requires_grad;
    if (requires_grad) n.grad.assign(n.value.size(), 0.0);
    nodes_.push_back(std::move(n));
    return nodes_.size() - 1;
}

void Tape::check_finite(std::size_t i) const {
#ifndef NDEBUG
    for (double x : nodes_[i].value) assert(std::isfinite(x) && "non-finite forward value");
#else
    (void)i;
#endif
}

Tensor Tape::leaf(int rows, int cols, std::vector<double> values, bool requires_grad) {
    if (values.size() != std::size_t(rows) * cols) throw std::invalid_argument("leaf size mismatch");
    const std::size_t i = make_node(rows, cols, requires_grad);
    nodes_[i].value = std::move(values);
    return Tensor(this, i);
}

Tensor Tape::leaf(const Matrix& m, bool requires_grad) {
    return leaf(m.rows, m.cols, m.data, requires_grad);
}

namespace {

void matmul_naive(const double* a, const double* b, double* c, int m, int k, int n) {
    for (int i = 0; i < m; i++) {
        double* ci = c + std::size_t(i) * n;
        for (int p = 0; p < k; p++) {
            const double aip = a[std::size_t(i) * k + p];
            if (aip == 0.0) continue;
            const double* bp = b + std::size_t(p) * n;
            for (int j = 0; j < n; j++) ci[j] += aip * bp[j];
        }
    }
}

void matmul_blocked(const double* a, const double* b, double* c, int m, int k, int n) {
    constexpr int B = 48;
    for (int i0 = 0; i0 < m; i0 += B)
        for (int p0 = 0; p0 < k; p0 += B)
            for (int j0 = 0; j0 < n; j0 += B) {
                const int i1 = std::min(i0 + B, m), p1 = std::min(p0 + B, k), j1 = std::min(j0 + B, n);
                for (int i = i0; i < i1; i++)
                    for (int p = p0; p < p1; p++) {
                        const double aip = a[std::size_t(i) * k + p];
                        for (int j = j0; j < j1; j++)
                            c[std::size_t(i) * n + j] += aip * b[std::size_t(p) * n + j];
                    }
            }
}

void matmul_into(const double* a, const double* b, double* c, int m, int k, int n) {
    if (g_blocked_matmul) matmul_blocked(a, b, c, m, k, n);
    else matmul_naive(a, b, c, m, k, n);
}

}  // namespace

Tensor Tape::matmul(Tensor a, Tensor b) {
    const auto& na = node(a.index_);
    const auto& nb = node(b.index_);
    if (na.cols != nb.rows) throw std::invalid_argument("matmul shape mismatch");
    const int m = na.rows, k = na.cols, n = nb.cols;
    const std::size_t out = make_node(m, n, na.requires_grad || nb.requires_grad);
    matmul_into(node(a.index_).value.data(), node(b.index_).value.data(),
                nodes_[out].value.data(), m, k, n);
    check_finite(out);
    if (nodes_[out].requires_grad) {
        const std::size_t ia = a.index_, ib = b.index_;
        steps_.push_back([this, ia, ib, out, m, k, n] {
            const auto& g = nodes_[out].grad;
            if (nodes_[ia].requires_grad) {
                // a.grad += g * b^T
                auto& ga = nodes_[ia].grad;
                const auto& bv = nodes_[ib].value;
                for (int i = 0; i < m; i++)
                    for (int p = 0; p < k; p++) {
                        double s = 0;
                        for (int j = 0; j < n; j++)
                            s += g[std::size_t(i) * n + j] * bv[std::size_t(p) * n + j];
                        ga[std::size_t(i) * k + p] += s;
                    }
            }
            if (nodes_[ib].requires_grad) {
                // b.grad += a^T * g
                auto& gb = nodes_[ib].grad;
                const auto& av = nodes_[ia].value;
                for (int p = 0; p < k; p++)
                    for (int i = 0; i < m; i++) {
                        const double aip = av[std::size_t(i) * k + p];
                        if (aip == 0.0) continue;
                        for (int j = 0; j < n; j++)
                            gb[std::size_t(p) * n + j] += aip * g[std::size_t(i) * n + j];
                    }
            }
        });
    }
    return Tensor(this, out);
}

Tensor Tape::add(Tensor a, Tensor b) {
    // make_node may reallocate nodes_, so shapes and flags are copied out
    // before any node reference is taken again (same in every op below).
    const auto [rows, cols, rg] = [&] {
        const auto& na = node(a.index_);
        const auto& nb = node(b.index_);
        if (na.rows != nb.rows || na.cols != nb.cols)
            throw std::invalid_argument("add shape mismatch");
        return std::tuple{na.rows, na.cols, na.requires_grad || nb.requires_grad};
    }();
    const std::size_t out = make_node(rows, cols, rg);
    for (std::size_t i = 0; i < nodes_[out].value.size(); i++)
        nodes_[out].value[i] = node(a.index_).value[i] + node(b.index_).value[i];
    if (nodes_[out].requires_grad) {
        const std::size_t ia = a.index_, ib = b.index_;
        steps_.push_back([this, ia, ib, out] {
            const auto& g = nodes_[out].grad;
            if (nodes_[ia].requires_grad)
                for (std::size_t i = 0; i < g.size(); i++) nodes_[ia].grad[i] += g[i];
            if (nodes_[ib].requires_grad)
                for (std::size_t i = 0; i < g.size(); i++) nodes_[ib].grad[i] += g[i];
        });
    }
    return Tensor(this, out);
}

Tensor Tape::add_row_broadcast(Tensor a, Tensor bias) {
    const auto [rows, cols, rg] = [&] {
        const auto& na = node(a.index_);
        const auto& nb = node(bias.index_);
        if (nb.rows != 1 || nb.cols != na.cols)
            throw std::invalid_argument("bias must be 1 x cols(a)");
        return std::tuple{na.rows, na.cols, na.requires_grad || nb.requires_grad};
    }();
    const std::size_t out = make_node(rows, cols, rg);
    for (int i = 0; i < rows; i++)
        for (int j = 0; j < cols; j++)
            nodes_[out].value[std::size_t(i) * cols + j] =
                node(a.index_).value[std::size_t(i) * cols + j] + node(bias.index_).value[std::size_t(j)];
    if (nodes_[out].requires_grad) {
        const std::size_t ia = a.index_, ib = bias.index_;
        steps_.push_back([this, ia, ib, out, rows, cols] {
            const auto& g = nodes_[out].grad;
            if (nodes_[ia].requires_grad)
                for (std::size_t i = 0; i < g.size(); i++) nodes_[ia].grad[i] += g[i];
            if (nodes_[ib].requires_grad)
                for (int i = 0; i < rows; i++)
                    for (int j = 0; j < cols; j++)
                        nodes_[ib].grad[std::size_t(j)] += g[std::size_t(i) * cols + j];
        });
    }
    return Tensor(this, out);
}

Tensor Tape::mul(Tensor a, Tensor b) {
    const auto [rows, cols, rg] = [&] {
        const auto& na = node(a.index_);
        const auto& nb = node(b.index_);
        if (na.rows != nb.rows || na.cols != nb.cols)
            throw std::invalid_argument("mul shape mismatch");
        return std::tuple{na.rows, na.cols, na.requires_grad || nb.requires_grad};
    }();
    const std::size_t out = make_node(rows, cols, rg);
    for (std::size_t i = 0; i < nodes_[out].value.size(); i++)
        nodes_[out].value[i] = node(a.index_).value[i] * node(b.index_).value[i];
    if (nodes_[out].requires_grad) {
        const std::size_t ia = a.index_, ib = b.index_;
        steps_.push_back([this, ia, ib, out] {
            const auto& g = nodes_[out].grad;
            if (nodes_[ia].requires_grad)
                for (std::size_t i = 0; i < g.size(); i++)
                    nodes_[ia].grad[i] += g[i] * nodes_[ib].value[i];
            if (nodes_[ib].requires_grad)
                for (std::size_t i = 0; i < g.size(); i++)
                    nodes_[ib].grad[i] += g[i] * nodes_[ia].value[i];
        });
    }
    return Tensor(this, out);
}

Tensor Tape::scale(Tensor a, double c) {
    const auto [rows, cols, rg] = [&] {
        const auto& na = node(a.index_);
        return std::tuple{na.rows, na.cols, na.requires_grad};
    }();
    const std::size_t out = make_node(rows, cols, rg);
    for (std::size_t i = 0; i < nodes_[out].value.size(); i++)
        nodes_[out].value[i] = node(a.index_).value[i] * c;
    if (nodes_[out].requires_grad) {
        const std::size_t ia = a.index_;
        steps_.push_back([this, ia, out, c] {
            const auto& g = nodes_[out].grad;
            for (std::size_t i = 0; i < g.size(); i++) nodes_[ia].grad[i] += g[i] * c;
        });
    }
    return Tensor(this, out);
}

Tensor Tape::scale_rows(Tensor a, std::vector<double> coef) {
    const auto [rows, cols, rg] = [&] {
        const auto& na = node(a.index_);
        if (int(coef.size()) != na.rows) throw std::invalid_argument("scale_rows size mismatch");
        return std::tuple{na.rows, na.cols, na.requires_grad};
    }();
    const std::size_t out = make_node(rows, cols, rg);
    for (int i = 0; i < rows; i++)
        for (int j = 0; j < cols; j++)
            nodes_[out].value[std::size_t(i) * cols + j] =
                node(a.index_).value[std::size_t(i) * cols + j] * coef[std::size_t(i)];
    if (nodes_[out].requires_grad) {
        const std::size_t ia = a.index_;
        steps_.push_back([this, ia, out, cols, coef = std::move(coef)] {
            const auto& g = nodes_[out].grad;
            for (std::size_t i = 0; i < g.size(); i++)
                nodes_[ia].grad[i] += g[i] * coef[i / std::size_t(cols)];
        });
    }
    return Tensor(this, out);
}

Tensor Tape::scale_scalar_param(Tensor a, Tensor s, double offset) {
    const auto [rows, cols, rg, factor] = [&] {
        const auto& na = node(a.index_);
        const auto& ns = node(s.index_);
        if (ns.rows != 1 || ns.cols != 1) throw std::invalid_argument("s must be 1x1");
        return std::tuple{na.rows, na.cols, na.requires_grad || ns.requires_grad,
                          offset + ns.value[0]};
    }();
    const std::size_t out = make_node(rows, cols, rg);
    for (std::size_t i = 0; i < nodes_[out].value.size(); i++)
        nodes_[out].value[i] = node(a.index_).value[i] * factor;
    if (nodes_[out].requires_grad) {
        const std::size_t ia = a.index_, is = s.index_;
        steps_.push_back([this, ia, is, out, factor] {
            const auto& g = nodes_[out].grad;
            if (nodes_[ia].requires_grad)
                for (std::size_t i = 0; i < g.size(); i++) nodes_[ia].grad[i] += g[i] * factor;
            if (nodes_[is].requires_grad) {
                double s_grad = 0;
                for (std::size_t i = 0; i < g.size(); i++) s_grad += g[i] * nodes_[ia].value[i];
                nodes_[is].grad[0] += s_grad;
            }
        });
    }
    return Tensor(this, out);
}

Tensor Tape::relu(Tensor a) {
    const auto [rows, cols, rg] = [&] {
        const auto& na = node(a.index_);
        return std::tuple{na.rows, na.cols, na.requires_grad};
    }();
    const std::size_t out = make_node(rows, cols, rg);
    for (std::size_t i = 0; i < nodes_[out].value.size(); i++)
        nodes_[out].value[i] = std::max(0.0, node(a.index_).value[i]);
    if (nodes_[out].requires_grad) {
        const std::size_t ia = a.index_;
        steps_.push_back([this, ia, out] {
            const auto& g = nodes_[out].grad;
            for (std::size_t i = 0; i < g.size(); i++)
                if (nodes_[ia].value[i] > 0.0) nodes_[ia].grad[i] += g[i];
        });
    }
    return Tensor(this, out);
}

Tensor Tape::row_gather(Tensor a, std::vector<int> rows) {
    const auto [cols, rg] = [&] {
        const auto& na = node(a.index_);
        for (int r : rows)
            if (r < 0 || r >= na.rows) throw std::out_of_range("row_gather index out of range");
        return std::tuple{na.cols, na.requires_grad};
    }();
    const std::size_t out = make_node(int(rows.size()), cols, rg);
    for (std::size_t i = 0; i < rows.size(); i++)
        for (int j = 0; j < cols; j++)
            nodes_[out].value[i * std::size_t(cols) + j] =
                node(a.index_).value[std::size_t(rows[i]) * cols + j];
    if (nodes_[out].requires_grad) {
        const std::size_t ia = a.index_;
        steps_.push_back([this, ia, out, cols, rows = std::move(rows)] {
            const auto& g = nodes_[out].grad;
            for (std::size_t i = 0; i < rows.size(); i++)
                for (int j = 0; j < cols; j++)
                    nodes_[ia].grad[std::size_t(rows[i]) * cols + j] += g[i * std::size_t(cols) + j];
        });
    }
    return Tensor(this, out);
}

Tensor Tape::scatter_weighted_sum(Tensor messages, std::vector<int> targets,
                                  std::vector<double> weights, int out_rows) {
    const auto [cols, rg] = [&] {
        const auto& nm = node(messages.index_);
        if (targets.size() != std::size_t(nm.rows) || weights.size() != targets.size())
            throw std::invalid_argument(
                "scatter_weighted_sum: one target and weight per message row");
        for (int t : targets)
            if (t < 0 || t >= out_rows) throw std::out_of_range("scatter target out of range");
        return std::tuple{nm.cols, nm.requires_grad};
    }();
    const std::size_t out = make_node(out_rows, cols, rg);
    for (std::size_t i = 0; i < targets.size(); i++) {
        const double w = weights[i];
        for (int j = 0; j < cols; j++)
            nodes_[out].value[std::size_t(targets[i]) * cols + j] +=
                w * node(messages.index_).value[i * std::size_t(cols) + j];
    }
    check_finite(out);
    if (nodes_[out].requires_grad) {
        const std::size_t im = messages.index_;
        steps_.push_back([this, im, out, cols, targets = std::move(targets),
                          weights = std::move(weights)] {
            const auto& g = nodes_[out].grad;
            for (std::size_t i = 0; i < targets.size(); i++) {
                const double w = weights[i];
                for (int j = 0; j < cols; j++)
                    nodes_[im].grad[i * std::size_t(cols) + j] +=
                        w * g[std::size_t(targets[i]) * cols + j];
            }
        });
    }
    return Tensor(this, out);
}

Tensor Tape::segment_readout(Tensor a, std::vector<int> segment, int num_segments, Readout kind) {
    const auto [cols, rg] = [&] {
        const auto& na = node(a.index_);
        if (segment.size() != std::size_t(na.rows))
            throw std::invalid_argument("segment_readout: one segment id per row");
        for (int s : segment)
            if (s < 0 || s >= num_segments) throw std::out_of_range("segment id out of range");
        return std::tuple{na.cols, na.requires_grad};
    }();
    const std::size_t out = make_node(num_segments, cols, rg);
    std::vector<std::size_t> count(std::size_t(num_segments), 0);
    for (int s : segment) count[std::size_t(s)]++;

    std::vector<int> argmax;  // row index per (segment, col); -1 = empty
    if (kind == Readout::Max) {
        argmax.assign(std::size_t(num_segments) * cols, -1);
        for (std::size_t i = 0; i < segment.size(); i++)
            for (int j = 0; j < cols; j++) {
                const std::size_t slot = std::size_t(segment[i]) * cols + j;
                const double x = node(a.index_).value[i * std::size_t(cols) + j];
                if (argmax[slot] < 0 ||
                    x > node(a.index_).value[std::size_t(argmax[slot]) * cols + j]) {
                    argmax[slot] = int(i);
                    nodes_[out].value[slot] = x;
                }
            }
    } else {
        for (std::size_t i = 0; i < segment.size(); i++)
            for (int j = 0; j < cols; j++)
                nodes_[out].value[std::size_t(segment[i]) * cols + j] +=
                    node(a.index_).value[i * std::size_t(cols) + j];
        if (kind == Readout::Mean)
            for (int s = 0; s < num_segments; s++)
                if (count[std::size_t(s)] > 0)
                    for (int j = 0; j < cols; j++)
                        nodes_[out].value[std::size_t(s) * cols + j] /= double(count[std::size_t(s)]);
    }
    if (nodes_[out].requires_grad) {
        const std::size_t ia = a.index_;
        steps_.push_back([this, ia, out, cols, kind, count = std::move(count),
                          segment = std::move(segment), argmax = std::move(argmax)] {
            const auto& g = nodes_[out].grad;
            if (kind == Readout::Max) {
                for (std::size_t slot = 0; slot < argmax.size(); slot++)
                    if (argmax[slot] >= 0)
                        nodes_[ia].grad[std::size_t(argmax[slot]) * cols + int(slot % std::size_t(cols))] +=
                            g[slot];
            } else {
                for (std::size_t i = 0; i < segment.size(); i++) {
                    const double f =
                        kind == Readout::Mean ? 1.0 / double(count[std::size_t(segment[i])]) : 1.0;
                    for (int j = 0; j < cols; j++)
                        nodes_[ia].grad[i * std::size_t(cols) + j] +=
                            f * g[std::size_t(segment[i]) * cols + j];
                }
            }
        });
    }
    return Tensor(this, out);
}

Tensor Tape::dropout(Tensor a, double drop_prob, SplitMix64& rng, bool train) {
    if (drop_prob < 0.0 || drop_prob >= 1.0) throw std::invalid_argument("drop_prob must be in [0,1)");
    if (!train || drop_prob == 0.0) return a;
    const auto [rows, cols, rg] = [&] {
        const auto& na = node(a.index_);
        return std::tuple{na.rows, na.cols, na.requires_grad};
    }();
    const double keep = 1.0 - drop_prob;
    std::vector<double> mask(std::size_t(rows) * cols);
    for (auto& m : mask) m = rng.uniform() < keep ? 1.0 / keep : 0.0;
    const std::size_t out = make_node(rows, cols, rg);
    for (std::size_t i = 0; i < mask.size(); i++)
        nodes_[out].value[i] = node(a.index_).value[i] * mask[i];
    if (nodes_[out].requires_grad) {
        const std::size_t ia = a.index_;
        steps_.push_back([this, ia, out, mask = std::move(mask)] {
            const auto& g = nodes_[out].grad;
            for (std::size_t i = 0; i < g.size(); i++) nodes_[ia].grad[i] += g[i] * mask[i];
        });
    }
    return Tensor(this, out);
}

Tensor Tape::softmax_cross_entropy(Tensor logits, std::vector<int> labels) {
    const auto& nl = node(logits.index_);
    const int batch = nl.rows, classes = nl.cols;
    if (labels.size() != std::size_t(batch))
        throw std::invalid_argument("softmax_cross_entropy: one label per row");
    for (int y : labels)
        if (y < 0 || y >= classes) throw std::out_of_range("label out of range");

    std::vector<double> softmax(nl.value.size());
    double loss = 0;
    for (int b = 0; b < batch; b++) {
        const double* row = nl.value.data() + std::size_t(b) * classes;
        double mx = row[0];
        for (int c = 1; c < classes; c++) mx = std::max(mx, row[c]);
        double z = 0;
        for (int c = 0; c < classes; c++) z += std::exp(row[c] - mx);
        for (int c = 0; c < classes; c++)
            softmax[std::size_t(b) * classes + c] = std::exp(row[c] - mx) / z;
        loss += std::log(z) - (row[labels[std::size_t(b)]] - mx);
    }
    loss /= double(batch);
    const std::size_t out = make_node(1, 1, nl.requires_grad);
    nodes_[out].value[0] = loss;
    if (nodes_[out].requires_grad) {
        const std::size_t il = logits.index_;
        steps_.push_back([this, il, out, batch, classes, softmax = std::move(softmax),
                          labels = std::move(labels)] {
            const double g = nodes_[out].grad[0] / double(batch);
            for (int b = 0; b < batch; b++)
                for (int c = 0; c < classes; c++)
                    nodes_[il].grad[std::size_t(b) * classes + c] +=
                        g * (softmax[std::size_t(b) * classes + c] -
                             (c == labels[std::size_t(b)] ? 1.0 : 0.0));
        });
    }
    return Tensor(this, out);
}

void Tape::backward(Tensor loss) {
    auto& n = node(loss.index_);
    if (!n.requires_grad) throw std::logic_error("backward from a non-differentiable tensor");
    if (n.rows != 1 || n.cols != 1) throw std::logic_error("backward expects a scalar loss");
    n.grad[0] = 1.0;
    for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) (*it)();
}

}  // namespace softgraph
