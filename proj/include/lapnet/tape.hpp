// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "lapnet/tensor.hpp"

namespace lapnet {

// Handle into a Tape. Only meaningful together with the tape that issued it.
struct TensorRef {
    std::uint32_t id = 0;
};

// Define-by-run tape. Every operation computes its output eagerly and records
// enough to replay the chain rule in reverse creation order. One tape per
// training sample (or per evaluated frame); single-threaded by construction.
class Tape {
    enum class Op : std::uint8_t {
        Leaf,
        Param,
        Linear,
        Softmax,
        LogSoftmax,
        Sigmoid,
        Tanh,
        OneMinus,
        Mul,
        Add,
        Sub,
        Concat,
        MeanRows,
        WeightedSum,
        Sum,
        CrossEntropy,
        ValueOverride,
    };

    struct Node {
        Tensor own;                // storage unless external
        Tensor* external = nullptr;  // parameter leaves live outside the tape
        Op op = Op::Leaf;
        std::array<std::uint32_t, 3> in{};
        std::uint8_t n_in = 0;
        std::vector<std::uint32_t> in_list;  // variadic inputs (Concat etc.)
        int label = -1;                      // CrossEntropy target index
        bool requires_grad = false;

        Tensor& t() { return external ? *external : own; }
        const Tensor& t() const { return external ? *external : own; }
    };

public:
    explicit Tape(bool grad_enabled = true) : grad_enabled_(grad_enabled) {}

    bool grad_enabled() const { return grad_enabled_; }
    std::size_t node_count() const { return nodes_.size(); }

    const Tensor& at(TensorRef r) const { return nodes_[r.id].t(); }
    const Shape& shape(TensorRef r) const { return at(r).shape; }
    const std::vector<double>& values(TensorRef r) const { return at(r).values; }

    // Node-local adjoint accumulated by backward(). Empty when grads are off
    // or the node does not require them.
    const std::vector<double>& grad(TensorRef r) const { return nodes_[r.id].t().grad; }

    // Times cross_entropy hit its probability floor; these runs deserve a look.
    std::size_t clamped_log_events() const { return clamped_log_events_; }

    TensorRef leaf(Shape s, std::vector<double> v, bool requires_grad = false) {
        Node n;
        n.op = Op::Leaf;
        n.requires_grad = grad_enabled_ && requires_grad;
        n.own = Tensor(std::move(s), std::move(v), n.requires_grad);
        return push(std::move(n));
    }

    TensorRef constant(std::vector<double> v) {
        Shape s{v.size()};  // sized before the move; argument order is unspecified
        return leaf(std::move(s), std::move(v), false);
    }
    TensorRef constant(Shape s, std::vector<double> v) { return leaf(std::move(s), std::move(v), false); }

    TensorRef scalar(double x) { return leaf({1}, {x}, false); }

    TensorRef fill(const Shape& s, double x) {
        return leaf(s, std::vector<double>(shape_size(s), x), false);
    }

    // Leases an externally owned parameter onto the tape. Backward accumulates
    // straight into p.grad.
    TensorRef param(Tensor& p) {
        require(p.requires_grad, "param tensors must have requires_grad set");
        Node n;
        n.op = Op::Param;
        n.external = &p;
        n.requires_grad = grad_enabled_;
        return push(std::move(n));
    }

    // out_i = sum_j W_ij x_j + b_i
    TensorRef linear(TensorRef x, TensorRef w, TensorRef b) {
        const Tensor& xt = at(x);
        const Tensor& wt = at(w);
        const Tensor& bt = at(b);
        if (wt.shape.size() != 2 || xt.shape.size() != 1 || bt.shape.size() != 1)
            throw DimensionError("linear expects rank-2 weight and rank-1 input/bias");
        std::size_t m = wt.shape[0], k = wt.shape[1];
        if (xt.size() != k || bt.size() != m)
            throw DimensionError("linear shape mismatch");
        std::vector<double> out(m);
        const double* wp = wt.values.data();
        const double* xp = xt.values.data();
        for (std::size_t i = 0; i < m; ++i) {
            double acc = bt.values[i];
            const double* row = wp + i * k;
            for (std::size_t j = 0; j < k; ++j) acc += row[j] * xp[j];
            out[i] = acc;
        }
        return record(Op::Linear, {x, w, b}, Tensor({m}, std::move(out)));
    }

    TensorRef softmax(TensorRef x) {
        const Tensor& xt = at(x);
        if (xt.size() == 0) throw DimensionError("softmax of empty tensor");
        std::vector<double> out = softmax_values(xt.values);
        return record(Op::Softmax, {x}, Tensor(xt.shape, std::move(out)));
    }

    TensorRef log_softmax(TensorRef x) {
        const Tensor& xt = at(x);
        if (xt.size() == 0) throw DimensionError("log_softmax of empty tensor");
        double mx = *std::max_element(xt.values.begin(), xt.values.end());
        double sum = 0.0;
        for (double v : xt.values) sum += std::exp(v - mx);
        double lse = mx + std::log(sum);
        std::vector<double> out(xt.size());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = xt.values[i] - lse;
        return record(Op::LogSoftmax, {x}, Tensor(xt.shape, std::move(out)));
    }

    TensorRef sigmoid(TensorRef x) { return unary(Op::Sigmoid, x); }
    TensorRef tanh(TensorRef x) { return unary(Op::Tanh, x); }
    TensorRef one_minus(TensorRef x) { return unary(Op::OneMinus, x); }

    TensorRef mul(TensorRef a, TensorRef b) { return binary(Op::Mul, a, b); }
    TensorRef add(TensorRef a, TensorRef b) { return binary(Op::Add, a, b); }
    TensorRef sub(TensorRef a, TensorRef b) { return binary(Op::Sub, a, b); }

    TensorRef concat(std::span<const TensorRef> xs) {
        if (xs.empty()) throw DimensionError("concat of empty list");
        std::size_t total = 0;
        for (TensorRef r : xs) total += at(r).size();
        std::vector<double> out;
        out.reserve(total);
        for (TensorRef r : xs)
            out.insert(out.end(), at(r).values.begin(), at(r).values.end());
        Node n;
        n.op = Op::Concat;
        n.in_list.reserve(xs.size());
        for (TensorRef r : xs) {
            n.in_list.push_back(r.id);
            n.requires_grad |= node_rg(r);
        }
        n.own = Tensor({total}, std::move(out), n.requires_grad);
        return push(std::move(n));
    }

    TensorRef concat(std::initializer_list<TensorRef> xs) {
        return concat(std::span<const TensorRef>(xs.begin(), xs.size()));
    }

    TensorRef mean_rows(std::span<const TensorRef> rows) {
        if (rows.empty()) throw DimensionError("mean_rows of empty list");
        const Shape& s = shape(rows.front());
        std::vector<double> out(at(rows.front()).size(), 0.0);
        for (TensorRef r : rows) {
            const Tensor& t = at(r);
            if (t.shape != s) throw DimensionError("mean_rows rows must be congruent");
            for (std::size_t i = 0; i < out.size(); ++i) out[i] += t.values[i];
        }
        double inv = 1.0 / static_cast<double>(rows.size());
        for (double& v : out) v *= inv;
        Node n;
        n.op = Op::MeanRows;
        for (TensorRef r : rows) {
            n.in_list.push_back(r.id);
            n.requires_grad |= node_rg(r);
        }
        n.own = Tensor(s, std::move(out), n.requires_grad);
        return push(std::move(n));
    }

    TensorRef mean_rows(std::initializer_list<TensorRef> rows) {
        return mean_rows(std::span<const TensorRef>(rows.begin(), rows.size()));
    }

    // out = sum_i w_i * rows_i; w is a rank-1 tensor with one entry per row.
    TensorRef weighted_sum(TensorRef w, std::span<const TensorRef> rows) {
        const Tensor& wt = at(w);
        if (wt.shape.size() != 1 || wt.size() != rows.size())
            throw DimensionError("weighted_sum needs one weight per row");
        if (rows.empty()) throw DimensionError("weighted_sum of empty list");
        const Shape& s = shape(rows.front());
        std::vector<double> out(at(rows.front()).size(), 0.0);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const Tensor& t = at(rows[i]);
            if (t.shape != s) throw DimensionError("weighted_sum rows must be congruent");
            double wi = wt.values[i];
            for (std::size_t j = 0; j < out.size(); ++j) out[j] += wi * t.values[j];
        }
        Node n;
        n.op = Op::WeightedSum;
        n.in_list.push_back(w.id);
        n.requires_grad = node_rg(w);
        for (TensorRef r : rows) {
            n.in_list.push_back(r.id);
            n.requires_grad |= node_rg(r);
        }
        n.own = Tensor(s, std::move(out), n.requires_grad);
        return push(std::move(n));
    }

    // Scalar sum of all entries.
    TensorRef sum(TensorRef x) {
        const Tensor& xt = at(x);
        if (xt.size() == 0) throw DimensionError("sum of empty tensor");
        double total = 0.0;
        for (double v : xt.values) total += v;
        return record(Op::Sum, {x}, Tensor({1}, {total}));
    }

    // -log p[label], with the probability floored at 1e-12.
    TensorRef cross_entropy(TensorRef probs, int label) {
        const Tensor& pt = at(probs);
        if (label < 0 || static_cast<std::size_t>(label) >= pt.size())
            throw ContractError("cross_entropy label out of range");
        double total = 0.0;
        for (double v : pt.values) total += v;
        if (std::abs(total - 1.0) > 1e-6)
            throw ContractError("cross_entropy input does not sum to 1");
        double p = pt.values[static_cast<std::size_t>(label)];
        if (p < 1e-12) {
            p = 1e-12;
            ++clamped_log_events_;
        }
        Node n;
        n.op = Op::CrossEntropy;
        n.in[0] = probs.id;
        n.n_in = 1;
        n.label = label;
        n.requires_grad = node_rg(probs);
        n.own = Tensor({1}, {-std::log(p)}, n.requires_grad);
        return push(std::move(n));
    }

    // Forward takes the forced values verbatim; backward is the identity into x.
    // This is the straight-through primitive: the forced values are the hard
    // sample, x the relaxed path supplying the gradient.
    TensorRef value_override(TensorRef x, std::vector<double> forced) {
        const Tensor& xt = at(x);
        if (forced.size() != xt.size())
            throw DimensionError("value_override size mismatch");
        Node n;
        n.op = Op::ValueOverride;
        n.in[0] = x.id;
        n.n_in = 1;
        n.requires_grad = node_rg(x);
        n.own = Tensor(xt.shape, std::move(forced), n.requires_grad);
        return push(std::move(n));
    }

    // Accumulates dLoss/dNode into every requires_grad node reachable from
    // loss, including external parameters. Adjoints are fresh per call, so
    // calling twice doubles the accumulated grads.
    void backward(TensorRef loss) {
        require(grad_enabled_, "backward on a no-grad tape");
        if (at(loss).size() != 1)
            throw ContractError("backward requires a scalar loss");
        std::vector<std::vector<double>> adj(nodes_.size());
        auto touch = [&](std::uint32_t id) -> std::vector<double>& {
            if (adj[id].empty()) adj[id].assign(nodes_[id].t().size(), 0.0);
            return adj[id];
        };
        touch(loss.id)[0] = 1.0;
        for (std::uint32_t id = loss.id + 1; id-- > 0;) {
            Node& n = nodes_[id];
            if (!n.requires_grad || adj[id].empty()) continue;
            const std::vector<double>& g = adj[id];
            switch (n.op) {
                case Op::Leaf:
                case Op::Param:
                    break;
                case Op::Linear: {
                    Node& xn = nodes_[n.in[0]];
                    Node& wn = nodes_[n.in[1]];
                    Node& bn = nodes_[n.in[2]];
                    const Tensor& wt = wn.t();
                    const Tensor& xt = xn.t();
                    std::size_t m = wt.shape[0], k = wt.shape[1];
                    if (xn.requires_grad) {
                        std::vector<double>& gx = touch(n.in[0]);
                        for (std::size_t i = 0; i < m; ++i) {
                            const double* row = wt.values.data() + i * k;
                            double gi = g[i];
                            for (std::size_t j = 0; j < k; ++j) gx[j] += row[j] * gi;
                        }
                    }
                    if (wn.requires_grad) {
                        std::vector<double>& gw = touch(n.in[1]);
                        for (std::size_t i = 0; i < m; ++i) {
                            double gi = g[i];
                            double* row = gw.data() + i * k;
                            const double* xp = xt.values.data();
                            for (std::size_t j = 0; j < k; ++j) row[j] += gi * xp[j];
                        }
                    }
                    if (bn.requires_grad) {
                        std::vector<double>& gb = touch(n.in[2]);
                        for (std::size_t i = 0; i < m; ++i) gb[i] += g[i];
                    }
                    break;
                }
                case Op::Softmax: {
                    if (!nodes_[n.in[0]].requires_grad) break;
                    const std::vector<double>& y = n.t().values;
                    std::vector<double>& gx = touch(n.in[0]);
                    double dot = 0.0;
                    for (std::size_t i = 0; i < y.size(); ++i) dot += g[i] * y[i];
                    for (std::size_t i = 0; i < y.size(); ++i) gx[i] += y[i] * (g[i] - dot);
                    break;
                }
                case Op::LogSoftmax: {
                    if (!nodes_[n.in[0]].requires_grad) break;
                    const std::vector<double>& y = n.t().values;
                    std::vector<double>& gx = touch(n.in[0]);
                    double sum = 0.0;
                    for (double gi : g) sum += gi;
                    for (std::size_t i = 0; i < y.size(); ++i)
                        gx[i] += g[i] - std::exp(y[i]) * sum;
                    break;
                }
                case Op::Sigmoid: {
                    if (!nodes_[n.in[0]].requires_grad) break;
                    const std::vector<double>& y = n.t().values;
                    std::vector<double>& gx = touch(n.in[0]);
                    for (std::size_t i = 0; i < y.size(); ++i)
                        gx[i] += y[i] * (1.0 - y[i]) * g[i];
                    break;
                }
                case Op::Tanh: {
                    if (!nodes_[n.in[0]].requires_grad) break;
                    const std::vector<double>& y = n.t().values;
                    std::vector<double>& gx = touch(n.in[0]);
                    for (std::size_t i = 0; i < y.size(); ++i)
                        gx[i] += (1.0 - y[i] * y[i]) * g[i];
                    break;
                }
                case Op::OneMinus: {
                    if (!nodes_[n.in[0]].requires_grad) break;
                    std::vector<double>& gx = touch(n.in[0]);
                    for (std::size_t i = 0; i < g.size(); ++i) gx[i] -= g[i];
                    break;
                }
                case Op::Mul: {
                    const std::vector<double>& a = nodes_[n.in[0]].t().values;
                    const std::vector<double>& b = nodes_[n.in[1]].t().values;
                    if (nodes_[n.in[0]].requires_grad) {
                        std::vector<double>& ga = touch(n.in[0]);
                        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += b[i] * g[i];
                    }
                    if (nodes_[n.in[1]].requires_grad) {
                        std::vector<double>& gb = touch(n.in[1]);
                        for (std::size_t i = 0; i < g.size(); ++i) gb[i] += a[i] * g[i];
                    }
                    break;
                }
                case Op::Add: {
                    for (int s = 0; s < 2; ++s) {
                        if (!nodes_[n.in[s]].requires_grad) continue;
                        std::vector<double>& gs = touch(n.in[s]);
                        for (std::size_t i = 0; i < g.size(); ++i) gs[i] += g[i];
                    }
                    break;
                }
                case Op::Sub: {
                    if (nodes_[n.in[0]].requires_grad) {
                        std::vector<double>& ga = touch(n.in[0]);
                        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
                    }
                    if (nodes_[n.in[1]].requires_grad) {
                        std::vector<double>& gb = touch(n.in[1]);
                        for (std::size_t i = 0; i < g.size(); ++i) gb[i] -= g[i];
                    }
                    break;
                }
                case Op::Concat: {
                    std::size_t off = 0;
                    for (std::uint32_t src : n.in_list) {
                        std::size_t len = nodes_[src].t().size();
                        if (nodes_[src].requires_grad) {
                            std::vector<double>& gs = touch(src);
                            for (std::size_t i = 0; i < len; ++i) gs[i] += g[off + i];
                        }
                        off += len;
                    }
                    break;
                }
                case Op::MeanRows: {
                    double inv = 1.0 / static_cast<double>(n.in_list.size());
                    for (std::uint32_t src : n.in_list) {
                        if (!nodes_[src].requires_grad) continue;
                        std::vector<double>& gs = touch(src);
                        for (std::size_t i = 0; i < g.size(); ++i) gs[i] += inv * g[i];
                    }
                    break;
                }
                case Op::WeightedSum: {
                    std::uint32_t wid = n.in_list[0];
                    const std::vector<double>& w = nodes_[wid].t().values;
                    for (std::size_t r = 0; r + 1 < n.in_list.size(); ++r) {
                        std::uint32_t rid = n.in_list[r + 1];
                        const std::vector<double>& row = nodes_[rid].t().values;
                        if (nodes_[wid].requires_grad) {
                            double dot = 0.0;
                            for (std::size_t i = 0; i < g.size(); ++i) dot += g[i] * row[i];
                            touch(wid)[r] += dot;
                        }
                        if (nodes_[rid].requires_grad) {
                            std::vector<double>& gr = touch(rid);
                            for (std::size_t i = 0; i < g.size(); ++i) gr[i] += w[r] * g[i];
                        }
                    }
                    break;
                }
                case Op::Sum: {
                    if (!nodes_[n.in[0]].requires_grad) break;
                    std::vector<double>& gx = touch(n.in[0]);
                    for (double& v : gx) v += g[0];
                    break;
                }
                case Op::CrossEntropy: {
                    if (!nodes_[n.in[0]].requires_grad) break;
                    std::size_t lab = static_cast<std::size_t>(n.label);
                    double p = nodes_[n.in[0]].t().values[lab];
                    if (p < 1e-12) p = 1e-12;
                    touch(n.in[0])[lab] -= g[0] / p;
                    break;
                }
                case Op::ValueOverride: {
                    if (!nodes_[n.in[0]].requires_grad) break;
                    std::vector<double>& gx = touch(n.in[0]);
                    for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i];
                    break;
                }
            }
        }
        // Fold adjoints into the persistent accumulators.
        for (std::uint32_t id = 0; id <= loss.id; ++id) {
            if (adj[id].empty()) continue;
            Tensor& t = nodes_[id].t();
            if (!t.requires_grad) continue;
            if (t.grad.size() != t.values.size()) t.grad.assign(t.values.size(), 0.0);
            for (std::size_t i = 0; i < t.grad.size(); ++i) t.grad[i] += adj[id][i];
        }
    }

    static std::vector<double> softmax_values(const std::vector<double>& x) {
        double mx = *std::max_element(x.begin(), x.end());
        std::vector<double> out(x.size());
        double sum = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            out[i] = std::exp(x[i] - mx);
            sum += out[i];
        }
        for (double& v : out) v /= sum;
        return out;
    }

private:
    bool node_rg(TensorRef r) const { return nodes_[r.id].requires_grad; }

    TensorRef unary(Op op, TensorRef x) {
        const Tensor& xt = at(x);
        std::vector<double> out(xt.size());
        switch (op) {
            case Op::Sigmoid:
                for (std::size_t i = 0; i < out.size(); ++i)
                    out[i] = 1.0 / (1.0 + std::exp(-xt.values[i]));
                break;
            case Op::Tanh:
                for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::tanh(xt.values[i]);
                break;
            case Op::OneMinus:
                for (std::size_t i = 0; i < out.size(); ++i) out[i] = 1.0 - xt.values[i];
                break;
            default:
                throw ContractError("bad unary op");
        }
        return record(op, {x}, Tensor(xt.shape, std::move(out)));
    }

    TensorRef binary(Op op, TensorRef a, TensorRef b) {
        const Tensor& ta = at(a);
        const Tensor& tb = at(b);
        if (ta.shape != tb.shape)
            throw DimensionError("elementwise operands must be shape-congruent");
        std::vector<double> out(ta.size());
        switch (op) {
            case Op::Mul:
                for (std::size_t i = 0; i < out.size(); ++i) out[i] = ta.values[i] * tb.values[i];
                break;
            case Op::Add:
                for (std::size_t i = 0; i < out.size(); ++i) out[i] = ta.values[i] + tb.values[i];
                break;
            case Op::Sub:
                for (std::size_t i = 0; i < out.size(); ++i) out[i] = ta.values[i] - tb.values[i];
                break;
            default:
                throw ContractError("bad binary op");
        }
        return record(op, {a, b}, Tensor(ta.shape, std::move(out)));
    }

    TensorRef record(Op op, std::initializer_list<TensorRef> in, Tensor out) {
        Node n;
        n.op = op;
        for (TensorRef r : in) {
            n.in[n.n_in++] = r.id;
            n.requires_grad |= node_rg(r);
        }
        out.requires_grad = n.requires_grad;
        if (n.requires_grad) out.grad.assign(out.values.size(), 0.0);
        n.own = std::move(out);
        return push(std::move(n));
    }

    TensorRef push(Node n) {
        nodes_.push_back(std::move(n));
        return TensorRef{static_cast<std::uint32_t>(nodes_.size() - 1)};
    }

    std::vector<Node> nodes_;
    bool grad_enabled_ = true;
    std::size_t clamped_log_events_ = 0;
};

}  // namespace lapnet
