#pragma once

// Eager reverse-mode automatic differentiation on dense matrices.
//
// Every operation creates a node holding its value; backward() walks the
// recorded graph in reverse creation order.  Two backward flavours exist:
//   * backward(loss)          - accumulates raw gradient matrices into
//                               Node::grad (the fast path for parameter
//                               updates), and
//   * backward_graph(y, wrt)  - builds the gradients as new graph nodes, so
//                               they can themselves be differentiated.  The
//                               Lipschitz penalty on the critics needs this
//                               (gradient of a gradient norm).
//
// Rows index batch samples throughout; all ops are row-independent, so the
// gradient of a batch-summed scalar w.r.t. an input recovers the per-sample
// gradients.

#include <Eigen/Dense>

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace tsgad::ad {

template <typename S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

template <typename S>
struct Node;

template <typename S>
using Var = std::shared_ptr<Node<S>>;

inline std::uint64_t next_node_id() {
    static std::atomic<std::uint64_t> counter{0};
    return counter.fetch_add(1, std::memory_order_relaxed);
}

template <typename S>
struct Node {
    Mat<S> value;
    Mat<S> grad;  // valid only during/after backward()
    bool requires_grad = false;
    std::uint64_t id;
    std::vector<Var<S>> inputs;

    // Accumulates input gradients from this node's raw gradient matrix.
    std::function<void(Node<S>&)> back_raw;
    // Same, but the gradients are built as graph nodes.  g is the gradient
    // flowing into this node, self is the node itself (for ops whose
    // derivative reuses the forward value).
    std::function<std::vector<Var<S>>(const Var<S>& g, Node<S>& self)> back_build;

    explicit Node(Mat<S> v) : value(std::move(v)), id(next_node_id()) {}

    S scalar() const { return value(0, 0); }
};

template <typename S>
Var<S> constant(Mat<S> v) {
    return std::make_shared<Node<S>>(std::move(v));
}

template <typename S>
Var<S> constant_scalar(S v) {
    Mat<S> m(1, 1);
    m(0, 0) = v;
    return constant<S>(std::move(m));
}

// Leaf that participates in differentiation (parameters, penalty interpolates).
template <typename S>
Var<S> leaf(Mat<S> v) {
    auto n = std::make_shared<Node<S>>(std::move(v));
    n->requires_grad = true;
    return n;
}

template <typename S>
Var<S> detach(const Var<S>& x) {
    return constant<S>(x->value);
}

namespace detail {

template <typename S>
Var<S> make_op(Mat<S> value, std::vector<Var<S>> inputs) {
    auto n = std::make_shared<Node<S>>(std::move(value));
    for (const auto& in : inputs) {
        if (in->requires_grad) {
            n->requires_grad = true;
            break;
        }
    }
    n->inputs = std::move(inputs);
    return n;
}

template <typename S>
void accum(Var<S>& dst, const Mat<S>& g) {
    if (dst->grad.size() == 0)
        dst->grad = Mat<S>::Zero(dst->value.rows(), dst->value.cols());
    dst->grad += g;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Primitive operations
// ---------------------------------------------------------------------------

template <typename S>
Var<S> add(const Var<S>& a, const Var<S>& b) {
    auto n = detail::make_op<S>(a->value + b->value, {a, b});
    n->back_raw = [](Node<S>& self) {
        if (self.inputs[0]->requires_grad) detail::accum(self.inputs[0], self.grad);
        if (self.inputs[1]->requires_grad) detail::accum(self.inputs[1], self.grad);
    };
    n->back_build = [](const Var<S>& g, Node<S>&) { return std::vector<Var<S>>{g, g}; };
    return n;
}

template <typename S>
Var<S> sub(const Var<S>& a, const Var<S>& b) {
    auto n = detail::make_op<S>(a->value - b->value, {a, b});
    n->back_raw = [](Node<S>& self) {
        if (self.inputs[0]->requires_grad) detail::accum(self.inputs[0], self.grad);
        if (self.inputs[1]->requires_grad) detail::accum(self.inputs[1], Mat<S>(-self.grad));
    };
    n->back_build = [](const Var<S>& g, Node<S>&) {
        return std::vector<Var<S>>{g, neg(g)};
    };
    return n;
}

template <typename S>
Var<S> neg(const Var<S>& a) {
    auto n = detail::make_op<S>(-a->value, {a});
    n->back_raw = [](Node<S>& self) {
        detail::accum(self.inputs[0], Mat<S>(-self.grad));
    };
    n->back_build = [](const Var<S>& g, Node<S>&) { return std::vector<Var<S>>{neg(g)}; };
    return n;
}

template <typename S>
Var<S> scale(const Var<S>& a, S c) {
    auto n = detail::make_op<S>(Mat<S>(a->value * c), {a});
    n->back_raw = [c](Node<S>& self) {
        detail::accum(self.inputs[0], Mat<S>(self.grad * c));
    };
    n->back_build = [c](const Var<S>& g, Node<S>&) { return std::vector<Var<S>>{scale(g, c)}; };
    return n;
}

template <typename S>
Var<S> matmul(const Var<S>& a, const Var<S>& b) {
    auto n = detail::make_op<S>(Mat<S>(a->value * b->value), {a, b});
    n->back_raw = [](Node<S>& self) {
        auto& a_ = self.inputs[0];
        auto& b_ = self.inputs[1];
        if (a_->requires_grad) detail::accum(a_, Mat<S>(self.grad * b_->value.transpose()));
        if (b_->requires_grad) detail::accum(b_, Mat<S>(a_->value.transpose() * self.grad));
    };
    n->back_build = [](const Var<S>& g, Node<S>& self) {
        return std::vector<Var<S>>{matmul(g, transpose(self.inputs[1])),
                                   matmul(transpose(self.inputs[0]), g)};
    };
    return n;
}

template <typename S>
Var<S> transpose(const Var<S>& a) {
    auto n = detail::make_op<S>(Mat<S>(a->value.transpose()), {a});
    n->back_raw = [](Node<S>& self) {
        detail::accum(self.inputs[0], Mat<S>(self.grad.transpose()));
    };
    n->back_build = [](const Var<S>& g, Node<S>&) { return std::vector<Var<S>>{transpose(g)}; };
    return n;
}

// Elementwise product.
template <typename S>
Var<S> cmul(const Var<S>& a, const Var<S>& b) {
    auto n = detail::make_op<S>(Mat<S>(a->value.cwiseProduct(b->value)), {a, b});
    n->back_raw = [](Node<S>& self) {
        auto& a_ = self.inputs[0];
        auto& b_ = self.inputs[1];
        if (a_->requires_grad) detail::accum(a_, Mat<S>(self.grad.cwiseProduct(b_->value)));
        if (b_->requires_grad) detail::accum(b_, Mat<S>(self.grad.cwiseProduct(a_->value)));
    };
    n->back_build = [](const Var<S>& g, Node<S>& self) {
        return std::vector<Var<S>>{cmul(g, self.inputs[1]), cmul(g, self.inputs[0])};
    };
    return n;
}

// Elementwise quotient.
template <typename S>
Var<S> cdiv(const Var<S>& a, const Var<S>& b) {
    auto n = detail::make_op<S>(Mat<S>(a->value.cwiseQuotient(b->value)), {a, b});
    n->back_raw = [](Node<S>& self) {
        auto& a_ = self.inputs[0];
        auto& b_ = self.inputs[1];
        if (a_->requires_grad) detail::accum(a_, Mat<S>(self.grad.cwiseQuotient(b_->value)));
        if (b_->requires_grad) {
            Mat<S> g = -self.grad.cwiseProduct(a_->value)
                            .cwiseQuotient(b_->value.cwiseProduct(b_->value));
            detail::accum(b_, g);
        }
    };
    n->back_build = [](const Var<S>& g, Node<S>& self) {
        auto& a_ = self.inputs[0];
        auto& b_ = self.inputs[1];
        return std::vector<Var<S>>{cdiv(g, b_), neg(cdiv(cmul(g, a_), cmul(b_, b_)))};
    };
    return n;
}

// Adds a 1xC row vector (bias) to every row.
template <typename S>
Var<S> add_rowvec(const Var<S>& a, const Var<S>& bias) {
    Mat<S> v = a->value;
    v.rowwise() += bias->value.row(0);
    auto n = detail::make_op<S>(std::move(v), {a, bias});
    n->back_raw = [](Node<S>& self) {
        if (self.inputs[0]->requires_grad) detail::accum(self.inputs[0], self.grad);
        if (self.inputs[1]->requires_grad)
            detail::accum(self.inputs[1], Mat<S>(self.grad.colwise().sum()));
    };
    n->back_build = [](const Var<S>& g, Node<S>&) {
        return std::vector<Var<S>>{g, colwise_sum(g)};
    };
    return n;
}

template <typename S>
Var<S> colwise_sum(const Var<S>& a) {
    auto n = detail::make_op<S>(Mat<S>(a->value.colwise().sum()), {a});
    n->back_raw = [](Node<S>& self) {
        detail::accum(self.inputs[0],
                      Mat<S>(self.grad.replicate(self.inputs[0]->value.rows(), 1)));
    };
    n->back_build = [](const Var<S>& g, Node<S>& self) {
        return std::vector<Var<S>>{broadcast_rows(g, self.inputs[0]->value.rows())};
    };
    return n;
}

template <typename S>
Var<S> rowwise_sum(const Var<S>& a) {
    auto n = detail::make_op<S>(Mat<S>(a->value.rowwise().sum()), {a});
    n->back_raw = [](Node<S>& self) {
        detail::accum(self.inputs[0],
                      Mat<S>(self.grad.replicate(1, self.inputs[0]->value.cols())));
    };
    n->back_build = [](const Var<S>& g, Node<S>& self) {
        return std::vector<Var<S>>{broadcast_cols(g, self.inputs[0]->value.cols())};
    };
    return n;
}

// Replicates a 1xC row to R rows.
template <typename S>
Var<S> broadcast_rows(const Var<S>& a, Eigen::Index rows) {
    auto n = detail::make_op<S>(Mat<S>(a->value.replicate(rows, 1)), {a});
    n->back_raw = [](Node<S>& self) {
        detail::accum(self.inputs[0], Mat<S>(self.grad.colwise().sum()));
    };
    n->back_build = [](const Var<S>& g, Node<S>&) {
        return std::vector<Var<S>>{colwise_sum(g)};
    };
    return n;
}

// Replicates an Rx1 column to C columns.
template <typename S>
Var<S> broadcast_cols(const Var<S>& a, Eigen::Index cols) {
    auto n = detail::make_op<S>(Mat<S>(a->value.replicate(1, cols)), {a});
    n->back_raw = [](Node<S>& self) {
        detail::accum(self.inputs[0], Mat<S>(self.grad.rowwise().sum()));
    };
    n->back_build = [](const Var<S>& g, Node<S>&) {
        return std::vector<Var<S>>{rowwise_sum(g)};
    };
    return n;
}

template <typename S>
Var<S> sum_all(const Var<S>& a) {
    Mat<S> v(1, 1);
    v(0, 0) = a->value.sum();
    auto n = detail::make_op<S>(std::move(v), {a});
    n->back_raw = [](Node<S>& self) {
        auto& in = self.inputs[0];
        detail::accum(in, Mat<S>(Mat<S>::Constant(in->value.rows(), in->value.cols(),
                                                  self.grad(0, 0))));
    };
    n->back_build = [](const Var<S>& g, Node<S>& self) {
        auto& in = self.inputs[0];
        return std::vector<Var<S>>{
            broadcast_cols(broadcast_rows(g, in->value.rows()), in->value.cols())};
    };
    return n;
}

template <typename S>
Var<S> mean_all(const Var<S>& a) {
    const S inv = S(1) / static_cast<S>(a->value.size());
    return scale(sum_all(a), inv);
}

template <typename S>
Var<S> tanh_(const Var<S>& a) {
    auto n = detail::make_op<S>(Mat<S>(a->value.array().tanh()), {a});
    n->back_raw = [](Node<S>& self) {
        Mat<S> g = self.grad.array() * (S(1) - self.value.array().square());
        detail::accum(self.inputs[0], g);
    };
    n->back_build = [](const Var<S>& g, Node<S>& self) {
        // d tanh = 1 - y^2, with y re-wrapped as a constant of the forward value
        auto y = constant<S>(self.value);
        auto one = constant<S>(Mat<S>::Ones(self.value.rows(), self.value.cols()));
        return std::vector<Var<S>>{cmul(g, sub(one, cmul(y, y)))};
    };
    return n;
}

template <typename S>
Var<S> sigmoid_(const Var<S>& a) {
    Mat<S> v = (S(1) / (S(1) + (-a->value.array()).exp())).matrix();
    auto n = detail::make_op<S>(std::move(v), {a});
    n->back_raw = [](Node<S>& self) {
        Mat<S> g = self.grad.array() * self.value.array() * (S(1) - self.value.array());
        detail::accum(self.inputs[0], g);
    };
    n->back_build = [](const Var<S>& g, Node<S>& self) {
        auto y = constant<S>(self.value);
        auto one = constant<S>(Mat<S>::Ones(self.value.rows(), self.value.cols()));
        return std::vector<Var<S>>{cmul(g, cmul(y, sub(one, y)))};
    };
    return n;
}

template <typename S>
Var<S> leaky_relu(const Var<S>& a, S slope) {
    Mat<S> v = a->value.unaryExpr([slope](S x) { return x > S(0) ? x : slope * x; });
    auto n = detail::make_op<S>(std::move(v), {a});
    n->back_raw = [slope](Node<S>& self) {
        Mat<S> mask = self.inputs[0]->value.unaryExpr(
            [slope](S x) { return x > S(0) ? S(1) : slope; });
        detail::accum(self.inputs[0], Mat<S>(self.grad.cwiseProduct(mask)));
    };
    n->back_build = [slope](const Var<S>& g, Node<S>& self) {
        Mat<S> mask = self.inputs[0]->value.unaryExpr(
            [slope](S x) { return x > S(0) ? S(1) : slope; });
        return std::vector<Var<S>>{cmul(g, constant<S>(std::move(mask)))};
    };
    return n;
}

template <typename S>
Var<S> square_(const Var<S>& a) {
    auto n = detail::make_op<S>(Mat<S>(a->value.array().square()), {a});
    n->back_raw = [](Node<S>& self) {
        Mat<S> g = S(2) * self.grad.cwiseProduct(self.inputs[0]->value);
        detail::accum(self.inputs[0], g);
    };
    n->back_build = [](const Var<S>& g, Node<S>& self) {
        return std::vector<Var<S>>{scale(cmul(g, self.inputs[0]), S(2))};
    };
    return n;
}

template <typename S>
Var<S> sqrt_(const Var<S>& a) {
    auto n = detail::make_op<S>(Mat<S>(a->value.array().sqrt()), {a});
    n->back_raw = [](Node<S>& self) {
        Mat<S> g = (self.grad.array() * S(0.5) / self.value.array()).matrix();
        detail::accum(self.inputs[0], g);
    };
    n->back_build = [](const Var<S>& g, Node<S>& self) {
        auto y = constant<S>(self.value);
        return std::vector<Var<S>>{scale(cdiv(g, y), S(0.5))};
    };
    return n;
}

template <typename S>
Var<S> slice_cols(const Var<S>& a, Eigen::Index start, Eigen::Index count) {
    auto n = detail::make_op<S>(Mat<S>(a->value.middleCols(start, count)), {a});
    n->back_raw = [start, count](Node<S>& self) {
        auto& in = self.inputs[0];
        Mat<S> g = Mat<S>::Zero(in->value.rows(), in->value.cols());
        g.middleCols(start, count) = self.grad;
        detail::accum(in, g);
    };
    n->back_build = [start](const Var<S>& g, Node<S>& self) {
        return std::vector<Var<S>>{pad_cols(g, start, self.inputs[0]->value.cols())};
    };
    return n;
}

// Embeds a block of columns into a wider zero matrix (adjoint of slice_cols).
template <typename S>
Var<S> pad_cols(const Var<S>& a, Eigen::Index start, Eigen::Index total) {
    Mat<S> v = Mat<S>::Zero(a->value.rows(), total);
    v.middleCols(start, a->value.cols()) = a->value;
    auto n = detail::make_op<S>(std::move(v), {a});
    n->back_raw = [start](Node<S>& self) {
        auto& in = self.inputs[0];
        detail::accum(in, Mat<S>(self.grad.middleCols(start, in->value.cols())));
    };
    n->back_build = [start](const Var<S>& g, Node<S>& self) {
        return std::vector<Var<S>>{slice_cols(g, start, self.inputs[0]->value.cols())};
    };
    return n;
}

template <typename S>
Var<S> concat_cols(const std::vector<Var<S>>& parts) {
    if (parts.empty()) throw std::invalid_argument("concat_cols: empty input");
    Eigen::Index rows = parts[0]->value.rows(), cols = 0;
    for (const auto& p : parts) cols += p->value.cols();
    Mat<S> v(rows, cols);
    Eigen::Index off = 0;
    for (const auto& p : parts) {
        v.middleCols(off, p->value.cols()) = p->value;
        off += p->value.cols();
    }
    auto n = detail::make_op<S>(std::move(v), parts);
    n->back_raw = [](Node<S>& self) {
        Eigen::Index off = 0;
        for (auto& in : self.inputs) {
            const Eigen::Index c = in->value.cols();
            if (in->requires_grad) detail::accum(in, Mat<S>(self.grad.middleCols(off, c)));
            off += c;
        }
    };
    n->back_build = [](const Var<S>& g, Node<S>& self) {
        std::vector<Var<S>> gs;
        Eigen::Index off = 0;
        for (auto& in : self.inputs) {
            const Eigen::Index c = in->value.cols();
            gs.push_back(slice_cols(g, off, c));
            off += c;
        }
        return gs;
    };
    return n;
}

// ---------------------------------------------------------------------------
// Backward passes
// ---------------------------------------------------------------------------

namespace detail {

// All nodes reachable from root through differentiable edges, ids descending.
template <typename S>
std::vector<Var<S>> reverse_topo(const Var<S>& root) {
    std::vector<Var<S>> order;
    std::unordered_map<const Node<S>*, bool> seen;
    std::vector<Var<S>> stack{root};
    while (!stack.empty()) {
        Var<S> n = stack.back();
        stack.pop_back();
        if (!n->requires_grad || seen[n.get()]) continue;
        seen[n.get()] = true;
        order.push_back(n);
        for (const auto& in : n->inputs) stack.push_back(in);
    }
    std::sort(order.begin(), order.end(),
              [](const Var<S>& a, const Var<S>& b) { return a->id > b->id; });
    return order;
}

}  // namespace detail

// Raw backward from a scalar (or any) node; gradients land in Node::grad.
template <typename S>
void backward(const Var<S>& loss) {
    auto order = detail::reverse_topo(loss);
    for (auto& n : order) n->grad.resize(0, 0);
    loss->grad = Mat<S>::Ones(loss->value.rows(), loss->value.cols());
    for (auto& n : order) {
        if (n->grad.size() == 0) continue;  // not on a path to the loss
        if (n->back_raw) n->back_raw(*n);
    }
}

// Graph-building backward: returns d(output)/d(wrt[i]) as differentiable
// nodes.  Entries with no path to the output come back as zero constants.
template <typename S>
std::vector<Var<S>> backward_graph(const Var<S>& output, const std::vector<Var<S>>& wrt) {
    auto order = detail::reverse_topo(output);
    std::unordered_map<const Node<S>*, Var<S>> grads;
    grads[output.get()] =
        constant<S>(Mat<S>::Ones(output->value.rows(), output->value.cols()));
    for (auto& n : order) {
        auto it = grads.find(n.get());
        if (it == grads.end()) continue;
        if (!n->back_build) {
            if (!n->inputs.empty())
                throw std::logic_error("backward_graph: op lacks graph backward");
            continue;
        }
        auto input_grads = n->back_build(it->second, *n);
        for (std::size_t i = 0; i < n->inputs.size(); ++i) {
            auto& in = n->inputs[i];
            if (!in->requires_grad) continue;
            auto jt = grads.find(in.get());
            if (jt == grads.end())
                grads[in.get()] = input_grads[i];
            else
                jt->second = add(jt->second, input_grads[i]);
        }
    }
    std::vector<Var<S>> out;
    out.reserve(wrt.size());
    for (const auto& w : wrt) {
        auto it = grads.find(w.get());
        if (it != grads.end())
            out.push_back(it->second);
        else
            out.push_back(constant<S>(Mat<S>::Zero(w->value.rows(), w->value.cols())));
    }
    return out;
}

}  // namespace tsgad::ad
