#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "nae/errors.hpp"
#include "nae/nn/tensor.hpp"

namespace nae {

/// Reverse-mode tape. Operations append nodes in topological order; backward
/// walks them in reverse, so each node's closure runs after every consumer
/// has deposited its gradient contribution.
///
/// Gradient buffers are allocated lazily: a node that never receives a
/// contribution keeps an empty buffer, and its closure is skipped. Leaves
/// created with needs_grad == false propagate that flag, so inference-only
/// graphs record no closures at all.
template <typename T>
class Tape {
public:
    struct Var {
        int idx = -1;
        bool valid() const noexcept { return idx >= 0; }
    };

    Var leaf(Tensor4T<T> value, bool needs_grad) {
        nodes_.push_back(Node{std::move(value), {}, nullptr, needs_grad});
        return Var{static_cast<int>(nodes_.size()) - 1};
    }

    const Tensor4T<T>& value(Var v) const { return node(v).value; }

    bool needs_grad(Var v) const { return node(v).needs_grad; }

    /// Gradient of the loss w.r.t. this node. Empty shape means no gradient
    /// flowed here (or backward has not run).
    const Tensor4T<T>& grad(Var v) const { return node(v).grad; }

    /// Accumulation buffer, allocated on first touch.
    Tensor4T<T>& grad_buffer(Var v) {
        Node& nd = node(v);
        if (nd.grad.empty()) {
            nd.grad = Tensor4T<T>(nd.value.n, nd.value.c, nd.value.h, nd.value.w);
        }
        return nd.grad;
    }

    /// Records an op: the closure pulls the node's own gradient (`self`)
    /// into the gradient buffers of the op's inputs.
    Var record(Tensor4T<T> value, bool needs_grad, std::function<void(Tape&, Var)> back) {
        nodes_.push_back(Node{std::move(value), {}, needs_grad ? std::move(back) : nullptr,
                              needs_grad});
        return Var{static_cast<int>(nodes_.size()) - 1};
    }

    /// Seeds the (scalar) loss gradient and runs every recorded closure in
    /// reverse order. `seed` scales all gradients, which lets a caller
    /// average over a batch by seeding 1/B per member.
    void backward(Var loss, T seed = T(1)) {
        if (nodes_.empty() || !loss.valid()) {
            throw UsageError("backward requires a recorded forward pass");
        }
        const Node& ln = node(loss);
        if (ln.value.size() != 1) throw UsageError("backward requires a scalar loss");
        if (!ln.needs_grad) {
            throw UsageError("loss does not depend on any differentiable leaf");
        }
        grad_buffer(loss).data[0] += seed;
        for (int i = loss.idx; i >= 0; --i) {
            Node& nd = nodes_[i];
            if (nd.back && !nd.grad.empty()) nd.back(*this, Var{i});
        }
    }

    size_t size() const noexcept { return nodes_.size(); }

private:
    struct Node {
        Tensor4T<T> value;
        Tensor4T<T> grad;
        std::function<void(Tape&, Var)> back;
        bool needs_grad = false;
    };

    Node& node(Var v) {
        if (!v.valid() || v.idx >= static_cast<int>(nodes_.size())) {
            throw UsageError("invalid tape variable");
        }
        return nodes_[v.idx];
    }
    const Node& node(Var v) const {
        if (!v.valid() || v.idx >= static_cast<int>(nodes_.size())) {
            throw UsageError("invalid tape variable");
        }
        return nodes_[v.idx];
    }

    std::vector<Node> nodes_;
};

}  // namespace nae
