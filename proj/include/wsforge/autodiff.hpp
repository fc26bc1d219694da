// Copyright (C) 2026 wsforge authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "wsforge/tensor.hpp"

namespace wsforge {

class Tape;

/// Handle to a node on a Tape. Cheap to copy; valid until the tape is reset.
struct Var {
    std::uint32_t index = 0;
    Tape* tape = nullptr;
};

/// Reverse-mode tape. Graphs are built per step (define-by-run) and replayed
/// backwards in creation order, which is already topological because an op's
/// parents always precede it.
class Tape {
public:
    using BackwardFn = std::function<void(Tape&, std::uint32_t)>;

    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    /// Tracked input: receives a gradient in backward().
    Var leaf(Tensor value);
    /// Untracked input: reachable gradients are allocated but never computed into.
    Var constant(Tensor value);

    /// Interior node; requires_grad is inherited from parents. Exposed so tests
    /// can wire custom (including deliberately wrong) backward rules.
    Var make_node(Tensor value, std::vector<Var> parents, BackwardFn fn, const char* op);

    const Tensor& value(Var v) const;
    /// Gradient after backward(); throws ContractError if the node was never reached.
    const Tensor& grad(Var v) const;
    bool has_grad(Var v) const;

    /// Seeds d(loss)/d(loss) = 1 and propagates. loss must be scalar (shape [1]).
    /// Calling twice without reset() is a contract violation.
    void backward(Var loss);
    void reset();

    std::size_t node_count() const { return nodes_.size(); }

    // Helpers for backward rules.
    bool wants_grad(std::uint32_t idx) const { return nodes_[idx].requires_grad; }
    const Tensor& value_at(std::uint32_t idx) const { return nodes_[idx].value; }
    const Tensor& grad_at(std::uint32_t idx) const { return nodes_[idx].grad; }
    /// Marks a node reachable, allocating a zero gradient of matching shape.
    Tensor& touch(std::uint32_t idx);
    /// touch + elementwise add (skips the add when the node is untracked).
    void accumulate(std::uint32_t idx, const Tensor& delta);

private:
    struct Node {
        Tensor value;
        Tensor grad;  // lazily allocated; non-empty marks the node reached
        bool requires_grad = false;
        std::vector<std::uint32_t> parents;
        BackwardFn backward_fn;
    };

    Var push(Node node);
    void check(Var v) const;

    std::vector<Node> nodes_;
    bool backward_done_ = false;
};

// Graph ops. Binary elementwise ops require exactly equal shapes; matmul and
// the column ops require 2-D operands.
Var matmul(Var a, Var b);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var x, double c);
Var add_scalar(Var x, double c);
Var exp(Var x);
Var tanh(Var x);
Var relu(Var x);
Var sum(Var x);                 // -> scalar [1]
Var mean(Var x);                // -> scalar [1]
Var concat_cols(Var a, Var b);  // [m x p] ++ [m x q] -> [m x (p+q)]
Var slice_cols(Var x, std::size_t start, std::size_t len);
/// Per-row mean/variance normalization over the feature axis.
Var layernorm_rows(Var x, double eps);
/// Per-row low-rank transform: row i of the result is A_i (B_i h_i) where
/// A_i = reshape(a_flat_i, d_out x r) and B_i = reshape(b_flat_i, r x d_in).
Var low_rank_modulate(Var h, Var a_flat, Var b_flat, std::size_t rank);

/// x:[n x in] * w:[in x out] + bias:[1 x out] broadcast over rows (bias is
/// tiled through a constant ones column so no broadcasting rule is needed).
Var affine(Var x, Var w, Var bias);
/// mean((a-b)^2) over all entries -> scalar.
Var mse(Var a, Var b);

}  // namespace wsforge
