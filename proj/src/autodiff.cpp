// Copyright (C) 2026 wsforge authors
// SPDX-License-Identifier: Apache-2.0
#include "wsforge/autodiff.hpp"

#include <cmath>
#include <string>

namespace wsforge {

namespace {

void require_same_tape(Var a, Var b, const char* op) {
    if (a.tape == nullptr || a.tape != b.tape) {
        throw ContractError(std::string(op) + ": operands must live on the same tape");
    }
}

}  // namespace

Var Tape::push(Node node) {
    nodes_.push_back(std::move(node));
    return Var{static_cast<std::uint32_t>(nodes_.size() - 1), this};
}

void Tape::check(Var v) const {
    if (v.tape != this || v.index >= nodes_.size()) {
        throw ContractError("Var does not belong to this tape");
    }
}

Var Tape::leaf(Tensor value) {
    require_finite(value, "leaf");
    Node n;
    n.value = std::move(value);
    n.requires_grad = true;
    return push(std::move(n));
}

Var Tape::constant(Tensor value) {
    require_finite(value, "constant");
    Node n;
    n.value = std::move(value);
    n.requires_grad = false;
    return push(std::move(n));
}

Var Tape::make_node(Tensor value, std::vector<Var> parents, BackwardFn fn, const char* op) {
    require_finite(value, op);
    Node n;
    n.value = std::move(value);
    for (Var p : parents) {
        check(p);
        n.requires_grad = n.requires_grad || nodes_[p.index].requires_grad;
        n.parents.push_back(p.index);
    }
    n.backward_fn = std::move(fn);
    return push(std::move(n));
}

const Tensor& Tape::value(Var v) const {
    check(v);
    return nodes_[v.index].value;
}

const Tensor& Tape::grad(Var v) const {
    check(v);
    const Node& n = nodes_[v.index];
    if (n.grad.empty()) {
        throw ContractError("no gradient: node not reached by backward()");
    }
    return n.grad;
}

bool Tape::has_grad(Var v) const {
    check(v);
    return !nodes_[v.index].grad.empty();
}

Tensor& Tape::touch(std::uint32_t idx) {
    Node& n = nodes_[idx];
    if (n.grad.empty()) n.grad = Tensor::zeros(n.value.shape());
    return n.grad;
}

void Tape::accumulate(std::uint32_t idx, const Tensor& delta) {
    Tensor& g = touch(idx);
    if (!nodes_[idx].requires_grad) return;
    require_same_shape(g, delta, "accumulate");
    for (std::size_t i = 0; i < g.size(); ++i) g.at(i) += delta.at(i);
}

void Tape::backward(Var loss) {
    check(loss);
    if (backward_done_) {
        throw ContractError("backward() already ran on this tape; reset() first");
    }
    if (nodes_[loss.index].value.size() != 1) {
        throw ContractError("backward() requires a scalar loss (shape [1])");
    }
    backward_done_ = true;
    touch(loss.index).at(0) = 1.0;
    for (std::uint32_t i = loss.index + 1; i-- > 0;) {
        Node& n = nodes_[i];
        if (n.grad.empty()) continue;
        if (n.backward_fn) n.backward_fn(*this, i);
    }
}

void Tape::reset() {
    nodes_.clear();
    backward_done_ = false;
}

// ---------------------------------------------------------------------------
// Ops

Var matmul(Var a, Var b) {
    require_same_tape(a, b, "matmul");
    Tape& t = *a.tape;
    Tensor value = matmul(t.value(a), t.value(b));
    const std::uint32_t ia = a.index, ib = b.index;
    return t.make_node(
        std::move(value), {a, b},
        [ia, ib](Tape& tp, std::uint32_t self) {
            const Tensor& g = tp.grad_at(self);
            if (tp.wants_grad(ia)) {
                tp.accumulate(ia, matmul(g, transpose(tp.value_at(ib))));
            } else {
                tp.touch(ia);
            }
            if (tp.wants_grad(ib)) {
                tp.accumulate(ib, matmul(transpose(tp.value_at(ia)), g));
            } else {
                tp.touch(ib);
            }
        },
        "matmul");
}

namespace {

// Shared implementation for add/sub: sign is +1 or -1 on the b gradient.
Var add_like(Var a, Var b, double sign, const char* name) {
    require_same_tape(a, b, name);
    Tape& t = *a.tape;
    const Tensor& av = t.value(a);
    const Tensor& bv = t.value(b);
    require_same_shape(av, bv, name);
    Tensor value = av;
    for (std::size_t i = 0; i < value.size(); ++i) value.at(i) += sign * bv.at(i);
    const std::uint32_t ia = a.index, ib = b.index;
    return t.make_node(
        std::move(value), {a, b},
        [ia, ib, sign](Tape& tp, std::uint32_t self) {
            const Tensor& g = tp.grad_at(self);
            tp.accumulate(ia, g);
            if (tp.wants_grad(ib)) {
                tp.accumulate(ib, sign > 0 ? g : scale(g, -1.0));
            } else {
                tp.touch(ib);
            }
        },
        name);
}

Var unary_map(Var x, const char* name, double (*fwd)(double),
              double (*dfdx_from)(double x, double y)) {
    Tape& t = *x.tape;
    const Tensor& xv = t.value(x);
    Tensor value = xv;
    for (double& v : value.data()) v = fwd(v);
    const std::uint32_t ix = x.index;
    return t.make_node(
        std::move(value), {x},
        [ix, dfdx_from](Tape& tp, std::uint32_t self) {
            const Tensor& g = tp.grad_at(self);
            if (!tp.wants_grad(ix)) {
                tp.touch(ix);
                return;
            }
            const Tensor& xv = tp.value_at(ix);
            const Tensor& yv = tp.value_at(self);
            Tensor d = g;
            for (std::size_t i = 0; i < d.size(); ++i) {
                d.at(i) *= dfdx_from(xv.at(i), yv.at(i));
            }
            tp.accumulate(ix, d);
        },
        name);
}

}  // namespace

Var add(Var a, Var b) { return add_like(a, b, +1.0, "add"); }
Var sub(Var a, Var b) { return add_like(a, b, -1.0, "sub"); }

Var mul(Var a, Var b) {
    require_same_tape(a, b, "mul");
    Tape& t = *a.tape;
    Tensor value = mul(t.value(a), t.value(b));
    const std::uint32_t ia = a.index, ib = b.index;
    return t.make_node(
        std::move(value), {a, b},
        [ia, ib](Tape& tp, std::uint32_t self) {
            const Tensor& g = tp.grad_at(self);
            if (tp.wants_grad(ia)) {
                tp.accumulate(ia, mul(g, tp.value_at(ib)));
            } else {
                tp.touch(ia);
            }
            if (tp.wants_grad(ib)) {
                tp.accumulate(ib, mul(g, tp.value_at(ia)));
            } else {
                tp.touch(ib);
            }
        },
        "mul");
}

Var scale(Var x, double c) {
    Tape& t = *x.tape;
    Tensor value = scale(t.value(x), c);
    const std::uint32_t ix = x.index;
    return t.make_node(
        std::move(value), {x},
        [ix, c](Tape& tp, std::uint32_t self) {
            tp.accumulate(ix, scale(tp.grad_at(self), c));
        },
        "scale");
}

Var add_scalar(Var x, double c) {
    Tape& t = *x.tape;
    Tensor value = t.value(x);
    for (double& v : value.data()) v += c;
    const std::uint32_t ix = x.index;
    return t.make_node(
        std::move(value), {x},
        [ix](Tape& tp, std::uint32_t self) { tp.accumulate(ix, tp.grad_at(self)); },
        "add_scalar");
}

Var exp(Var x) {
    return unary_map(
        x, "exp", [](double v) { return std::exp(v); },
        [](double, double y) { return y; });
}

Var tanh(Var x) {
    return unary_map(
        x, "tanh", [](double v) { return std::tanh(v); },
        [](double, double y) { return 1.0 - y * y; });
}

Var relu(Var x) {
    return unary_map(
        x, "relu", [](double v) { return v > 0.0 ? v : 0.0; },
        [](double xv, double) { return xv > 0.0 ? 1.0 : 0.0; });
}

Var sum(Var x) {
    Tape& t = *x.tape;
    double s = 0.0;
    for (double v : t.value(x).data()) s += v;
    const std::uint32_t ix = x.index;
    return t.make_node(
        Tensor::scalar(s), {x},
        [ix](Tape& tp, std::uint32_t self) {
            const double g = tp.grad_at(self).at(0);
            if (!tp.wants_grad(ix)) {
                tp.touch(ix);
                return;
            }
            tp.accumulate(ix, Tensor::full(tp.value_at(ix).shape(), g));
        },
        "sum");
}

Var mean(Var x) {
    const std::size_t n = x.tape->value(x).size();
    return scale(sum(x), 1.0 / static_cast<double>(n));
}

Var concat_cols(Var a, Var b) {
    require_same_tape(a, b, "concat_cols");
    Tape& t = *a.tape;
    const Tensor& av = t.value(a);
    const Tensor& bv = t.value(b);
    if (av.ndim() != 2 || bv.ndim() != 2 || av.shape()[0] != bv.shape()[0]) {
        throw ShapeError("concat_cols: row counts must match on 2-D operands");
    }
    const std::size_t rows = av.shape()[0], ca = av.shape()[1], cb = bv.shape()[1];
    Tensor value = Tensor::zeros({rows, ca + cb});
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < ca; ++j) value.at(i, j) = av.at(i, j);
        for (std::size_t j = 0; j < cb; ++j) value.at(i, ca + j) = bv.at(i, j);
    }
    const std::uint32_t ia = a.index, ib = b.index;
    return t.make_node(
        std::move(value), {a, b},
        [ia, ib, rows, ca, cb](Tape& tp, std::uint32_t self) {
            const Tensor& g = tp.grad_at(self);
            Tensor& ga = tp.touch(ia);
            Tensor& gb = tp.touch(ib);
            if (tp.wants_grad(ia)) {
                for (std::size_t i = 0; i < rows; ++i)
                    for (std::size_t j = 0; j < ca; ++j) ga.at(i, j) += g.at(i, j);
            }
            if (tp.wants_grad(ib)) {
                for (std::size_t i = 0; i < rows; ++i)
                    for (std::size_t j = 0; j < cb; ++j) gb.at(i, j) += g.at(i, ca + j);
            }
        },
        "concat_cols");
}

Var slice_cols(Var x, std::size_t start, std::size_t len) {
    Tape& t = *x.tape;
    const Tensor& xv = t.value(x);
    if (xv.ndim() != 2) throw ShapeError("slice_cols requires a 2-D tensor");
    if (len == 0 || start + len > xv.shape()[1]) {
        throw ShapeError("slice_cols: column range out of bounds");
    }
    const std::size_t rows = xv.shape()[0];
    Tensor value = Tensor::zeros({rows, len});
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < len; ++j) value.at(i, j) = xv.at(i, start + j);
    const std::uint32_t ix = x.index;
    return t.make_node(
        std::move(value), {x},
        [ix, start, len, rows](Tape& tp, std::uint32_t self) {
            const Tensor& g = tp.grad_at(self);
            Tensor& gx = tp.touch(ix);
            if (!tp.wants_grad(ix)) return;
            for (std::size_t i = 0; i < rows; ++i)
                for (std::size_t j = 0; j < len; ++j) gx.at(i, start + j) += g.at(i, j);
        },
        "slice_cols");
}

Var layernorm_rows(Var x, double eps) {
    Tape& t = *x.tape;
    const Tensor& xv = t.value(x);
    if (xv.ndim() != 2) throw ShapeError("layernorm_rows requires a 2-D tensor");
    if (eps <= 0.0) throw ContractError("layernorm_rows: eps must be positive");
    const std::size_t rows = xv.shape()[0], cols = xv.shape()[1];
    Tensor value = Tensor::zeros({rows, cols});
    std::vector<double> inv_std(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        double m = 0.0;
        for (std::size_t j = 0; j < cols; ++j) m += xv.at(i, j);
        m /= static_cast<double>(cols);
        double var = 0.0;
        for (std::size_t j = 0; j < cols; ++j) {
            const double d = xv.at(i, j) - m;
            var += d * d;
        }
        var /= static_cast<double>(cols);
        inv_std[i] = 1.0 / std::sqrt(var + eps);
        for (std::size_t j = 0; j < cols; ++j) value.at(i, j) = (xv.at(i, j) - m) * inv_std[i];
    }
    const std::uint32_t ix = x.index;
    return t.make_node(
        std::move(value), {x},
        [ix, rows, cols, inv_std](Tape& tp, std::uint32_t self) {
            const Tensor& g = tp.grad_at(self);
            Tensor& gx = tp.touch(ix);
            if (!tp.wants_grad(ix)) return;
            const Tensor& y = tp.value_at(self);
            const double inv_n = 1.0 / static_cast<double>(cols);
            for (std::size_t i = 0; i < rows; ++i) {
                double g_mean = 0.0, gy_mean = 0.0;
                for (std::size_t j = 0; j < cols; ++j) {
                    g_mean += g.at(i, j);
                    gy_mean += g.at(i, j) * y.at(i, j);
                }
                g_mean *= inv_n;
                gy_mean *= inv_n;
                for (std::size_t j = 0; j < cols; ++j) {
                    gx.at(i, j) +=
                        inv_std[i] * (g.at(i, j) - g_mean - y.at(i, j) * gy_mean);
                }
            }
        },
        "layernorm_rows");
}

Var low_rank_modulate(Var h, Var a_flat, Var b_flat, std::size_t rank) {
    require_same_tape(h, a_flat, "low_rank_modulate");
    require_same_tape(h, b_flat, "low_rank_modulate");
    Tape& t = *h.tape;
    const Tensor& hv = t.value(h);
    const Tensor& av = t.value(a_flat);
    const Tensor& bv = t.value(b_flat);
    if (hv.ndim() != 2 || av.ndim() != 2 || bv.ndim() != 2) {
        throw ShapeError("low_rank_modulate requires 2-D tensors");
    }
    const std::size_t n = hv.shape()[0], d_in = hv.shape()[1];
    if (rank == 0) throw ContractError("low_rank_modulate: rank must be >= 1");
    if (av.shape()[0] != n || bv.shape()[0] != n) {
        throw ShapeError("low_rank_modulate: row counts must match");
    }
    if (bv.shape()[1] != rank * d_in || av.shape()[1] % rank != 0) {
        throw ShapeError("low_rank_modulate: factor widths inconsistent with rank");
    }
    const std::size_t d_out = av.shape()[1] / rank;
    Tensor value = Tensor::zeros({n, d_out});
    std::vector<double> u(n * rank, 0.0);  // cached B_i h_i per row
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < rank; ++k) {
            double s = 0.0;
            for (std::size_t j = 0; j < d_in; ++j) s += bv.at(i, k * d_in + j) * hv.at(i, j);
            u[i * rank + k] = s;
        }
        for (std::size_t o = 0; o < d_out; ++o) {
            double s = 0.0;
            for (std::size_t k = 0; k < rank; ++k) s += av.at(i, o * rank + k) * u[i * rank + k];
            value.at(i, o) = s;
        }
    }
    const std::uint32_t ih = h.index, ia = a_flat.index, ib = b_flat.index;
    return t.make_node(
        std::move(value), {h, a_flat, b_flat},
        [ih, ia, ib, rank, n, d_in, d_out, u](Tape& tp, std::uint32_t self) {
            const Tensor& g = tp.grad_at(self);
            Tensor& gh = tp.touch(ih);
            Tensor& ga = tp.touch(ia);
            Tensor& gb = tp.touch(ib);
            const Tensor& hv = tp.value_at(ih);
            const Tensor& av = tp.value_at(ia);
            const Tensor& bv = tp.value_at(ib);
            const bool wh = tp.wants_grad(ih), wa = tp.wants_grad(ia), wb = tp.wants_grad(ib);
            std::vector<double> du(rank);
            for (std::size_t i = 0; i < n; ++i) {
                // du = A_i^T g_i
                for (std::size_t k = 0; k < rank; ++k) {
                    double s = 0.0;
                    for (std::size_t o = 0; o < d_out; ++o) s += av.at(i, o * rank + k) * g.at(i, o);
                    du[k] = s;
                }
                if (wa) {
                    for (std::size_t o = 0; o < d_out; ++o)
                        for (std::size_t k = 0; k < rank; ++k)
                            ga.at(i, o * rank + k) += g.at(i, o) * u[i * rank + k];
                }
                if (wb) {
                    for (std::size_t k = 0; k < rank; ++k)
                        for (std::size_t j = 0; j < d_in; ++j)
                            gb.at(i, k * d_in + j) += du[k] * hv.at(i, j);
                }
                if (wh) {
                    for (std::size_t j = 0; j < d_in; ++j) {
                        double s = 0.0;
                        for (std::size_t k = 0; k < rank; ++k) s += bv.at(i, k * d_in + j) * du[k];
                        gh.at(i, j) += s;
                    }
                }
            }
        },
        "low_rank_modulate");
}

Var affine(Var x, Var w, Var bias) {
    Tape& t = *x.tape;
    const Tensor& xv = t.value(x);
    const Tensor& bv = t.value(bias);
    if (bv.ndim() != 2 || bv.shape()[0] != 1) {
        throw ShapeError("affine: bias must have shape [1 x out]");
    }
    Var prod = matmul(x, w);
    Var ones = t.constant(Tensor::full({xv.shape()[0], 1}, 1.0));
    return add(prod, matmul(ones, bias));
}

Var mse(Var a, Var b) {
    Var d = sub(a, b);
    return mean(mul(d, d));
}

}  // namespace wsforge
