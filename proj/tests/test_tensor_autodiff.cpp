// Copyright (C) 2026 wsforge authors
// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "wsforge/adam.hpp"
#include "wsforge/autodiff.hpp"
#include "wsforge/gradcheck.hpp"
#include "wsforge/rng.hpp"
#include "wsforge/tensor.hpp"

using namespace wsforge;

TEST_CASE("tensor shape and data invariants") {
    Tensor t = Tensor::matrix(2, 3, {1, 2, 3, 4, 5, 6});
    CHECK(t.size() == 6);
    CHECK(t.at(1, 2) == 6);
    CHECK_THROWS_AS(Tensor::matrix(2, 2, {1, 2, 3}), ShapeError);
    CHECK_THROWS_AS(Tensor::zeros({2, 0}), ShapeError);
    CHECK_THROWS_AS(Tensor::zeros({1, 2, 3}), ShapeError);
    CHECK_THROWS_AS(t.reshaped({5}), ShapeError);
    CHECK(t.reshaped({6}).ndim() == 1);
}

TEST_CASE("matmul: identity and hand arithmetic") {
    Tensor m = Tensor::matrix(2, 2, {3, -1, 7, 0.5});
    Tensor i2 = Tensor::identity(2);
    Tensor prod = matmul(i2, m);
    for (std::size_t k = 0; k < 4; ++k) CHECK(prod.at(k) == m.at(k));

    Tensor a = Tensor::matrix(2, 2, {1, 2, 3, 4});
    Tensor b = Tensor::matrix(2, 1, {0, 1});
    Tensor c = matmul(a, b);
    CHECK(c.at(0, 0) == 2);
    CHECK(c.at(1, 0) == 4);

    CHECK_THROWS_AS(matmul(a, Tensor::matrix(3, 1, {1, 2, 3})), ShapeError);
}

TEST_CASE("matmul matches triple-loop oracle") {
    Rng rng(7);
    SUBCASE("4x3 times 3x5") {
        Tensor a = rng.normal_tensor({4, 3});
        Tensor b = rng.normal_tensor({3, 5});
        Tensor got = matmul(a, b);
        Tensor want = oracles::matmul_triple_loop(a, b);
        for (std::size_t k = 0; k < got.size(); ++k) {
            CHECK(std::abs(got.at(k) - want.at(k)) <= 1e-12);
        }
    }
    SUBCASE("all shapes up to 8x8") {
        for (std::size_t m = 1; m <= 8; ++m) {
            for (std::size_t k = 1; k <= 8; ++k) {
                for (std::size_t n = 1; n <= 8; n += 3) {
                    Tensor a = rng.normal_tensor({m, k});
                    Tensor b = rng.normal_tensor({k, n});
                    Tensor got = matmul(a, b);
                    Tensor want = oracles::matmul_triple_loop(a, b);
                    for (std::size_t idx = 0; idx < got.size(); ++idx) {
                        CHECK(std::abs(got.at(idx) - want.at(idx)) <= 1e-12);
                    }
                }
            }
        }
    }
}

TEST_CASE("elementwise forward values") {
    Tape t;
    Var zero = t.leaf(Tensor::zeros({3}));
    CHECK(t.value(exp(zero)).at(1) == 1.0);

    Var x = t.leaf(Tensor::vector({1.0, 2.0}));
    Var r = relu(scale(x, -1.0));
    CHECK(t.value(r).at(0) == 0.0);
    CHECK(t.value(r).at(1) == 0.0);

    Var a = t.leaf(Tensor::vector({1, 2, 3}));
    Var b = t.leaf(Tensor::vector({10, 20, 30}));
    CHECK(t.value(add(a, b)).at(2) == 33);
    CHECK(t.value(sub(b, a)).at(0) == 9);
    CHECK(t.value(mul(a, b)).at(1) == 40);
    CHECK(t.value(add_scalar(a, 0.5)).at(0) == 1.5);
    CHECK_THROWS_AS(add(a, t.leaf(Tensor::vector({1, 2}))), ShapeError);
}

TEST_CASE("backward: sum and squared norm") {
    SUBCASE("sum gives all-ones gradient") {
        Tape t;
        Var x = t.leaf(Tensor::vector({1, 2, 3, 4, 5}));
        Var loss = sum(x);
        t.backward(loss);
        for (std::size_t i = 0; i < 5; ++i) CHECK(t.grad(x).at(i) == 1.0);
    }
    SUBCASE("half squared norm gives x back") {
        Tape t;
        Tensor xv = Tensor::vector({0.5, -2.0, 3.25});
        Var x = t.leaf(xv);
        Var loss = scale(sum(mul(x, x)), 0.5);
        t.backward(loss);
        for (std::size_t i = 0; i < 3; ++i) CHECK(t.grad(x).at(i) == doctest::Approx(xv.at(i)));
    }
}

TEST_CASE("backward: tanh derivative at zero is one") {
    Tape t;
    Var x = t.leaf(Tensor::scalar(0.0));
    Var loss = tanh(x);
    t.backward(loss);
    CHECK(t.grad(x).at(0) == doctest::Approx(1.0));
}

TEST_CASE("backward contract: scalar loss, single call") {
    Tape t;
    Var x = t.leaf(Tensor::vector({1, 2}));
    CHECK_THROWS_AS(t.backward(x), ContractError);
    Var loss = sum(x);
    t.backward(loss);
    CHECK_THROWS_AS(t.backward(loss), ContractError);
    t.reset();
}

TEST_CASE("chain rule: fan-out node receives summed gradient") {
    // loss = sum(x*x) + 3*sum(x); d/dx = 2x + 3, expanded by hand.
    Tape t;
    Tensor xv = Tensor::vector({1.5, -0.25, 4.0});
    Var x = t.leaf(xv);
    Var loss = add(sum(mul(x, x)), scale(sum(x), 3.0));
    t.backward(loss);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(t.grad(x).at(i) == doctest::Approx(2.0 * xv.at(i) + 3.0));
    }
}

TEST_CASE("matmul backward matches finite differences") {
    Rng rng(3);
    Tensor a0 = rng.normal_tensor({2, 3});
    Tensor b0 = rng.normal_tensor({3, 2});
    auto f = [](Tape& t, const std::vector<Var>& in) {
        return sum(tanh(matmul(in[0], in[1])));
    };
    auto report = gradcheck(f, {a0, b0}, 1e-5, 1e-8);
    CHECK(report.passed);
}

TEST_CASE("two-layer MLP gradients match central differences") {
    Rng rng(11);
    Tensor x = rng.normal_tensor({1, 4});
    Tensor w1 = rng.normal_tensor({4, 5}, 0.7);
    Tensor b1 = rng.normal_tensor({1, 5}, 0.1);
    Tensor w2 = rng.normal_tensor({5, 1}, 0.7);
    Tensor b2 = rng.normal_tensor({1, 1}, 0.1);
    auto f = [](Tape& t, const std::vector<Var>& in) {
        Var h = tanh(affine(in[0], in[1], in[2]));
        Var out = affine(h, in[3], in[4]);
        return mean(mul(out, out));
    };
    auto report = gradcheck(f, {x, w1, b1, w2, b2}, 1e-5, 1e-6);
    CHECK(report.passed);
    CHECK(report.max_rel_error <= 1e-6);
}

TEST_CASE("gradcheck: quadratic passes at 1e-8") {
    Rng rng(5);
    Tensor x = rng.normal_tensor({6});
    auto f = [](Tape& t, const std::vector<Var>& in) { return sum(mul(in[0], in[0])); };
    auto report = gradcheck(f, {x}, 1e-5, 1e-8);
    CHECK(report.passed);
}

TEST_CASE("gradcheck: deliberately wrong backward rule fails") {
    Rng rng(9);
    Tensor x = rng.normal_tensor({4});
    auto f = [](Tape& t, const std::vector<Var>& in) {
        Var x = in[0];
        // Forward is x^2 but the rule claims d/dx = 3x (should be 2x).
        const std::uint32_t ix = x.index;
        Tensor v = t.value(x);
        for (double& e : v.data()) e = e * e;
        Var sq = t.make_node(
            std::move(v), {x},
            [ix](Tape& tp, std::uint32_t self) {
                Tensor d = tp.grad_at(self);
                const Tensor& xv = tp.value_at(ix);
                for (std::size_t i = 0; i < d.size(); ++i) d.at(i) *= 3.0 * xv.at(i);
                tp.accumulate(ix, d);
            },
            "bad_square");
        return sum(sq);
    };
    auto report = gradcheck(f, {x}, 1e-5, 1e-5);
    CHECK_FALSE(report.passed);
}

TEST_CASE("gradcheck rejects non-scalar objectives") {
    Tensor x = Tensor::vector({1.0, 2.0});
    auto f = [](Tape&, const std::vector<Var>& in) { return in[0]; };
    CHECK_THROWS_AS(gradcheck(f, {x}), ContractError);
}

TEST_CASE("layernorm and column ops gradcheck") {
    Rng rng(13);
    SUBCASE("layernorm_rows") {
        Tensor x = rng.normal_tensor({3, 6});
        auto f = [](Tape& t, const std::vector<Var>& in) {
            return sum(mul(layernorm_rows(in[0], 1e-5), in[0]));
        };
        CHECK(gradcheck(f, {x}, 1e-5, 1e-6).passed);
    }
    SUBCASE("concat and slice") {
        Tensor a = rng.normal_tensor({2, 3});
        Tensor b = rng.normal_tensor({2, 4});
        auto f = [](Tape& t, const std::vector<Var>& in) {
            Var cat = concat_cols(in[0], in[1]);
            Var left = slice_cols(cat, 1, 4);
            return sum(mul(left, left));
        };
        CHECK(gradcheck(f, {a, b}, 1e-5, 1e-8).passed);
    }
    SUBCASE("low_rank_modulate") {
        const std::size_t n = 3, d_in = 4, d_out = 5, r = 2;
        Tensor h = rng.normal_tensor({n, d_in});
        Tensor a = rng.normal_tensor({n, d_out * r});
        Tensor b = rng.normal_tensor({n, r * d_in});
        auto f = [r](Tape& t, const std::vector<Var>& in) {
            Var out = low_rank_modulate(in[0], in[1], in[2], r);
            return sum(mul(out, out));
        };
        CHECK(gradcheck(f, {h, a, b}, 1e-5, 1e-6).passed);
    }
}

TEST_CASE("low_rank_modulate forward against per-row matrix algebra") {
    Rng rng(21);
    const std::size_t n = 4, d_in = 3, d_out = 6, r = 2;
    Tensor h = rng.normal_tensor({n, d_in});
    Tensor af = rng.normal_tensor({n, d_out * r});
    Tensor bf = rng.normal_tensor({n, r * d_in});
    Tape t;
    Var out = low_rank_modulate(t.leaf(h), t.leaf(af), t.leaf(bf), r);
    for (std::size_t i = 0; i < n; ++i) {
        Tensor ai = af.row_slice(i).reshaped({d_out, r});
        Tensor bi = bf.row_slice(i).reshaped({r, d_in});
        Tensor hi = h.row_slice(i).reshaped({d_in, 1});
        Tensor want = oracles::matmul_triple_loop(ai, oracles::matmul_triple_loop(bi, hi));
        for (std::size_t o = 0; o < d_out; ++o) {
            CHECK(t.value(out).at(i, o) == doctest::Approx(want.at(o, 0)).epsilon(1e-12));
        }
    }
}

TEST_CASE("non-finite values are rejected fast") {
    Tape t;
    Var x = t.leaf(Tensor::vector({710.0}));  // exp overflows binary64
    CHECK_THROWS_AS(exp(x), NumericError);
    Tensor bad = Tensor::vector({1.0});
    bad.at(0) = std::nan("");
    CHECK_THROWS_AS(t.leaf(bad), NumericError);
}

TEST_CASE("adam: zero gradient leaves parameters unchanged") {
    Tensor p = Tensor::vector({1.0, -2.0, 3.0});
    AdamState st({&p});
    std::vector<Tensor*> params{&p};
    adam_step(params, {Tensor::zeros({3})}, st);
    CHECK(p.at(0) == 1.0);
    CHECK(p.at(1) == -2.0);
    CHECK(p.at(2) == 3.0);
    CHECK(st.step_count() == 1);
}

TEST_CASE("adam: first step moves by about -lr*sign(g)") {
    // After bias correction a single step is -lr * g / (|g| + eps).
    Tensor p = Tensor::vector({0.0, 0.0});
    AdamConfig cfg;
    cfg.lr = 0.05;
    AdamState st({&p}, cfg);
    std::vector<Tensor*> params{&p};
    adam_step(params, {Tensor::vector({2.5, -0.3})}, st);
    CHECK(p.at(0) == doctest::Approx(-0.05).epsilon(1e-6));
    CHECK(p.at(1) == doctest::Approx(0.05).epsilon(1e-6));
}

TEST_CASE("adam: deterministic across identical runs") {
    auto run = [] {
        Rng rng(42);
        Tensor p = rng.normal_tensor({4});
        AdamState st({&p});
        std::vector<Tensor*> params{&p};
        for (int i = 0; i < 50; ++i) {
            Tape t;
            Var w = t.leaf(p);
            Var loss = sum(mul(w, w));
            t.backward(loss);
            adam_step(params, {t.grad(w)}, st);
        }
        return p;
    };
    Tensor a = run();
    Tensor b = run();
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.at(i) == b.at(i));
}

TEST_CASE("adam: shape mismatch raises") {
    Tensor p = Tensor::vector({1.0, 2.0});
    AdamState st({&p});
    std::vector<Tensor*> params{&p};
    CHECK_THROWS_AS(adam_step(params, {Tensor::zeros({3})}, st), ShapeError);
}

TEST_CASE("rng: normal moments and determinism") {
    Rng rng(123);
    std::vector<double> xs(20000);
    for (double& x : xs) x = rng.normal();
    auto m = oracles::sample_moments(xs);
    CHECK(std::abs(m.mean) < 0.03);
    CHECK(std::abs(m.variance - 1.0) < 0.05);

    Rng r1(9), r2(9);
    for (int i = 0; i < 100; ++i) CHECK(r1.normal() == r2.normal());
}
