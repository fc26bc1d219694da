// Copyright (C) 2026 wsforge authors
// SPDX-License-Identifier: Apache-2.0
//
// Test-only oracles, kept independent of the library's compute paths.
#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "wsforge/tensor.hpp"

namespace oracles {

/// Brute-force triple-loop matrix product.
inline wsforge::Tensor matmul_triple_loop(const wsforge::Tensor& a, const wsforge::Tensor& b) {
    const std::size_t m = a.shape()[0], k = a.shape()[1], n = b.shape()[1];
    wsforge::Tensor out = wsforge::Tensor::zeros({m, n});
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t l = 0; l < k; ++l) s += a.at(i, l) * b.at(l, j);
            out.at(i, j) = s;
        }
    }
    return out;
}

/// Central finite difference of a scalar function of a flat coordinate vector.
template <typename Fn>
std::vector<double> central_difference(Fn&& f, std::vector<double> x, double h) {
    std::vector<double> grad(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double orig = x[i];
        x[i] = orig + h;
        const double fp = f(x);
        x[i] = orig - h;
        const double fm = f(x);
        x[i] = orig;
        grad[i] = (fp - fm) / (2.0 * h);
    }
    return grad;
}

struct Moments {
    double mean = 0.0;
    double variance = 0.0;  // unbiased
};

inline Moments sample_moments(const std::vector<double>& xs) {
    Moments m;
    for (double x : xs) m.mean += x;
    m.mean /= static_cast<double>(xs.size());
    for (double x : xs) m.variance += (x - m.mean) * (x - m.mean);
    m.variance /= static_cast<double>(xs.size() - 1);
    return m;
}

}  // namespace oracles
