// Copyright (C) 2026 wsforge authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "wsforge/tensor.hpp"

namespace wsforge {

/// Deterministic random source. Gaussian draws go through Box-Muller on
/// mt19937_64 bits so streams are reproducible independent of the standard
/// library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double normal();

    /// Uniform integer in [0, n), rejection-sampled (no modulo bias).
    std::size_t below(std::size_t n);

    Tensor normal_tensor(std::vector<std::size_t> shape, double stddev = 1.0);
    Tensor uniform_tensor(std::vector<std::size_t> shape, double lo, double hi);

    /// Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[below(i)]);
        }
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace wsforge
