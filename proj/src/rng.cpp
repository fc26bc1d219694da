// Copyright (C) 2026 wsforge authors
// SPDX-License-Identifier: Apache-2.0
#include "wsforge/rng.hpp"

#include <cmath>
#include <numbers>

namespace wsforge {

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

std::size_t Rng::below(std::size_t n) {
    if (n == 0) throw ContractError("Rng::below: n must be positive");
    const std::uint64_t bound = n;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
        x = next_u64();
    } while (x >= limit);
    return static_cast<std::size_t>(x % bound);
}

Tensor Rng::normal_tensor(std::vector<std::size_t> shape, double stddev) {
    Tensor t = Tensor::zeros(std::move(shape));
    for (double& x : t.data()) x = stddev * normal();
    return t;
}

Tensor Rng::uniform_tensor(std::vector<std::size_t> shape, double lo, double hi) {
    Tensor t = Tensor::zeros(std::move(shape));
    for (double& x : t.data()) x = lo + (hi - lo) * uniform();
    return t;
}

}  // namespace wsforge
