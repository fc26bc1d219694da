// Copyright (C) 2026 wsforge authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include "wsforge/tensor.hpp"

namespace wsforge {

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// Per-parameter first/second moment buffers plus the shared step count.
class AdamState {
public:
    AdamState(const std::vector<const Tensor*>& params, AdamConfig cfg = {});

    const AdamConfig& config() const { return cfg_; }
    std::size_t step_count() const { return step_; }
    const Tensor& first_moment(std::size_t i) const { return m_[i]; }
    const Tensor& second_moment(std::size_t i) const { return v_[i]; }

private:
    friend void adam_step(const std::vector<Tensor*>&, const std::vector<Tensor>&, AdamState&);

    AdamConfig cfg_;
    std::size_t step_ = 0;
    std::vector<Tensor> m_;
    std::vector<Tensor> v_;
};

/// One bias-corrected Adam update, in place. Deterministic given inputs.
void adam_step(const std::vector<Tensor*>& params, const std::vector<Tensor>& grads,
               AdamState& state);

}  // namespace wsforge
