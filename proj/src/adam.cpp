// Copyright (C) 2026 wsforge authors
// SPDX-License-Identifier: Apache-2.0
#include "wsforge/adam.hpp"

#include <cmath>

namespace wsforge {

AdamState::AdamState(const std::vector<const Tensor*>& params, AdamConfig cfg) : cfg_(cfg) {
    if (cfg.lr <= 0.0 || cfg.beta1 < 0.0 || cfg.beta1 >= 1.0 || cfg.beta2 < 0.0 ||
        cfg.beta2 >= 1.0 || cfg.epsilon <= 0.0) {
        throw ConfigError("AdamState: invalid optimizer hyperparameters");
    }
    m_.reserve(params.size());
    v_.reserve(params.size());
    for (const Tensor* p : params) {
        m_.push_back(Tensor::zeros(p->shape()));
        v_.push_back(Tensor::zeros(p->shape()));
    }
}

void adam_step(const std::vector<Tensor*>& params, const std::vector<Tensor>& grads,
               AdamState& state) {
    if (params.size() != grads.size() || params.size() != state.m_.size()) {
        throw ShapeError("adam_step: parameter/gradient/state counts disagree");
    }
    state.step_ += 1;
    const AdamConfig& c = state.cfg_;
    const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step_));
    const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step_));
    for (std::size_t p = 0; p < params.size(); ++p) {
        Tensor& w = *params[p];
        const Tensor& g = grads[p];
        require_same_shape(w, g, "adam_step");
        require_same_shape(w, state.m_[p], "adam_step");
        Tensor& m = state.m_[p];
        Tensor& v = state.v_[p];
        for (std::size_t i = 0; i < w.size(); ++i) {
            const double gi = g.at(i);
            m.at(i) = c.beta1 * m.at(i) + (1.0 - c.beta1) * gi;
            v.at(i) = c.beta2 * v.at(i) + (1.0 - c.beta2) * gi * gi;
            const double m_hat = m.at(i) / bc1;
            const double v_hat = v.at(i) / bc2;
            w.at(i) -= c.lr * m_hat / (std::sqrt(v_hat) + c.epsilon);
        }
        require_finite(w, "adam_step");
    }
}

}  // namespace wsforge
