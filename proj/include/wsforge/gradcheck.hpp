// Copyright (C) 2026 wsforge authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <vector>

#include "wsforge/autodiff.hpp"

namespace wsforge {

struct GradCheckReport {
    bool passed = false;
    double tolerance = 0.0;
    double max_rel_error = 0.0;
    std::size_t worst_input = 0;
    std::size_t worst_coord = 0;
    std::vector<double> per_input_max;  // one entry per checked input
};

/// Builds a scalar graph from leaf inputs; called repeatedly on fresh tapes.
using ScalarGraphFn = std::function<Var(Tape&, const std::vector<Var>&)>;

/// Compares analytic gradients against central finite differences. The
/// relative error for a coordinate is |a - n| / max(|a|, |n|, 1); inputs the
/// graph never reaches count as zero analytic gradient.
GradCheckReport gradcheck(const ScalarGraphFn& f, const std::vector<Tensor>& inputs,
                          double step = 1e-5, double tolerance = 1e-5);

}  // namespace wsforge
