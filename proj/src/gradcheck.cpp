// Copyright (C) 2026 wsforge authors
// SPDX-License-Identifier: Apache-2.0
#include "wsforge/gradcheck.hpp"

#include <cmath>

namespace wsforge {

namespace {

double eval_scalar(const ScalarGraphFn& f, const std::vector<Tensor>& inputs) {
    Tape tape;
    std::vector<Var> leaves;
    leaves.reserve(inputs.size());
    for (const Tensor& in : inputs) leaves.push_back(tape.leaf(in));
    Var out = f(tape, leaves);
    const Tensor& v = tape.value(out);
    if (v.size() != 1) throw ContractError("gradcheck: f must be scalar-valued");
    return v.at(0);
}

}  // namespace

GradCheckReport gradcheck(const ScalarGraphFn& f, const std::vector<Tensor>& inputs,
                          double step, double tolerance) {
    if (step <= 0.0) throw ContractError("gradcheck: step must be positive");

    // Analytic gradients in one pass.
    Tape tape;
    std::vector<Var> leaves;
    leaves.reserve(inputs.size());
    for (const Tensor& in : inputs) leaves.push_back(tape.leaf(in));
    Var out = f(tape, leaves);
    if (tape.value(out).size() != 1) throw ContractError("gradcheck: f must be scalar-valued");
    tape.backward(out);

    GradCheckReport report;
    report.tolerance = tolerance;
    report.per_input_max.assign(inputs.size(), 0.0);

    std::vector<Tensor> work = inputs;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        const bool reached = tape.has_grad(leaves[i]);
        for (std::size_t j = 0; j < inputs[i].size(); ++j) {
            const double analytic = reached ? tape.grad(leaves[i]).at(j) : 0.0;
            const double orig = work[i].at(j);
            work[i].at(j) = orig + step;
            const double f_plus = eval_scalar(f, work);
            work[i].at(j) = orig - step;
            const double f_minus = eval_scalar(f, work);
            work[i].at(j) = orig;
            const double numeric = (f_plus - f_minus) / (2.0 * step);
            const double rel = std::abs(analytic - numeric) /
                               std::max({std::abs(analytic), std::abs(numeric), 1.0});
            report.per_input_max[i] = std::max(report.per_input_max[i], rel);
            if (rel > report.max_rel_error) {
                report.max_rel_error = rel;
                report.worst_input = i;
                report.worst_coord = j;
            }
        }
    }
    report.passed = report.max_rel_error <= tolerance;
    return report;
}

}  // namespace wsforge
