// Copyright (C) 2026 wsforge authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "wsforge/tensor.hpp"

namespace wsforge {

/// Thin SVD: a [m x n] = u [m x k] * diag(s) * v^T with v [n x k],
/// k = min(m, n), singular values descending. Columns of u belonging to
/// (numerically) zero singular values are zeroed rather than completed to an
/// orthonormal basis.
struct SvdResult {
    Tensor u;
    std::vector<double> s;
    Tensor v;
};

/// One-sided Jacobi SVD. Deterministic: the largest-magnitude entry of each
/// left singular vector is made non-negative.
SvdResult jacobi_svd(const Tensor& a);

/// Symmetric eigendecomposition, eigenvalues descending, eigenvectors in
/// columns. Ties are post-ordered lexicographically on the (sign-normalized)
/// eigenvector entries so repeated eigenvalues come out in a fixed order.
struct EighResult {
    std::vector<double> values;
    Tensor vectors;
};

EighResult jacobi_eigh(const Tensor& sym);

}  // namespace wsforge
