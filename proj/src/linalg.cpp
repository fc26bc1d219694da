// Copyright (C) 2026 wsforge authors
// SPDX-License-Identifier: Apache-2.0
#include "wsforge/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace wsforge {

namespace {

constexpr int kMaxSvdSweeps = 60;
constexpr int kMaxEighSweeps = 100;

void rotate_columns(Tensor& m, std::size_t p, std::size_t q, double c, double s) {
    const std::size_t rows = m.shape()[0];
    for (std::size_t i = 0; i < rows; ++i) {
        const double mp = m.at(i, p);
        const double mq = m.at(i, q);
        m.at(i, p) = c * mp - s * mq;
        m.at(i, q) = s * mp + c * mq;
    }
}

// Largest-magnitude entry of each u column made non-negative; v follows.
void normalize_signs(Tensor& u, Tensor& v) {
    const std::size_t rows = u.shape()[0], cols = u.shape()[1];
    for (std::size_t j = 0; j < cols; ++j) {
        double best = 0.0;
        std::size_t arg = 0;
        for (std::size_t i = 0; i < rows; ++i) {
            if (std::abs(u.at(i, j)) > best) {
                best = std::abs(u.at(i, j));
                arg = i;
            }
        }
        if (best > 0.0 && u.at(arg, j) < 0.0) {
            for (std::size_t i = 0; i < rows; ++i) u.at(i, j) = -u.at(i, j);
            for (std::size_t i = 0; i < v.shape()[0]; ++i) v.at(i, j) = -v.at(i, j);
        }
    }
}

SvdResult jacobi_svd_tall(const Tensor& a) {
    const std::size_t m = a.shape()[0], n = a.shape()[1];
    Tensor g = a;
    Tensor v = Tensor::identity(n);

    const double tol = 1e-15;
    bool converged = false;
    for (int sweep = 0; sweep < kMaxSvdSweeps && !converged; ++sweep) {
        converged = true;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double alpha = 0.0, beta = 0.0, gamma = 0.0;
                for (std::size_t i = 0; i < m; ++i) {
                    alpha += g.at(i, p) * g.at(i, p);
                    beta += g.at(i, q) * g.at(i, q);
                    gamma += g.at(i, p) * g.at(i, q);
                }
                if (alpha == 0.0 || beta == 0.0) continue;
                if (std::abs(gamma) <= tol * std::sqrt(alpha * beta)) continue;
                converged = false;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t =
                    (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                rotate_columns(g, p, q, c, s);
                rotate_columns(v, p, q, c, s);
            }
        }
    }
    if (!converged) throw NumericError("jacobi_svd: no convergence within sweep limit");

    std::vector<double> s(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < m; ++i) acc += g.at(i, j) * g.at(i, j);
        s[j] = std::sqrt(acc);
    }
    const double s_max = *std::max_element(s.begin(), s.end());
    const double zero_cut = s_max * 1e-14;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&s](std::size_t x, std::size_t y) { return s[x] > s[y]; });

    SvdResult out;
    out.u = Tensor::zeros({m, n});
    out.v = Tensor::zeros({n, n});
    out.s.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t src = order[j];
        for (std::size_t i = 0; i < n; ++i) out.v.at(i, j) = v.at(i, src);
        if (s[src] <= zero_cut) continue;  // zero singular value: u column stays zero
        out.s[j] = s[src];
        const double inv = 1.0 / s[src];
        for (std::size_t i = 0; i < m; ++i) out.u.at(i, j) = g.at(i, src) * inv;
    }
    normalize_signs(out.u, out.v);
    return out;
}

}  // namespace

SvdResult jacobi_svd(const Tensor& a) {
    if (a.ndim() != 2) throw ShapeError("jacobi_svd requires a 2-D tensor");
    require_finite(a, "jacobi_svd");
    if (a.shape()[0] >= a.shape()[1]) return jacobi_svd_tall(a);
    // Wide case: decompose the transpose and swap the singular vector roles.
    SvdResult t = jacobi_svd_tall(transpose(a));
    SvdResult out;
    out.u = std::move(t.v);
    out.v = std::move(t.u);
    out.s = std::move(t.s);
    // Keep the sign convention anchored on the left factor.
    const std::size_t m = out.u.shape()[0], k = out.u.shape()[1];
    for (std::size_t j = 0; j < k; ++j) {
        double best = 0.0;
        std::size_t arg = 0;
        for (std::size_t i = 0; i < m; ++i) {
            if (std::abs(out.u.at(i, j)) > best) {
                best = std::abs(out.u.at(i, j));
                arg = i;
            }
        }
        if (best > 0.0 && out.u.at(arg, j) < 0.0) {
            for (std::size_t i = 0; i < m; ++i) out.u.at(i, j) = -out.u.at(i, j);
            for (std::size_t i = 0; i < out.v.shape()[0]; ++i) out.v.at(i, j) = -out.v.at(i, j);
        }
    }
    return out;
}

EighResult jacobi_eigh(const Tensor& sym) {
    if (sym.ndim() != 2 || sym.shape()[0] != sym.shape()[1]) {
        throw ShapeError("jacobi_eigh requires a square matrix");
    }
    require_finite(sym, "jacobi_eigh");
    const std::size_t n = sym.shape()[0];
    Tensor a = sym;
    Tensor v = Tensor::identity(n);

    double fro = 0.0;
    for (double x : a.data()) fro += x * x;
    fro = std::sqrt(fro);
    const double stop = std::max(fro, 1.0) * 1e-15;

    for (int sweep = 0; sweep < kMaxEighSweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += 2.0 * a.at(p, q) * a.at(p, q);
        if (std::sqrt(off) <= stop) break;
        if (sweep == kMaxEighSweeps - 1) {
            throw NumericError("jacobi_eigh: no convergence within sweep limit");
        }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a.at(p, q);
                if (std::abs(apq) <= stop / static_cast<double>(n)) continue;
                const double tau = (a.at(q, q) - a.at(p, p)) / (2.0 * apq);
                const double t =
                    (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                const double app = a.at(p, p), aqq = a.at(q, q);
                a.at(p, p) = app - t * apq;
                a.at(q, q) = aqq + t * apq;
                a.at(p, q) = 0.0;
                a.at(q, p) = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    if (i == p || i == q) continue;
                    const double aip = a.at(i, p), aiq = a.at(i, q);
                    a.at(i, p) = c * aip - s * aiq;
                    a.at(p, i) = a.at(i, p);
                    a.at(i, q) = s * aip + c * aiq;
                    a.at(q, i) = a.at(i, q);
                }
                rotate_columns(v, p, q, c, s);
            }
        }
    }

    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) values[i] = a.at(i, i);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&values](std::size_t x, std::size_t y) {
        return values[x] > values[y];
    });

    EighResult out;
    out.values.resize(n);
    out.vectors = Tensor::zeros({n, n});
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = values[order[j]];
        for (std::size_t i = 0; i < n; ++i) out.vectors.at(i, j) = v.at(i, order[j]);
    }

    Tensor dummy = Tensor::zeros({1, n});
    normalize_signs(out.vectors, dummy);

    // Deterministic post-order inside (numerically) tied eigenvalue groups.
    const double tie_tol = 1e-12 * std::max(std::abs(out.values[0]), 1.0);
    std::size_t start = 0;
    auto column_less = [&](std::size_t x, std::size_t y) {
        for (std::size_t i = 0; i < n; ++i) {
            const double dx = out.vectors.at(i, x), dy = out.vectors.at(i, y);
            if (dx != dy) return dx < dy;
        }
        return false;
    };
    while (start < n) {
        std::size_t end = start + 1;
        while (end < n && std::abs(out.values[end] - out.values[start]) <= tie_tol) ++end;
        if (end - start > 1) {
            std::vector<std::size_t> idx(end - start);
            std::iota(idx.begin(), idx.end(), start);
            std::sort(idx.begin(), idx.end(), column_less);
            Tensor cols = Tensor::zeros({n, end - start});
            std::vector<double> vals(end - start);
            for (std::size_t j = 0; j < idx.size(); ++j) {
                vals[j] = out.values[idx[j]];
                for (std::size_t i = 0; i < n; ++i) cols.at(i, j) = out.vectors.at(i, idx[j]);
            }
            for (std::size_t j = 0; j < idx.size(); ++j) {
                out.values[start + j] = vals[j];
                for (std::size_t i = 0; i < n; ++i) out.vectors.at(i, start + j) = cols.at(i, j);
            }
        }
        start = end;
    }
    return out;
}

}  // namespace wsforge
