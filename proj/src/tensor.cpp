// Copyright (C) 2026 wsforge authors
// SPDX-License-Identifier: Apache-2.0
#include "wsforge/tensor.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace wsforge {

namespace {

std::size_t shape_product(const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (std::size_t d : shape) n *= d;
    return n;
}

void check_shape(const std::vector<std::size_t>& shape) {
    if (shape.empty() || shape.size() > 2) {
        throw ShapeError("tensor shape must have 1 or 2 dimensions");
    }
    for (std::size_t d : shape) {
        if (d == 0) throw ShapeError("tensor dimensions must be >= 1");
    }
}

}  // namespace

Tensor Tensor::zeros(std::vector<std::size_t> shape) {
    check_shape(shape);
    Tensor t;
    t.shape_ = std::move(shape);
    t.data_.assign(shape_product(t.shape_), 0.0);
    return t;
}

Tensor Tensor::full(std::vector<std::size_t> shape, double value) {
    Tensor t = zeros(std::move(shape));
    for (double& x : t.data_) x = value;
    return t;
}

Tensor Tensor::scalar(double value) {
    Tensor t;
    t.shape_ = {1};
    t.data_ = {value};
    return t;
}

Tensor Tensor::vector(std::vector<double> values) {
    if (values.empty()) throw ShapeError("vector tensor must be non-empty");
    Tensor t;
    t.shape_ = {values.size()};
    t.data_ = std::move(values);
    return t;
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, std::vector<double> values) {
    if (rows == 0 || cols == 0) throw ShapeError("matrix dimensions must be >= 1");
    if (values.size() != rows * cols) {
        throw ShapeError("matrix data length does not match rows*cols");
    }
    Tensor t;
    t.shape_ = {rows, cols};
    t.data_ = std::move(values);
    return t;
}

Tensor Tensor::identity(std::size_t n) {
    Tensor t = zeros({n, n});
    for (std::size_t i = 0; i < n; ++i) t.at(i, i) = 1.0;
    return t;
}

bool Tensor::all_finite() const {
    for (double x : data_) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

Tensor Tensor::reshaped(std::vector<std::size_t> shape) const {
    check_shape(shape);
    if (shape_product(shape) != data_.size()) {
        throw ShapeError("reshape changes element count");
    }
    Tensor t;
    t.shape_ = std::move(shape);
    t.data_ = data_;
    return t;
}

Tensor Tensor::row_slice(std::size_t row) const {
    if (ndim() != 2) throw ShapeError("row_slice requires a 2-D tensor");
    if (row >= shape_[0]) throw ShapeError("row_slice index out of range");
    Tensor t;
    t.shape_ = {shape_[1]};
    t.data_.assign(data_.begin() + static_cast<std::ptrdiff_t>(row * shape_[1]),
                   data_.begin() + static_cast<std::ptrdiff_t>((row + 1) * shape_[1]));
    return t;
}

std::string Tensor::shape_str() const {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < shape_.size(); ++i) {
        if (i) os << "x";
        os << shape_[i];
    }
    os << "]";
    return os.str();
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (!a.same_shape(b)) {
        throw ShapeError(std::string(op) + ": shape mismatch " + a.shape_str() + " vs " +
                         b.shape_str());
    }
}

void require_finite(const Tensor& t, const char* op) {
    if (!t.all_finite()) {
        throw NumericError(std::string(op) + ": non-finite value produced");
    }
}

Tensor add(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "add");
    Tensor out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out.at(i) += b.at(i);
    return out;
}

Tensor sub(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "sub");
    Tensor out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out.at(i) -= b.at(i);
    return out;
}

Tensor mul(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "mul");
    Tensor out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out.at(i) *= b.at(i);
    return out;
}

Tensor scale(const Tensor& a, double c) {
    Tensor out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out.at(i) *= c;
    return out;
}

Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.ndim() != 2 || b.ndim() != 2) throw ShapeError("matmul requires 2-D tensors");
    if (a.shape()[1] != b.shape()[0]) {
        throw ShapeError("matmul: inner dimensions disagree " + a.shape_str() + " vs " +
                         b.shape_str());
    }
    const std::size_t m = a.shape()[0], k = a.shape()[1], n = b.shape()[1];
    Tensor out = Tensor::zeros({m, n});
    const double* pa = a.data().data();
    const double* pb = b.data().data();
    double* po = out.data().data();
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t l = 0; l < k; ++l) {
            const double av = pa[i * k + l];
            if (av == 0.0) continue;
            const double* brow = pb + l * n;
            double* orow = po + i * n;
            for (std::size_t j = 0; j < n; ++j) orow[j] += av * brow[j];
        }
    }
    return out;
}

Tensor transpose(const Tensor& a) {
    if (a.ndim() != 2) throw ShapeError("transpose requires a 2-D tensor");
    const std::size_t m = a.shape()[0], n = a.shape()[1];
    Tensor out = Tensor::zeros({n, m});
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) out.at(j, i) = a.at(i, j);
    return out;
}

double dot(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "dot");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a.at(i) * b.at(i);
    return s;
}

double norm2(const Tensor& a) {
    return std::sqrt(dot(a, a));
}

double max_abs(const Tensor& a) {
    double m = 0.0;
    for (double x : a.data()) m = std::max(m, std::abs(x));
    return m;
}

double frobenius_distance(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "frobenius_distance");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a.at(i) - b.at(i);
        s += d * d;
    }
    return std::sqrt(s);
}

}  // namespace wsforge
