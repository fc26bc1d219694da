// Copyright (C) 2026 wsforge authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace wsforge {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Operand dimensions do not line up.
struct ShapeError : Error {
    using Error::Error;
};

// NaN/Inf produced, or an iterative routine failed to converge.
struct NumericError : Error {
    using Error::Error;
};

// API misuse: non-scalar loss, double backward, wrong argument combination.
struct ContractError : Error {
    using Error::Error;
};

// Requested rank exceeds what the matrix admits.
struct RankError : Error {
    using Error::Error;
};

// Flat vector does not match its layout registry.
struct LayoutError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

// Degenerate input data (e.g. zero-variance dataset).
struct DataError : Error {
    using Error::Error;
};

// Training diverged; message carries the step/epoch index.
struct TrainingError : Error {
    using Error::Error;
};

struct SamplingError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace wsforge
