// Copyright (C) 2026 wsforge authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wsforge/tensor.hpp"

namespace wsforge {

struct LayerShape {
    std::string name;
    std::size_t d_out = 0;
    std::size_t d_in = 0;
    std::size_t rank = 0;

    std::size_t flat_length() const { return d_out * rank + rank * d_in; }
    void validate() const;
    bool operator==(const LayerShape&) const = default;
};

/// One adapted layer: delta = A * B with A [d_out x rank], B [rank x d_in].
struct LoraLayer {
    LayerShape shape;
    Tensor a;
    Tensor b;

    void validate() const;
};

struct LoraAdapter {
    std::string id;
    std::vector<LoraLayer> layers;  // canonical order: sorted by unique name
    std::optional<Tensor> condition;

    /// Sorts layers into canonical order and validates.
    static LoraAdapter make(std::string id, std::vector<LoraLayer> layers,
                            std::optional<Tensor> condition = std::nullopt);
    void validate() const;
    std::vector<LayerShape> layer_shapes() const;
};

struct LayoutEntry {
    std::string layer;
    char factor = 'A';  // 'A' or 'B'
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t offset = 0;
    std::size_t length = 0;

    bool operator==(const LayoutEntry&) const = default;
};

/// Index map from a flat weight vector back to named layer factors. Entries
/// are contiguous and exhaustive over [0, total_length).
class LayoutRegistry {
public:
    static LayoutRegistry from_shapes(std::vector<LayerShape> shapes);

    const std::vector<LayerShape>& shapes() const { return shapes_; }
    const std::vector<LayoutEntry>& entries() const { return entries_; }
    std::size_t total_length() const { return total_; }

    bool operator==(const LayoutRegistry& other) const {
        return entries_ == other.entries_;
    }

private:
    std::vector<LayerShape> shapes_;
    std::vector<LayoutEntry> entries_;
    std::size_t total_ = 0;
};

struct FlatLora {
    std::string id;
    Tensor values;  // 1-D, length registry->total_length()
    std::shared_ptr<const LayoutRegistry> registry;
    std::optional<Tensor> condition;
};

/// Fused delta matrix A * B, shape [d_out x d_in].
Tensor fuse(const LoraLayer& layer);

/// Rank-r SVD refactorization: A_hat = U_r sqrt(S_r), B_hat = sqrt(S_r) V_r^T,
/// so A_hat * B_hat is the best rank-r approximation and column i of A_hat
/// carries the same norm sqrt(s_i) as row i of B_hat.
LoraLayer svd_reparam(const Tensor& w_hat, std::size_t rank, const std::string& name = "layer");

/// fuse + svd_reparam per layer, preserving each layer's own rank.
LoraAdapter reparameterize_adapter(const LoraAdapter& adapter);

FlatLora flatten(const LoraAdapter& adapter);
/// Flatten against an existing registry (shared across a dataset).
FlatLora flatten_with(const LoraAdapter& adapter, std::shared_ptr<const LayoutRegistry> registry);
LoraAdapter unflatten(const FlatLora& flat);
/// Value-level unflatten for dataset rows.
LoraAdapter unflatten_values(const Tensor& values, const LayoutRegistry& registry,
                             std::string id = {});

}  // namespace wsforge
