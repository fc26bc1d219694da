// Copyright (C) 2026 wsforge authors
// SPDX-License-Identifier: Apache-2.0
#include "wsforge/lora.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "wsforge/linalg.hpp"

namespace wsforge {

void LayerShape::validate() const {
    if (name.empty()) throw ShapeError("layer name must be non-empty");
    if (d_out == 0 || d_in == 0) throw ShapeError("layer dimensions must be >= 1");
    if (rank == 0 || rank > std::min(d_out, d_in)) {
        throw RankError("layer '" + name + "': rank must satisfy 1 <= rank <= min(d_out, d_in)");
    }
}

void LoraLayer::validate() const {
    shape.validate();
    if (a.ndim() != 2 || a.shape()[0] != shape.d_out || a.shape()[1] != shape.rank) {
        throw ShapeError("layer '" + shape.name + "': A must be [d_out x rank]");
    }
    if (b.ndim() != 2 || b.shape()[0] != shape.rank || b.shape()[1] != shape.d_in) {
        throw ShapeError("layer '" + shape.name + "': B must be [rank x d_in]");
    }
    require_finite(a, "LoraLayer A");
    require_finite(b, "LoraLayer B");
}

LoraAdapter LoraAdapter::make(std::string id, std::vector<LoraLayer> layers,
                              std::optional<Tensor> condition) {
    std::sort(layers.begin(), layers.end(),
              [](const LoraLayer& x, const LoraLayer& y) { return x.shape.name < y.shape.name; });
    LoraAdapter adapter{std::move(id), std::move(layers), std::move(condition)};
    adapter.validate();
    return adapter;
}

void LoraAdapter::validate() const {
    if (layers.empty()) throw ShapeError("adapter must have at least one layer");
    std::set<std::string> names;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        layers[i].validate();
        if (!names.insert(layers[i].shape.name).second) {
            throw ShapeError("duplicate layer name '" + layers[i].shape.name + "'");
        }
        if (i > 0 && !(layers[i - 1].shape.name < layers[i].shape.name)) {
            throw ShapeError("adapter layers must be in canonical (name-sorted) order");
        }
    }
    if (condition && condition->ndim() != 1) {
        throw ShapeError("adapter condition must be a 1-D vector");
    }
}

std::vector<LayerShape> LoraAdapter::layer_shapes() const {
    std::vector<LayerShape> shapes;
    shapes.reserve(layers.size());
    for (const LoraLayer& l : layers) shapes.push_back(l.shape);
    return shapes;
}

LayoutRegistry LayoutRegistry::from_shapes(std::vector<LayerShape> shapes) {
    if (shapes.empty()) throw LayoutError("registry needs at least one layer shape");
    std::sort(shapes.begin(), shapes.end(),
              [](const LayerShape& x, const LayerShape& y) { return x.name < y.name; });
    LayoutRegistry reg;
    std::size_t offset = 0;
    for (const LayerShape& s : shapes) {
        s.validate();
        if (!reg.shapes_.empty() && reg.shapes_.back().name == s.name) {
            throw LayoutError("duplicate layer name '" + s.name + "' in registry");
        }
        reg.entries_.push_back({s.name, 'A', s.d_out, s.rank, offset, s.d_out * s.rank});
        offset += s.d_out * s.rank;
        reg.entries_.push_back({s.name, 'B', s.rank, s.d_in, offset, s.rank * s.d_in});
        offset += s.rank * s.d_in;
        reg.shapes_.push_back(s);
    }
    reg.total_ = offset;
    return reg;
}

Tensor fuse(const LoraLayer& layer) {
    layer.validate();
    return matmul(layer.a, layer.b);
}

LoraLayer svd_reparam(const Tensor& w_hat, std::size_t rank, const std::string& name) {
    if (w_hat.ndim() != 2) throw ShapeError("svd_reparam expects a 2-D matrix");
    const std::size_t d_out = w_hat.shape()[0], d_in = w_hat.shape()[1];
    if (rank == 0 || rank > std::min(d_out, d_in)) {
        throw RankError("svd_reparam: rank exceeds matrix dimensions");
    }
    require_finite(w_hat, "svd_reparam");
    SvdResult svd = jacobi_svd(w_hat);
    LoraLayer out;
    out.shape = LayerShape{name, d_out, d_in, rank};
    out.a = Tensor::zeros({d_out, rank});
    out.b = Tensor::zeros({rank, d_in});
    for (std::size_t j = 0; j < rank; ++j) {
        const double root = std::sqrt(svd.s[j]);
        for (std::size_t i = 0; i < d_out; ++i) out.a.at(i, j) = svd.u.at(i, j) * root;
        for (std::size_t i = 0; i < d_in; ++i) out.b.at(j, i) = root * svd.v.at(i, j);
    }
    return out;
}

LoraAdapter reparameterize_adapter(const LoraAdapter& adapter) {
    adapter.validate();
    LoraAdapter out;
    out.id = adapter.id;
    out.condition = adapter.condition;
    out.layers.reserve(adapter.layers.size());
    for (const LoraLayer& layer : adapter.layers) {
        out.layers.push_back(svd_reparam(fuse(layer), layer.shape.rank, layer.shape.name));
    }
    return out;
}

FlatLora flatten(const LoraAdapter& adapter) {
    auto registry = std::make_shared<LayoutRegistry>(
        LayoutRegistry::from_shapes(adapter.layer_shapes()));
    return flatten_with(adapter, std::move(registry));
}

FlatLora flatten_with(const LoraAdapter& adapter,
                      std::shared_ptr<const LayoutRegistry> registry) {
    adapter.validate();
    if (!registry) throw LayoutError("flatten_with: null registry");
    if (adapter.layer_shapes() != registry->shapes()) {
        throw LayoutError("flatten_with: adapter layout differs from registry");
    }
    Tensor values = Tensor::zeros({registry->total_length()});
    std::size_t layer_idx = 0;
    for (const LayoutEntry& e : registry->entries()) {
        const LoraLayer& layer = adapter.layers[layer_idx];
        const Tensor& src = (e.factor == 'A') ? layer.a : layer.b;
        for (std::size_t i = 0; i < e.length; ++i) values.at(e.offset + i) = src.at(i);
        if (e.factor == 'B') ++layer_idx;
    }
    return FlatLora{adapter.id, std::move(values), std::move(registry), adapter.condition};
}

LoraAdapter unflatten(const FlatLora& flat) {
    if (!flat.registry) throw LayoutError("unflatten: null registry");
    LoraAdapter adapter = unflatten_values(flat.values, *flat.registry, flat.id);
    adapter.condition = flat.condition;
    return adapter;
}

LoraAdapter unflatten_values(const Tensor& values, const LayoutRegistry& registry,
                             std::string id) {
    if (values.ndim() != 1 || values.size() != registry.total_length()) {
        throw LayoutError("unflatten: flat vector length does not match registry");
    }
    LoraAdapter adapter;
    adapter.id = std::move(id);
    const auto& entries = registry.entries();
    for (std::size_t e = 0; e + 1 < entries.size(); e += 2) {
        const LayoutEntry& ea = entries[e];
        const LayoutEntry& eb = entries[e + 1];
        LoraLayer layer;
        layer.shape = LayerShape{ea.layer, ea.rows, eb.cols, ea.cols};
        layer.a = Tensor::zeros({ea.rows, ea.cols});
        layer.b = Tensor::zeros({eb.rows, eb.cols});
        for (std::size_t i = 0; i < ea.length; ++i) layer.a.at(i) = values.at(ea.offset + i);
        for (std::size_t i = 0; i < eb.length; ++i) layer.b.at(i) = values.at(eb.offset + i);
        adapter.layers.push_back(std::move(layer));
    }
    adapter.validate();
    return adapter;
}

}  // namespace wsforge
