// SPDX-License-Identifier: Apache-2.0
#include "clp/nn/params.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "clp/error.hpp"
#include "clp/rng.hpp"

namespace clp::nn {

std::size_t ModelParams::parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.weight.values.size() + l.bias.values.size();
    return n;
}

bool ModelParams::all_finite() const {
    for (const auto& l : layers) {
        for (float v : l.weight.values)
            if (!std::isfinite(v)) return false;
        for (float v : l.bias.values)
            if (!std::isfinite(v)) return false;
    }
    return true;
}

namespace {

std::pair<Shape, Shape> buffer_shapes(const LayerSpec& layer) {
    switch (layer.kind) {
    case LayerKind::dense: return {{layer.in, layer.out}, {layer.out}};
    case LayerKind::conv2d: return {{layer.out, layer.in, layer.kernel, layer.kernel}, {layer.out}};
    default: return {{}, {}};
    }
}

Buffer zero_buffer(Shape shape) {
    Buffer b;
    b.values.assign(shape_size(shape), 0.0f);
    b.shape = std::move(shape);
    return b;
}

} // namespace

ModelParams zeros_for(const ModelSpec& spec) {
    spec.validate();
    ModelParams params;
    params.layers.reserve(spec.layers.size());
    for (const auto& layer : spec.layers) {
        auto [w, b] = buffer_shapes(layer);
        params.layers.push_back({zero_buffer(std::move(w)), zero_buffer(std::move(b))});
    }
    return params;
}

ModelParams zeros_like(const ModelParams& params) {
    ModelParams out;
    out.layers.reserve(params.layers.size());
    for (const auto& l : params.layers) out.layers.push_back({zero_buffer(l.weight.shape), zero_buffer(l.bias.shape)});
    return out;
}

ModelParams init_params(const ModelSpec& spec, std::uint64_t seed) {
    ModelParams params = zeros_for(spec);
    for (std::size_t l = 0; l < spec.layers.size(); ++l) {
        const LayerSpec& layer = spec.layers[l];
        if (!layer.trainable()) continue;
        const std::size_t fan_in = layer.kind == LayerKind::dense ? layer.in : layer.in * layer.kernel * layer.kernel;
        const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
        auto engine = rng::make_engine(rng::derive(seed, {0x1417, l}));
        for (float& w : params.layers[l].weight.values) w = static_cast<float>(rng::uniform(engine, -limit, limit));
    }
    return params;
}

void check_matches(const ModelParams& params, const ModelSpec& spec) {
    if (params.layers.size() != spec.layers.size())
        throw ShapeError("parameter set has " + std::to_string(params.layers.size()) + " layers, model has " +
                         std::to_string(spec.layers.size()));
    for (std::size_t l = 0; l < spec.layers.size(); ++l) {
        auto [w, b] = buffer_shapes(spec.layers[l]);
        const auto& p = params.layers[l];
        if (p.weight.shape != w || p.bias.shape != b || p.weight.values.size() != shape_size(w) ||
            p.bias.values.size() != shape_size(b))
            throw ShapeError("parameter buffers of layer " + std::to_string(l) + " do not match the model");
    }
}

std::uint64_t digest(const ModelParams& params) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&h](const std::vector<float>& values) {
        for (float v : values) {
            h ^= std::bit_cast<std::uint32_t>(v);
            h *= 0x100000001b3ULL;
        }
        h ^= values.size();
        h *= 0x100000001b3ULL;
    };
    for (const auto& l : params.layers) {
        feed(l.weight.values);
        feed(l.bias.values);
    }
    return h;
}

} // namespace clp::nn
