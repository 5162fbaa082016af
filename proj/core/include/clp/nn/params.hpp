// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "clp/nn/model_spec.hpp"

namespace clp::nn {

struct Buffer {
    Shape shape;
    std::vector<float> values;

    bool operator==(const Buffer&) const = default;
};

/// Weight and bias of one layer; both empty for layers without parameters.
/// Dense weights are (in, out) row-major; conv2d weights are (out, in, k, k).
struct LayerParams {
    Buffer weight;
    Buffer bias;

    bool operator==(const LayerParams&) const = default;
};

/// One entry per ModelSpec layer, in the same order.
struct ModelParams {
    std::vector<LayerParams> layers;

    std::size_t parameter_count() const;
    bool all_finite() const;

    bool operator==(const ModelParams&) const = default;
};

/// He-uniform weights, U(-sqrt(6 / fan_in), +sqrt(6 / fan_in)), and zero biases.
/// fan_in is `in` for dense layers and in * k * k for conv2d. Each layer draws
/// from its own stream derived from (seed, layer index).
ModelParams init_params(const ModelSpec& spec, std::uint64_t seed);

/// Same buffer layout as `spec` requires, every entry zero.
ModelParams zeros_for(const ModelSpec& spec);
ModelParams zeros_like(const ModelParams& params);

/// Throws ShapeError if the buffers do not match what `spec` requires.
void check_matches(const ModelParams& params, const ModelSpec& spec);

/// FNV-1a over every value's bit pattern; used to detect stale forward caches.
std::uint64_t digest(const ModelParams& params);

} // namespace clp::nn
