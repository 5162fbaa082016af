// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "clp/nn/model_spec.hpp"

namespace clp::data {

using nn::Shape;

/// Labelled samples stored contiguously, one sample after another, values in [0, 1].
struct Dataset {
    Shape sample_shape;
    std::vector<float> samples;
    std::vector<std::int32_t> labels;
    std::size_t classes = 0;
    std::string provenance;

    std::size_t size() const noexcept { return labels.size(); }
    std::size_t sample_size() const { return nn::shape_size(sample_shape); }

    std::span<const float> sample(std::size_t i) const {
        const std::size_t d = sample_size();
        return std::span<const float>(samples).subspan(i * d, d);
    }

    /// Throws FormatError unless n >= 1, buffers agree and labels lie in [0, classes).
    void validate() const;
};

/// Copies the listed rows (in the given order) into a new dataset.
Dataset subset(const Dataset& source, std::span<const std::size_t> indices, std::string provenance);

/// Deterministic hold-out: permutes indices with `seed`, the first round(fraction * n)
/// go to validation. Returns {train, validation}. fraction must lie in (0, 1).
std::pair<Dataset, Dataset> split_validation(const Dataset& source, double fraction, std::uint64_t seed);

} // namespace clp::data
