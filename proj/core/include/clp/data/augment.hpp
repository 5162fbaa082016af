// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "clp/data/dataset.hpp"

namespace clp::data {

/// Limits on transform magnitudes.
inline constexpr double kMaxRotationDegrees = 15.0;
inline constexpr double kMaxTranslationFraction = 0.125;
inline constexpr double kMaxCropPadding = 4.0; // pixels at 32x32; scaled by side / 32

/// The basic stochastic transform family. Each transform fires independently
/// with its probability; applied in the order flip, crop, rotation, translation.
struct AugmentPolicy {
    double flip_p = 0.5;
    double crop_p = 0.5;
    double crop_padding = 4.0;     // 32x32-equivalent pixels
    double rotation_p = 0.5;
    double rotation_degrees = 15.0; // uniform in [-deg, +deg]
    double translation_p = 0.5;
    double translation_fraction = 0.125; // of the side, each axis

    /// Throws SpecError when a probability leaves [0, 1] or a magnitude exceeds its limit.
    void validate() const;

    static AugmentPolicy none() { return {0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0}; }
    static AugmentPolicy basic() { return {}; }

    bool operator==(const AugmentPolicy&) const = default;
};

/// Transforms one sample. Image shapes (H, W) and (C, H, W) are supported;
/// flat samples pass through unchanged. Resampling is nearest-neighbour and
/// uncovered pixels are filled with 0, so values stay in the input range.
std::vector<float> augment_sample(std::span<const float> sample, const Shape& shape, const AugmentPolicy& policy,
                                  std::uint64_t seed);

/// Mirrors every channel left to right.
std::vector<float> horizontal_flip(std::span<const float> sample, const Shape& shape);

/// Shifts every channel by (dy, dx) pixels, filling with 0.
std::vector<float> translate(std::span<const float> sample, const Shape& shape, int dy, int dx);

/// Rotates every channel about the image centre, nearest-neighbour, fill 0.
std::vector<float> rotate(std::span<const float> sample, const Shape& shape, double degrees);

} // namespace clp::data
