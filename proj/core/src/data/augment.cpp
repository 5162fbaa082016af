// SPDX-License-Identifier: Apache-2.0
#include "clp/data/augment.hpp"

#include <cmath>
#include <numbers>

#include "clp/error.hpp"
#include "clp/rng.hpp"

namespace clp::data {

void AugmentPolicy::validate() const {
    for (double p : {flip_p, crop_p, rotation_p, translation_p})
        if (!(p >= 0.0 && p <= 1.0)) throw SpecError("augmentation probabilities must lie in [0, 1]");
    if (!(crop_padding >= 0.0 && crop_padding <= kMaxCropPadding)) throw SpecError("crop padding must lie in [0, 4]");
    if (!(rotation_degrees >= 0.0 && rotation_degrees <= kMaxRotationDegrees))
        throw SpecError("rotation must lie in [0, 15] degrees");
    if (!(translation_fraction >= 0.0 && translation_fraction <= kMaxTranslationFraction))
        throw SpecError("translation must lie in [0, 0.125] of the side");
}

namespace {

bool is_image(const Shape& shape) { return shape.size() == 2 || shape.size() == 3; }

} // namespace

std::vector<float> horizontal_flip(std::span<const float> sample, const Shape& shape) {
    const auto [C, H, W] = nn::image_dims(shape);
    std::vector<float> out(sample.size());
    for (std::size_t c = 0; c < C; ++c)
        for (std::size_t y = 0; y < H; ++y)
            for (std::size_t x = 0; x < W; ++x) out[(c * H + y) * W + x] = sample[(c * H + y) * W + (W - 1 - x)];
    return out;
}

std::vector<float> translate(std::span<const float> sample, const Shape& shape, int dy, int dx) {
    const auto [C, H, W] = nn::image_dims(shape);
    std::vector<float> out(sample.size(), 0.0f);
    const auto h = static_cast<std::ptrdiff_t>(H), w = static_cast<std::ptrdiff_t>(W);
    for (std::size_t c = 0; c < C; ++c)
        for (std::ptrdiff_t y = 0; y < h; ++y) {
            const std::ptrdiff_t sy = y - dy;
            if (sy < 0 || sy >= h) continue;
            for (std::ptrdiff_t x = 0; x < w; ++x) {
                const std::ptrdiff_t sx = x - dx;
                if (sx < 0 || sx >= w) continue;
                out[(c * H + static_cast<std::size_t>(y)) * W + static_cast<std::size_t>(x)] =
                    sample[(c * H + static_cast<std::size_t>(sy)) * W + static_cast<std::size_t>(sx)];
            }
        }
    return out;
}

std::vector<float> rotate(std::span<const float> sample, const Shape& shape, double degrees) {
    const auto [C, H, W] = nn::image_dims(shape);
    std::vector<float> out(sample.size(), 0.0f);
    const double rad = degrees * std::numbers::pi / 180.0;
    const double cs = std::cos(rad), sn = std::sin(rad);
    const double cy = (static_cast<double>(H) - 1.0) / 2.0, cx = (static_cast<double>(W) - 1.0) / 2.0;
    for (std::size_t y = 0; y < H; ++y)
        for (std::size_t x = 0; x < W; ++x) {
            // inverse map: output pixel -> source pixel
            const double ry = static_cast<double>(y) - cy, rx = static_cast<double>(x) - cx;
            const double sy = cs * ry - sn * rx + cy;
            const double sx = sn * ry + cs * rx + cx;
            const long iy = std::lround(sy), ix = std::lround(sx);
            if (iy < 0 || ix < 0 || iy >= static_cast<long>(H) || ix >= static_cast<long>(W)) continue;
            for (std::size_t c = 0; c < C; ++c)
                out[(c * H + y) * W + x] =
                    sample[(c * H + static_cast<std::size_t>(iy)) * W + static_cast<std::size_t>(ix)];
        }
    return out;
}

std::vector<float> augment_sample(std::span<const float> sample, const Shape& shape, const AugmentPolicy& policy,
                                  std::uint64_t seed) {
    std::vector<float> out(sample.begin(), sample.end());
    if (!is_image(shape)) return out;
    [[maybe_unused]] const auto [C, H, W] = nn::image_dims(shape);
    auto engine = rng::make_engine(seed);

    if (rng::bernoulli(engine, policy.flip_p)) out = horizontal_flip(out, shape);

    if (rng::bernoulli(engine, policy.crop_p)) {
        // pad-then-crop == shift by an offset in [-pad, pad] on each axis
        const auto pad = static_cast<std::uint64_t>(
            std::lround(policy.crop_padding * static_cast<double>(std::max(H, W)) / 32.0));
        if (pad > 0) {
            const int dy = static_cast<int>(rng::uniform_index(engine, 2 * pad + 1)) - static_cast<int>(pad);
            const int dx = static_cast<int>(rng::uniform_index(engine, 2 * pad + 1)) - static_cast<int>(pad);
            out = translate(out, shape, dy, dx);
        }
    }

    if (rng::bernoulli(engine, policy.rotation_p) && policy.rotation_degrees > 0.0)
        out = rotate(out, shape, rng::uniform(engine, -policy.rotation_degrees, policy.rotation_degrees));

    if (rng::bernoulli(engine, policy.translation_p)) {
        const auto ty = static_cast<std::uint64_t>(std::lround(policy.translation_fraction * static_cast<double>(H)));
        const auto tx = static_cast<std::uint64_t>(std::lround(policy.translation_fraction * static_cast<double>(W)));
        const int dy = static_cast<int>(rng::uniform_index(engine, 2 * ty + 1)) - static_cast<int>(ty);
        const int dx = static_cast<int>(rng::uniform_index(engine, 2 * tx + 1)) - static_cast<int>(tx);
        if (dy != 0 || dx != 0) out = translate(out, shape, dy, dx);
    }
    return out;
}

} // namespace clp::data
