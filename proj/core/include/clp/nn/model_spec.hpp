// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace clp::nn {

/// Tensor dimensions of one sample, outermost first: (features) or (channels, height, width).
using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& shape);
std::string shape_string(const Shape& shape);

/// (channels, height, width) of an image shape; rank-2 shapes (H, W) count as one channel.
/// Throws ShapeError for any other rank.
std::array<std::size_t, 3> image_dims(const Shape& shape);

enum class LayerKind { dense, conv2d, relu, flatten, softmax_ce };

std::string_view to_string(LayerKind kind);

/// One layer of a feed-forward stack.
///
/// For dense layers `in`/`out` are feature counts; for conv2d they are channel
/// counts and `kernel` is the (odd) square kernel side. Convolutions run at
/// stride 1 with zero padding that preserves height and width.
struct LayerSpec {
    LayerKind kind = LayerKind::relu;
    std::size_t in = 0;
    std::size_t out = 0;
    std::size_t kernel = 0;
    std::size_t stride = 1;

    bool trainable() const noexcept { return kind == LayerKind::dense || kind == LayerKind::conv2d; }

    static LayerSpec dense(std::size_t in, std::size_t out) { return {LayerKind::dense, in, out, 0, 1}; }
    static LayerSpec conv2d(std::size_t in_channels, std::size_t out_channels, std::size_t kernel) {
        return {LayerKind::conv2d, in_channels, out_channels, kernel, 1};
    }
    static LayerSpec relu() { return {LayerKind::relu}; }
    static LayerSpec flatten() { return {LayerKind::flatten}; }
    static LayerSpec softmax_ce() { return {LayerKind::softmax_ce}; }

    bool operator==(const LayerSpec&) const = default;
};

struct ModelSpec {
    std::vector<LayerSpec> layers;
    Shape input_shape;
    std::size_t classes = 0;

    /// Throws SpecError unless shapes compose, at least one layer is trainable,
    /// classes >= 2 and the stack ends in exactly one softmax_ce head.
    void validate() const;

    /// Input shape of every layer followed by the final output shape
    /// (size layers.size() + 1). Throws SpecError on composition failures.
    std::vector<Shape> layer_shapes() const;

    /// Stable textual form, e.g. "input=1x8x8 classes=10 layers=flatten,dense:64:32,...".
    std::string canonical() const;

    /// FNV-1a of canonical(); stored in checkpoints.
    std::uint64_t hash() const;

    /// Parses a layer list such as "flatten dense:64 relu dense:10 softmax-ce"
    /// (separators: whitespace or commas). Dense widths and conv channel counts
    /// are given as outputs; inputs are inferred from the running shape.
    /// Conv layers are written "conv2d:<out_channels>:<kernel>".
    static ModelSpec parse(std::string_view layers, Shape input_shape, std::size_t classes);

    bool operator==(const ModelSpec&) const = default;
};

/// Convenience builder for an MLP: flatten, then dense+relu per hidden width, then the head.
ModelSpec make_mlp(Shape input_shape, const std::vector<std::size_t>& hidden, std::size_t classes);

} // namespace clp::nn
