// SPDX-License-Identifier: Apache-2.0
#pragma once

// Layer rotation: how far the whole network's weight vector has turned away
// from its random initialization, measured as a cosine distance.

#include <filesystem>
#include <istream>
#include <ostream>
#include <span>
#include <vector>

#include "clp/nn/params.hpp"

namespace clp::rotation {

/// Every trainable value of a model laid end to end.
struct WeightVector {
    std::vector<double> values;
    int source_epoch = 0;
};

/// Concatenates parameters in layer order, weights before biases within a layer.
WeightVector flatten(const nn::ModelParams& params, int source_epoch = 0);

/// Inverse of flatten for the buffer layout of `like`. Throws ShapeError on a length mismatch.
nn::ModelParams unflatten(const WeightVector& vector, const nn::ModelParams& like);

/// 1 - <a, b> / (|a| |b|), accumulated in 64 bits and clamped to [0, 2].
/// Throws ShapeError on unequal lengths and NumericError if either norm is zero.
double cosine_distance(std::span<const double> a, std::span<const double> b);
inline double cosine_distance(const WeightVector& a, const WeightVector& b) { return cosine_distance(a.values, b.values); }

struct TracePoint {
    int epoch = 0;
    double distance = 0.0;

    bool operator==(const TracePoint&) const = default;
};

/// Append-only (epoch, distance) series with strictly increasing epochs.
class RotationTrace {
public:
    RotationTrace() = default;
    explicit RotationTrace(std::vector<TracePoint> points);

    /// Throws StateError unless epoch exceeds the last recorded one.
    void append(int epoch, double distance);

    const std::vector<TracePoint>& points() const noexcept { return points_; }
    std::size_t size() const noexcept { return points_.size(); }
    bool empty() const noexcept { return points_.empty(); }

    bool operator==(const RotationTrace&) const = default;

private:
    std::vector<TracePoint> points_;
};

/// Appends (epoch, cosine_distance(initial, flatten(params))).
void record_epoch(RotationTrace& trace, int epoch, const nn::ModelParams& params, const WeightVector& initial);
void record_epoch(RotationTrace& trace, int epoch, const nn::ModelParams& params, const nn::ModelParams& initial);

/// CSV with header "epoch,cosine_distance"; distances printed with 17 significant digits.
void write_trace_csv(std::ostream& out, const RotationTrace& trace);
void write_trace_csv(const std::filesystem::path& path, const RotationTrace& trace);

/// Reads the format above. An empty stream (or header only) yields an empty
/// trace; malformed rows raise FormatError carrying the line number.
RotationTrace read_trace_csv(std::istream& in);
RotationTrace read_trace_csv(const std::filesystem::path& path);

} // namespace clp::rotation
