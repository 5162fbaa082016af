// SPDX-License-Identifier: Apache-2.0
#include "clp/rotation/rotation.hpp"

#include <cstdio>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <string>

#include "clp/error.hpp"

namespace clp::rotation {

WeightVector flatten(const nn::ModelParams& params, int source_epoch) {
    WeightVector v;
    v.source_epoch = source_epoch;
    v.values.reserve(params.parameter_count());
    for (const auto& l : params.layers) {
        v.values.insert(v.values.end(), l.weight.values.begin(), l.weight.values.end());
        v.values.insert(v.values.end(), l.bias.values.begin(), l.bias.values.end());
    }
    return v;
}

nn::ModelParams unflatten(const WeightVector& vector, const nn::ModelParams& like) {
    if (vector.values.size() != like.parameter_count())
        throw ShapeError("weight vector has " + std::to_string(vector.values.size()) + " entries, model needs " +
                         std::to_string(like.parameter_count()));
    nn::ModelParams out = like;
    std::size_t pos = 0;
    for (auto& l : out.layers) {
        for (float& w : l.weight.values) w = static_cast<float>(vector.values[pos++]);
        for (float& b : l.bias.values) b = static_cast<float>(vector.values[pos++]);
    }
    return out;
}

double cosine_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw ShapeError("cosine distance of vectors with lengths " + std::to_string(a.size()) + " and " +
                         std::to_string(b.size()));
    double dot = 0.0, aa = 0.0, bb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        aa += a[i] * a[i];
        bb += b[i] * b[i];
    }
    if (!(aa > 0.0) || !(bb > 0.0)) throw NumericError("cosine distance is undefined for a zero-norm vector");
    const double na = std::sqrt(aa), nb = std::sqrt(bb);
    if (!std::isfinite(dot) || !std::isfinite(na) || !std::isfinite(nb)) throw NumericError("non-finite cosine");
    // 1 - cos = |a/|a| - b/|b||^2 / 2, and 2 - |a/|a| + b/|b||^2 / 2 for obtuse pairs;
    // both avoid the cancellation in 1 - cos near 0 and 2.
    const double sign = dot >= 0.0 ? -1.0 : 1.0;
    double ss = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double t = a[i] / na + sign * (b[i] / nb);
        ss += t * t;
    }
    const double d = dot >= 0.0 ? 0.5 * ss : 2.0 - 0.5 * ss;
    return std::clamp(d, 0.0, 2.0);
}

RotationTrace::RotationTrace(std::vector<TracePoint> points) {
    for (const auto& p : points) append(p.epoch, p.distance);
}

void RotationTrace::append(int epoch, double distance) {
    if (!points_.empty() && epoch <= points_.back().epoch)
        throw StateError("trace epoch " + std::to_string(epoch) + " does not follow " + std::to_string(points_.back().epoch));
    points_.push_back({epoch, distance});
}

void record_epoch(RotationTrace& trace, int epoch, const nn::ModelParams& params, const WeightVector& initial) {
    if (!trace.empty() && epoch <= trace.points().back().epoch)
        throw StateError("epoch " + std::to_string(epoch) + " recorded out of order");
    trace.append(epoch, cosine_distance(initial, flatten(params, epoch)));
}

void record_epoch(RotationTrace& trace, int epoch, const nn::ModelParams& params, const nn::ModelParams& initial) {
    record_epoch(trace, epoch, params, flatten(initial));
}

void write_trace_csv(std::ostream& out, const RotationTrace& trace) {
    out << "epoch,cosine_distance\n";
    char buf[64];
    for (const auto& p : trace.points()) {
        std::snprintf(buf, sizeof buf, "%d,%.17g\n", p.epoch, p.distance);
        out << buf;
    }
}

void write_trace_csv(const std::filesystem::path& path, const RotationTrace& trace) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    write_trace_csv(out, trace);
}

RotationTrace read_trace_csv(std::istream& in) {
    RotationTrace trace;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        if (!header_seen) {
            header_seen = true;
            if (line.rfind("epoch", 0) == 0) continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw FormatError("trace row needs two columns", line_no);
        const std::string_view e(line.data(), comma);
        const std::string_view d(line.data() + comma + 1, line.size() - comma - 1);
        int epoch = 0;
        double distance = 0.0;
        auto r1 = std::from_chars(e.data(), e.data() + e.size(), epoch);
        auto r2 = std::from_chars(d.data(), d.data() + d.size(), distance);
        if (r1.ec != std::errc{} || r1.ptr != e.data() + e.size() || e.empty())
            throw FormatError("bad epoch '" + std::string(e) + "'", line_no);
        if (r2.ec != std::errc{} || r2.ptr != d.data() + d.size() || d.empty() || !std::isfinite(distance))
            throw FormatError("bad distance '" + std::string(d) + "'", line_no);
        if (!trace.empty() && epoch <= trace.points().back().epoch)
            throw FormatError("epochs must strictly increase", line_no);
        trace.append(epoch, distance);
    }
    return trace;
}

RotationTrace read_trace_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    return read_trace_csv(in);
}

} // namespace clp::rotation
