// SPDX-License-Identifier: Apache-2.0
#include "clp/detect/detector.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "clp/error.hpp"

namespace clp::detect {

void DetectorConfig::validate() const {
    if (window < 2) throw SpecError("detector window must be at least 2");
    if (!(threshold_degrees > 0.0 && threshold_degrees < 90.0)) throw SpecError("threshold angle must lie in (0, 90)");
    if (total_epochs < window) throw SpecError("total epochs must be at least the window size");
    if (!(effective_epoch_norm() > 0.0)) throw SpecError("epoch normalizer must be positive");
    if (!(distance_norm > 0.0)) throw SpecError("distance normalizer must be positive");
}

NormalizedPoint normalize_point(int epoch, double distance, const DetectorConfig& config) {
    return {static_cast<double>(epoch) / config.effective_epoch_norm(), distance / config.distance_norm};
}

double window_slope(std::span<const NormalizedPoint> points) {
    if (points.size() < 2) throw SpecError("a regression window needs at least two points");
    const double count = static_cast<double>(points.size());
    double ubar = 0.0, vbar = 0.0;
    for (const auto& p : points) {
        ubar += p.u;
        vbar += p.v;
    }
    ubar /= count;
    vbar /= count;
    double sxy = 0.0, sxx = 0.0;
    for (const auto& p : points) {
        sxy += (p.u - ubar) * (p.v - vbar);
        sxx += (p.u - ubar) * (p.u - ubar);
    }
    if (!(sxx > 0.0)) throw SpecError("degenerate regression window: all epochs equal");
    return sxy / sxx;
}

double angle_degrees(double slope) {
    if (!std::isfinite(slope)) throw NumericError("slope must be finite");
    return 180.0 / std::numbers::pi * std::atan(slope);
}

CriticalDetector::CriticalDetector(DetectorConfig config) : config_(std::move(config)) { config_.validate(); }

StepResult CriticalDetector::step(int epoch, double distance) {
    if (last_epoch_ && epoch <= *last_epoch_)
        throw StateError("detector received epoch " + std::to_string(epoch) + " after " + std::to_string(*last_epoch_));
    last_epoch_ = epoch;

    const auto w = static_cast<std::size_t>(config_.window);
    buffer_.push_back(normalize_point(epoch, distance, config_));
    if (buffer_.size() > w) buffer_.pop_front();

    StepResult result;
    if (buffer_.size() < w) return result;

    const std::vector<NormalizedPoint> window(buffer_.begin(), buffer_.end());
    const double alpha = angle_degrees(window_slope(window));
    result.alpha = alpha;
    alphas_.push_back(alpha);
    if (alphas_.size() > w) alphas_.pop_front();

    if (fired_) return result;
    const bool below = alpha < config_.threshold_degrees;
    if (!below) {
        armed_ = true;
        return result;
    }
    if (armed_ || !config_.arm_before_fire) {
        fired_ = epoch;
        result.fired = DetectionEvent{epoch, std::vector<double>(alphas_.begin(), alphas_.end())};
    }
    return result;
}

std::optional<DetectionEvent> detect_offline(const rotation::RotationTrace& trace, const DetectorConfig& config) {
    CriticalDetector detector(config);
    for (const auto& p : trace.points()) {
        if (auto r = detector.step(p.epoch, p.distance); r.fired) return r.fired;
    }
    return std::nullopt;
}

} // namespace clp::detect
