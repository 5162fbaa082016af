// SPDX-License-Identifier: Apache-2.0
#pragma once

// Online detection of the end of the critical learning period.
//
// Each epoch contributes a point (epoch / epoch_norm, distance / distance_norm).
// Once `window` points are buffered, the least-squares slope m of the window
// gives an angle atan(m) in degrees. The detector arms on the first window at
// or above the threshold and fires on the first later window strictly below it.

#include <deque>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "clp/rotation/rotation.hpp"

namespace clp::detect {

struct DetectorConfig {
    int window = 5;
    double threshold_degrees = 45.0;
    int total_epochs = 200;
    std::optional<double> epoch_norm;  // defaults to total_epochs
    double distance_norm = 1.0;
    bool arm_before_fire = true;

    /// Throws SpecError unless window >= 2, 0 < threshold < 90, total_epochs >= window
    /// and both normalizers are positive.
    void validate() const;

    double effective_epoch_norm() const { return epoch_norm.value_or(static_cast<double>(total_epochs)); }

    bool operator==(const DetectorConfig&) const = default;
};

struct NormalizedPoint {
    double u = 0.0;
    double v = 0.0;
};

NormalizedPoint normalize_point(int epoch, double distance, const DetectorConfig& config);

/// Least-squares slope sum((u-ubar)(v-vbar)) / sum((u-ubar)^2).
/// Throws SpecError for fewer than two points or when every u is equal.
double window_slope(std::span<const NormalizedPoint> points);

/// (180 / pi) * atan(m). Throws NumericError for non-finite m.
double angle_degrees(double slope);

struct DetectionEvent {
    int epoch = 0;                 // newest epoch of the firing window
    std::vector<double> alphas;    // angles of the last `window` windows, oldest first, ending with the firing one
};

struct StepResult {
    std::optional<double> alpha;          // angle of the current window, once full
    std::optional<DetectionEvent> fired;  // set only on the step that fires
};

class CriticalDetector {
public:
    explicit CriticalDetector(DetectorConfig config);

    /// Pushes the point for `epoch`. Throws StateError when epochs do not strictly increase.
    StepResult step(int epoch, double distance);

    const DetectorConfig& config() const noexcept { return config_; }
    bool armed() const noexcept { return armed_; }
    std::optional<int> fired_epoch() const noexcept { return fired_; }
    std::optional<double> last_alpha() const noexcept { return alphas_.empty() ? std::nullopt : std::optional(alphas_.back()); }

private:
    DetectorConfig config_;
    std::deque<NormalizedPoint> buffer_;
    std::deque<double> alphas_;
    std::optional<int> last_epoch_;
    bool armed_ = false;
    std::optional<int> fired_;
};

/// Replays a stored trace through a fresh detector.
std::optional<DetectionEvent> detect_offline(const rotation::RotationTrace& trace, const DetectorConfig& config);

} // namespace clp::detect
