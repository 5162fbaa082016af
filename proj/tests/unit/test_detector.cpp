// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "clp/detect/detector.hpp"
#include "clp/error.hpp"
#include "clp/rng.hpp"

#include "../support/detector_oracle.hpp"

using namespace clp;
using namespace clp::detect;

namespace {

DetectorConfig config_for(int n) {
    DetectorConfig c;
    c.total_epochs = n;
    return c;
}

std::vector<NormalizedPoint> pts(std::initializer_list<std::pair<double, double>> xs) {
    std::vector<NormalizedPoint> out;
    for (auto [u, v] : xs) out.push_back({u, v});
    return out;
}

// Distance rises at 5/N per epoch up to `knee`, then at 0.9/N.
rotation::RotationTrace knee_trace(int n, int knee) {
    rotation::RotationTrace t;
    for (int e = 0; e < n; ++e) {
        const double d = e <= knee ? 5.0 * e / n : 5.0 * knee / n + 0.9 * (e - knee) / n;
        t.append(e, d);
    }
    return t;
}

rotation::RotationTrace random_trace(rng::Engine& e, int n) {
    rotation::RotationTrace t;
    double d = 0.0;
    const double steep = rng::uniform(e, 0.5, 8.0), flat = rng::uniform(e, 0.0, 1.5);
    const int knee = static_cast<int>(rng::uniform_index(e, static_cast<std::uint64_t>(n)));
    for (int i = 0; i < n; ++i) {
        const double slope = (i < knee ? steep : flat) / n;
        d += slope + rng::uniform(e, -0.5, 0.5) * slope;
        t.append(i, std::clamp(d, 0.0, 2.0));
    }
    return t;
}

} // namespace

TEST(Normalize, Examples) {
    const auto c = config_for(200);
    EXPECT_EQ(normalize_point(100, 0.42, c).u, 0.5);
    EXPECT_EQ(normalize_point(100, 0.42, c).v, 0.42);
    EXPECT_EQ(normalize_point(0, 0.1, c).u, 0.0);
}

TEST(WindowSlope, ClosedFormCases) {
    EXPECT_NEAR(window_slope(pts({{0, 0}, {1, 1}, {2, 2}, {3, 3}, {4, 4}})), 1.0, 1e-12);
    EXPECT_NEAR(window_slope(pts({{0, 3}, {1, 3}, {2, 3}, {3, 3}, {4, 3}})), 0.0, 1e-12);
    // Sxy = 5, Sxx = 10.
    EXPECT_NEAR(window_slope(pts({{0, 0}, {1, 1}, {2, 1}, {3, 2}, {4, 2}})), 0.5, 1e-12);
    EXPECT_THROW(window_slope(pts({{1, 0}})), SpecError);
    EXPECT_THROW(window_slope(pts({{1, 0}, {1, 2}, {1, 3}})), SpecError);
}

TEST(Angle, Examples) {
    EXPECT_NEAR(angle_degrees(1.0), 45.0, 1e-12);
    EXPECT_EQ(angle_degrees(0.0), 0.0);
    EXPECT_NEAR(angle_degrees(std::sqrt(3.0)), 60.0, 1e-12);
    EXPECT_THROW(angle_degrees(std::nan("")), NumericError);
    double prev = -90.0;
    for (double m = -50.0; m <= 50.0; m += 0.37) {
        const double a = angle_degrees(m);
        EXPECT_GT(a, prev);
        EXPECT_GT(a, -90.0);
        EXPECT_LT(a, 90.0);
        prev = a;
    }
}

TEST(DetectorConfig, Validation) {
    EXPECT_NO_THROW(config_for(200).validate());
    auto c = config_for(200);
    c.window = 1;
    EXPECT_THROW(c.validate(), SpecError);
    c = config_for(200);
    c.threshold_degrees = 90;
    EXPECT_THROW(c.validate(), SpecError);
    c = config_for(4);
    EXPECT_THROW(c.validate(), SpecError);
    c = config_for(200);
    c.distance_norm = 0;
    EXPECT_THROW(c.validate(), SpecError);
}

TEST(Detector, FiresAtTwentyFourOnKneeTrace) {
    // Knee at 20: the first window lying entirely on the shallow segment ends at 24.
    const auto trace = knee_trace(200, 20);
    const auto c = config_for(200);
    ASSERT_EQ(testkit::oracle_fired_epoch(trace, c), 24);
    CriticalDetector det(c);
    std::optional<DetectionEvent> fired;
    for (const auto& p : trace.points()) {
        auto r = det.step(p.epoch, p.distance);
        if (r.fired) {
            EXPECT_FALSE(fired) << "fired twice";
            fired = r.fired;
        }
    }
    ASSERT_TRUE(fired);
    EXPECT_EQ(fired->epoch, 24);
    EXPECT_EQ(det.fired_epoch(), 24);
    ASSERT_EQ(fired->alphas.size(), 5u);
    EXPECT_LT(fired->alphas.back(), 45.0);
    EXPECT_GE(fired->alphas[3], 45.0);
    EXPECT_NEAR(fired->alphas.back(), std::atan(0.9) * 180.0 / std::numbers::pi, 1e-9);
}

TEST(Detector, ConstantSteepSlopeNeverFires) {
    rotation::RotationTrace t;
    for (int e = 0; e < 200; ++e) t.append(e, 1.5 * e / 200.0);
    EXPECT_FALSE(detect_offline(t, config_for(200)));
}

TEST(Detector, ShallowStartNeedsArming) {
    rotation::RotationTrace t;
    for (int e = 0; e < 50; ++e) t.append(e, 0.2 * e / 50.0);
    auto c = config_for(50);
    EXPECT_FALSE(detect_offline(t, c));
    c.arm_before_fire = false;
    const auto ev = detect_offline(t, c);
    ASSERT_TRUE(ev);
    EXPECT_EQ(ev->epoch, 4);
}

TEST(Detector, ExactThresholdDoesNotFire) {
    // Slope exactly 1 in normalized units: alpha == 45 arms but never fires.
    rotation::RotationTrace t;
    for (int e = 0; e < 16; ++e) t.append(e, e / 16.0);
    auto c = config_for(16);
    c.arm_before_fire = false;
    CriticalDetector det(c);
    for (const auto& p : t.points()) {
        const auto r = det.step(p.epoch, p.distance);
        if (r.alpha) EXPECT_EQ(*r.alpha, 45.0);
        EXPECT_FALSE(r.fired);
    }
}

TEST(Detector, ShortAndEmptyTraces) {
    EXPECT_FALSE(detect_offline({}, config_for(200)));
    rotation::RotationTrace t;
    for (int e = 0; e < 4; ++e) t.append(e, 0.5 * e);
    EXPECT_FALSE(detect_offline(t, config_for(200)));
}

TEST(Detector, RejectsOutOfOrderEpochs) {
    CriticalDetector det(config_for(200));
    det.step(3, 0.1);
    EXPECT_THROW(det.step(3, 0.2), StateError);
    EXPECT_THROW(det.step(1, 0.2), StateError);
}

TEST(Detector, OnlineMatchesOfflineAndOracle) {
    auto e = rng::make_engine(77);
    for (int t = 0; t < 300; ++t) {
        const int n = 10 + static_cast<int>(rng::uniform_index(e, 190));
        const auto trace = random_trace(e, n);
        const auto c = config_for(n);
        CriticalDetector det(c);
        std::optional<int> online;
        for (const auto& p : trace.points()) {
            const auto r = det.step(p.epoch, p.distance);
            if (r.fired) online = r.fired->epoch;
        }
        const auto offline = detect_offline(trace, c);
        EXPECT_EQ(online, offline ? std::optional<int>(offline->epoch) : std::nullopt);
        EXPECT_EQ(online, testkit::oracle_fired_epoch(trace, c));
    }
}

TEST(Detector, NormalizationInvariance) {
    auto e = rng::make_engine(78);
    for (int t = 0; t < 100; ++t) {
        const auto trace = random_trace(e, 120);
        auto c = config_for(120);
        const auto base = detect_offline(trace, c);
        for (double scale : {0.5, 0.25, 0.125}) {
            rotation::RotationTrace scaled;
            for (const auto& p : trace.points()) scaled.append(p.epoch, p.distance * scale);
            auto cs = c;
            cs.distance_norm = scale;
            const auto got = detect_offline(scaled, cs);
            EXPECT_EQ(got.has_value(), base.has_value());
            if (got && base) EXPECT_EQ(got->epoch, base->epoch);
        }
    }
}
