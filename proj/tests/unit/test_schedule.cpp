// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>

#include "clp/data/epoch_plan.hpp"
#include "clp/error.hpp"
#include "clp/rng.hpp"
#include "clp/schedule/schedule.hpp"

using namespace clp;
using namespace clp::schedule;

namespace {

ScheduleParams params(ScheduleMode mode, int n = 200, double delta = 1.0) {
    ScheduleParams p;
    p.mode = mode;
    p.total_epochs = n;
    p.delta = delta;
    return p;
}

void expect_covers(const RecipeSchedule& s) {
    int next = 0;
    for (const auto& p : s.phases) {
        EXPECT_EQ(p.start, next);
        EXPECT_GT(p.length(), 0);
        next = p.end;
    }
    EXPECT_EQ(next, s.params.total_epochs);
}

} // namespace

TEST(Schedule, ModeNames) {
    for (auto m : {ScheduleMode::static_baseline, ScheduleMode::reduce_at_critical, ScheduleMode::prune_anneal})
        EXPECT_EQ(parse_schedule_mode(to_string(m)), m);
    EXPECT_EQ(parse_schedule_mode("static"), ScheduleMode::static_baseline);
    EXPECT_THROW(parse_schedule_mode("linear"), SpecError);
}

TEST(Schedule, ParamValidation) {
    auto p = params(ScheduleMode::reduce_at_critical);
    p.delta = 0.0;
    EXPECT_THROW(p.validate(), SpecError);
    p.delta = 1.5;
    EXPECT_THROW(p.validate(), SpecError);
    p = params(ScheduleMode::reduce_at_critical);
    p.k_post = 0.0;
    EXPECT_THROW(p.validate(), SpecError);
    p.k_post = 1.0;
    p.total_epochs = 0;
    EXPECT_THROW(p.validate(), SpecError);
}

TEST(Schedule, StaticIsSinglePhase) {
    const auto s = build_schedule(params(ScheduleMode::static_baseline), 24);
    ASSERT_EQ(s.phases.size(), 1u);
    EXPECT_EQ(s.phases[0], (RecipePhase{0, 200, 3.0, PhaseLabel::pre_critical}));
}

TEST(Schedule, ReduceAtTwentyFour) {
    const auto s = build_schedule(params(ScheduleMode::reduce_at_critical), 24);
    ASSERT_EQ(s.phases.size(), 2u);
    EXPECT_EQ(s.phases[0], (RecipePhase{0, 24, 3.0, PhaseLabel::pre_critical}));
    EXPECT_EQ(s.phases[1], (RecipePhase{24, 200, 1.0, PhaseLabel::reduced}));
    EXPECT_EQ(effective_k(s, 23), 3.0);
    EXPECT_EQ(effective_k(s, 24), 1.0);
    EXPECT_THROW(effective_k(s, 200), SpecError);
    EXPECT_THROW(effective_k(s, -1), SpecError);
}

TEST(Schedule, PruneAnnealHalf) {
    const auto s = build_schedule(params(ScheduleMode::prune_anneal, 200, 0.5), 24);
    ASSERT_EQ(s.phases.size(), 3u);
    EXPECT_EQ(s.phases[1], (RecipePhase{24, 112, 0.01, PhaseLabel::pruned}));
    EXPECT_EQ(s.phases[2], (RecipePhase{112, 200, 3.0, PhaseLabel::annealed_restore}));
}

TEST(Schedule, PruneAnnealDeltaEdges) {
    const auto full = build_schedule(params(ScheduleMode::prune_anneal, 200, 1.0), 24);
    ASSERT_EQ(full.phases.size(), 2u);
    EXPECT_EQ(full.phases[1].end, 200);
    EXPECT_EQ(full.phases[1].label, PhaseLabel::pruned);
    // floor(0.99 * 176) = 174
    const auto almost = build_schedule(params(ScheduleMode::prune_anneal, 200, 0.99), 24);
    ASSERT_EQ(almost.phases.size(), 3u);
    EXPECT_EQ(almost.phases[1].end, 198);
    EXPECT_EQ(almost.phases[2], (RecipePhase{198, 200, 3.0, PhaseLabel::annealed_restore}));
    EXPECT_EQ(effective_k(almost, 199), 3.0);
}

TEST(Schedule, BoundaryCriticalEpochs) {
    const auto zero = build_schedule(params(ScheduleMode::reduce_at_critical), 0);
    ASSERT_EQ(zero.phases.size(), 1u);
    EXPECT_EQ(zero.phases[0].label, PhaseLabel::reduced);
    const auto end = build_schedule(params(ScheduleMode::reduce_at_critical), 200);
    ASSERT_EQ(end.phases.size(), 1u);
    EXPECT_EQ(end.phases[0].label, PhaseLabel::pre_critical);
    EXPECT_THROW(build_schedule(params(ScheduleMode::reduce_at_critical), 201), SpecError);
    EXPECT_THROW(build_schedule(params(ScheduleMode::reduce_at_critical), -1), SpecError);
}

TEST(Schedule, UndetectedIsAllPre) {
    const auto s = build_schedule(params(ScheduleMode::prune_anneal), std::nullopt);
    ASSERT_EQ(s.phases.size(), 1u);
    EXPECT_FALSE(s.critical_epoch);
}

TEST(OnDetection, SwitchesNextEpochOnce) {
    const auto s0 = build_schedule(params(ScheduleMode::reduce_at_critical), std::nullopt);
    const auto s1 = on_detection(s0, 23);
    EXPECT_EQ(s1.critical_epoch, 24);
    EXPECT_EQ(s1, build_schedule(params(ScheduleMode::reduce_at_critical), 24));
    EXPECT_EQ(on_detection(s1, 40), s1);
    const auto last = on_detection(s0, 199);
    EXPECT_EQ(last.critical_epoch, 200);
    ASSERT_EQ(last.phases.size(), 1u);
    EXPECT_THROW(on_detection(build_schedule(params(ScheduleMode::static_baseline), std::nullopt), 3), StateError);
}

TEST(ScheduleProperty, CoverageAndCounts) {
    auto e = rng::make_engine(91);
    for (int t = 0; t < 400; ++t) {
        const int n = 1 + static_cast<int>(rng::uniform_index(e, 300));
        const int i = static_cast<int>(rng::uniform_index(e, static_cast<std::uint64_t>(n) + 1));
        const double delta = 1.0 - rng::uniform(e, 0.0, 0.999);
        for (auto m : {ScheduleMode::static_baseline, ScheduleMode::reduce_at_critical, ScheduleMode::prune_anneal}) {
            const auto s = build_schedule(params(m, n, delta), i);
            expect_covers(s);
        }
        const auto r = build_schedule(params(ScheduleMode::reduce_at_critical, n), i);
        double samples = 0.0;
        for (int ep = 0; ep < n; ++ep) samples += effective_k(r, ep);
        EXPECT_DOUBLE_EQ(samples, 3.0 * i + 1.0 * (n - i));
    }
}

TEST(ScheduleProperty, PrunedSpanMonotoneInDelta) {
    auto pruned_len = [](double delta) {
        const auto s = build_schedule(params(ScheduleMode::prune_anneal, 200, delta), 24);
        for (const auto& p : s.phases)
            if (p.label == PhaseLabel::pruned) return p.length();
        return 0;
    };
    int prev = 0;
    for (double d = 0.01; d <= 1.0; d += 0.01) {
        const int len = pruned_len(d);
        EXPECT_GE(len, prev);
        prev = len;
    }
    EXPECT_EQ(pruned_len(1.0), 176);
}
