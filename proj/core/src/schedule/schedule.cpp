// SPDX-License-Identifier: Apache-2.0
#include "clp/schedule/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "clp/error.hpp"

namespace clp::schedule {

std::string_view to_string(ScheduleMode mode) {
    switch (mode) {
    case ScheduleMode::static_baseline: return "static-baseline";
    case ScheduleMode::reduce_at_critical: return "reduce-at-critical";
    case ScheduleMode::prune_anneal: return "prune-anneal";
    }
    return "?";
}

std::string_view to_string(PhaseLabel label) {
    switch (label) {
    case PhaseLabel::pre_critical: return "pre-critical";
    case PhaseLabel::reduced: return "reduced";
    case PhaseLabel::pruned: return "pruned";
    case PhaseLabel::annealed_restore: return "annealed-restore";
    }
    return "?";
}

ScheduleMode parse_schedule_mode(std::string_view name) {
    if (name == "static-baseline" || name == "static") return ScheduleMode::static_baseline;
    if (name == "reduce-at-critical" || name == "reduce") return ScheduleMode::reduce_at_critical;
    if (name == "prune-anneal") return ScheduleMode::prune_anneal;
    throw SpecError("unknown schedule mode '" + std::string(name) + "'");
}

void ScheduleParams::validate() const {
    if (total_epochs < 1) throw SpecError("schedule needs at least one epoch");
    if (!(k_pre > 0.0) || !(k_post > 0.0) || !(k_prune > 0.0)) throw SpecError("k values must be positive");
    if (!(delta > 0.0 && delta <= 1.0)) throw SpecError("delta must lie in (0, 1]");
}

namespace {

void push_phase(std::vector<RecipePhase>& phases, int start, int end, double k, PhaseLabel label) {
    if (end > start) phases.push_back({start, end, k, label});
}

} // namespace

RecipeSchedule build_schedule(const ScheduleParams& params, std::optional<int> critical_epoch) {
    params.validate();
    const int N = params.total_epochs;
    RecipeSchedule s;
    s.params = params;
    if (params.mode == ScheduleMode::static_baseline || !critical_epoch) {
        s.phases.push_back({0, N, params.k_pre, PhaseLabel::pre_critical});
        return s;
    }
    const int i = *critical_epoch;
    if (i < 0 || i > N) throw SpecError("critical epoch " + std::to_string(i) + " outside [0, " + std::to_string(N) + "]");
    s.critical_epoch = i;
    push_phase(s.phases, 0, i, params.k_pre, PhaseLabel::pre_critical);
    if (params.mode == ScheduleMode::reduce_at_critical) {
        push_phase(s.phases, i, N, params.k_post, PhaseLabel::reduced);
    } else {
        const int pruned = static_cast<int>(std::floor(params.delta * static_cast<double>(N - i)));
        push_phase(s.phases, i, i + pruned, params.k_prune, PhaseLabel::pruned);
        push_phase(s.phases, i + pruned, N, params.k_pre, PhaseLabel::annealed_restore);
    }
    return s;
}

double effective_k(const RecipeSchedule& schedule, int epoch) {
    for (const auto& p : schedule.phases)
        if (epoch >= p.start && epoch < p.end) return p.k;
    throw SpecError("epoch " + std::to_string(epoch) + " is not covered by the schedule");
}

RecipeSchedule on_detection(const RecipeSchedule& schedule, int fired_epoch) {
    if (schedule.params.mode == ScheduleMode::static_baseline) throw StateError("static schedules ignore detections");
    if (schedule.critical_epoch) return schedule;
    const int next = std::min(fired_epoch + 1, schedule.params.total_epochs);
    return build_schedule(schedule.params, next);
}

} // namespace clp::schedule
