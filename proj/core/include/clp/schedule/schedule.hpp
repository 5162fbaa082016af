// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string_view>
#include <vector>

namespace clp::schedule {

enum class ScheduleMode { static_baseline, reduce_at_critical, prune_anneal };
enum class PhaseLabel { pre_critical, reduced, pruned, annealed_restore };

std::string_view to_string(ScheduleMode mode);
std::string_view to_string(PhaseLabel label);
ScheduleMode parse_schedule_mode(std::string_view name);

/// Epochs [start, end) trained with data factor k.
struct RecipePhase {
    int start = 0;
    int end = 0;
    double k = 1.0;
    PhaseLabel label = PhaseLabel::pre_critical;

    int length() const noexcept { return end - start; }
    bool operator==(const RecipePhase&) const = default;
};

struct ScheduleParams {
    ScheduleMode mode = ScheduleMode::reduce_at_critical;
    int total_epochs = 200;
    double k_pre = 3.0;
    double k_post = 1.0;
    double k_prune = 0.01;
    double delta = 1.0; // share of the post-critical span spent pruned (prune-anneal)

    /// Throws SpecError on N < 1, non-positive k values or delta outside (0, 1].
    void validate() const;

    bool operator==(const ScheduleParams&) const = default;
};

/// Ordered phases covering [0, N) exactly once.
struct RecipeSchedule {
    ScheduleParams params;
    std::optional<int> critical_epoch; // i*, the first epoch after the switch
    std::vector<RecipePhase> phases;

    bool operator==(const RecipeSchedule&) const = default;
};

/// static-baseline: [0, N) at k_pre.
/// reduce-at-critical: [0, i*) at k_pre, [i*, N) at k_post.
/// prune-anneal: [0, i*) at k_pre, [i*, i* + floor(delta (N - i*))) at k_prune, the rest at k_pre.
/// i* may lie anywhere in [0, N]; zero-length phases are dropped. Without i*
/// (not yet detected) every mode is a single k_pre phase.
RecipeSchedule build_schedule(const ScheduleParams& params, std::optional<int> critical_epoch);

/// k of the phase that covers `epoch`. Throws SpecError outside [0, N).
double effective_k(const RecipeSchedule& schedule, int epoch);

/// Switches the recipe from the epoch after `fired_epoch` onwards (i* = fired + 1).
/// Calling it again after the first detection returns the schedule unchanged.
RecipeSchedule on_detection(const RecipeSchedule& schedule, int fired_epoch);

} // namespace clp::schedule
