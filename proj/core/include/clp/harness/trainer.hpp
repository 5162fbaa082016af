// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "clp/harness/run_config.hpp"
#include "clp/harness/run_log.hpp"
#include "clp/nn/checkpoint.hpp"
#include "clp/rotation/rotation.hpp"

namespace clp::harness {

struct TrainOptions {
    /// Use this schedule as given and ignore the detector's firing.
    std::optional<schedule::RecipeSchedule> fixed_schedule;
    /// Continue from a saved state instead of a fresh initialization.
    std::optional<nn::Checkpoint> resume;
    /// Distances recorded before the resume epoch. They prime the detector so
    /// alpha values and live detection continue as in the uninterrupted run.
    rotation::RotationTrace history;
    /// Write ckpt_<e>.bin for every epoch boundary reached (state before epoch e).
    std::filesystem::path checkpoint_dir;
    std::function<void(const EpochRecord&)> on_epoch;
};

struct TrainResult {
    TrainRunLog log;
    rotation::RotationTrace trace;
    nn::ModelParams params;
    nn::OptimizerState optimizer;
};

/// Runs epochs [start, N). Epoch e trains on plan_epoch(n, k(e), seed.data,
/// seed.augment, e), so a run resumed from checkpoint i repeats exactly what a
/// monolithic run would have done from epoch i on. In reduce-at-critical and
/// prune-anneal modes the detector rewrites the schedule the epoch it fires,
/// unless a fixed schedule was supplied. Distances are always measured against
/// init_params(spec, seed.init). A non-finite training loss throws NumericError
/// after the checkpoints written so far.
TrainResult train(const RunConfig& config, const PreparedData& data, const TrainOptions& options = {});

struct OracleEntry {
    int switch_epoch = 0;
    double final_accuracy = 0.0;
    double normalized_cost = 0.0;
};

/// For each candidate i, resumes from ckpt_i of a k_pre baseline run and trains
/// [i, N) at k_post. Candidate N evaluates ckpt_N without further training.
/// `baseline_trace`, when given, primes each resumed run with epochs [0, i).
std::vector<OracleEntry> oracle_sweep(const RunConfig& config, const PreparedData& data,
                                      const std::filesystem::path& checkpoint_dir, std::span<const int> candidates,
                                      const rotation::RotationTrace& baseline_trace = {});

/// "switch_epoch,final_accuracy,normalized_cost"
std::string sweep_csv(std::span<const OracleEntry> entries);

} // namespace clp::harness
