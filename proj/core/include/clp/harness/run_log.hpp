// SPDX-License-Identifier: Apache-2.0
#pragma once

// Structured per-run log, serialized as JSON lines:
//
//   {"type":"run", ...}        once, run metadata
//   {"type":"epoch", ...}      once per trained epoch
//   {"type":"detection", ...}  when the live detector fired
//   {"type":"schedule", ...}   the schedule in force at the end of the run
//   {"type":"summary", ...}    once, last

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "clp/detect/detector.hpp"
#include "clp/nn/checkpoint.hpp"
#include "clp/schedule/schedule.hpp"

namespace clp::harness {

struct EpochRecord {
    int epoch = 0;
    double k = 0.0;
    std::size_t samples = 0;
    double learning_rate = 0.0;
    double train_loss = 0.0;
    double val_accuracy = 0.0;
    double cosine_distance = 0.0;
    std::optional<double> alpha;
    double wall_ms = 0.0;

    bool operator==(const EpochRecord&) const = default;
};

struct RunHeader {
    std::string mode;
    int total_epochs = 0;
    int start_epoch = 0;
    double baseline_k = 0.0;
    std::size_t train_size = 0;
    std::size_t val_size = 0;
    std::string model;
    std::string optimizer;
    nn::RunSeeds seeds;

    bool operator==(const RunHeader&) const = default;
};

struct TrainRunLog {
    RunHeader header;
    std::vector<EpochRecord> epochs;
    std::optional<detect::DetectionEvent> detection;
    schedule::RecipeSchedule schedule;

    double final_accuracy() const;
    std::size_t total_samples() const;
    double wall_seconds() const;
    /// Samples per epoch over the whole run, [0, N); needs a log that starts at epoch 0.
    std::vector<std::size_t> samples_per_epoch() const;
};

/// `include_wall_time = false` zeroes wall_ms, which makes two logs of the
/// same seeds byte-identical.
std::string to_jsonl(const TrainRunLog& log, bool include_wall_time = true);
TrainRunLog run_log_from_jsonl(std::string_view text);

void write_run_log(const std::filesystem::path& path, const TrainRunLog& log);
TrainRunLog read_run_log(const std::filesystem::path& path);

/// CSV "epoch,cosine_distance,alpha" for plotting; alpha is empty before the window fills.
std::string plot_csv(const TrainRunLog& log);

} // namespace clp::harness
