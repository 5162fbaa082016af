// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "clp/detect/detector.hpp"
#include "clp/harness/run_config.hpp"
#include "clp/harness/run_log.hpp"
#include "clp/harness/trainer.hpp"
#include "clp/report/cost_report.hpp"

namespace clp::harness {

/// File names inside a run's output directory.
inline constexpr const char* kConfigFile = "config.txt";
inline constexpr const char* kTraceFile = "trace.csv";
inline constexpr const char* kLogFile = "log.jsonl";
inline constexpr const char* kPlotFile = "plot.csv";
inline constexpr const char* kCheckpointDir = "checkpoints";
inline constexpr const char* kSweepFile = "sweep.csv";
inline constexpr const char* kReportFile = "report.json";
inline constexpr const char* kTableFile = "report.txt";

/// Trains per `config` and writes config.txt, trace.csv, log.jsonl, plot.csv
/// and, when `config.checkpoints` is set, checkpoints/ckpt_<e>.bin.
TrainResult cmd_train(const RunConfig& config, const TrainOptions& extra = {});

/// Sweeps candidates against `run_dir`/checkpoints (a completed k_pre run with
/// checkpoints) and writes sweep.csv into `run_dir`. An empty candidate list means 0..N.
std::vector<OracleEntry> cmd_oracle_sweep(const RunConfig& config, const std::filesystem::path& run_dir,
                                          std::vector<int> candidates = {});

/// Offline replay of a trace CSV.
std::optional<detect::DetectionEvent> cmd_detect(const std::filesystem::path& trace_path,
                                                 const detect::DetectorConfig& config);

/// Compares two complete logs of the same task. Cost is the ratio of samples
/// consumed; wall seconds come from the per-epoch records.
report::RunReport compare_logs(const TrainRunLog& run, const TrainRunLog& baseline, std::string label,
                               const report::EmissionAssumptions& assumptions = {});

/// compare_logs on files; writes report.json and report.txt into `out_dir` when non-empty.
report::RunReport cmd_report(const std::filesystem::path& run_log, const std::filesystem::path& baseline_log,
                             const report::EmissionAssumptions& assumptions, const std::filesystem::path& out_dir,
                             std::string label = "run");

} // namespace clp::harness
