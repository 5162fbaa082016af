// SPDX-License-Identifier: Apache-2.0
#include "clp/harness/commands.hpp"

#include <fstream>
#include <numeric>

#include "clp/error.hpp"

namespace clp::harness {

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

} // namespace

TrainResult cmd_train(const RunConfig& config, const TrainOptions& extra) {
    config.validate();
    if (config.output_dir.empty()) throw SpecError("output_dir is required");
    std::filesystem::create_directories(config.output_dir);
    write_text(config.output_dir / kConfigFile, format_run_config(config));

    const auto data = prepare_data(config);
    TrainOptions opts = extra;
    if (config.checkpoints && opts.checkpoint_dir.empty()) opts.checkpoint_dir = config.output_dir / kCheckpointDir;

    auto result = train(config, data, opts);
    rotation::write_trace_csv(config.output_dir / kTraceFile, result.trace);
    write_run_log(config.output_dir / kLogFile, result.log);
    write_text(config.output_dir / kPlotFile, plot_csv(result.log));
    return result;
}

std::vector<OracleEntry> cmd_oracle_sweep(const RunConfig& config, const std::filesystem::path& run_dir,
                                          std::vector<int> candidates) {
    const auto ckpt_dir = run_dir / kCheckpointDir;
    if (!std::filesystem::is_directory(ckpt_dir)) throw Error("no checkpoints under " + run_dir.string());
    if (candidates.empty()) {
        candidates.resize(static_cast<std::size_t>(config.epochs) + 1);
        std::iota(candidates.begin(), candidates.end(), 0);
    }
    for (int i : candidates)
        if (!std::filesystem::exists(nn::checkpoint_path(ckpt_dir, i)))
            throw Error("missing checkpoint " + nn::checkpoint_path(ckpt_dir, i).string());
    const auto data = prepare_data(config);
    rotation::RotationTrace trace;
    if (std::filesystem::exists(run_dir / kTraceFile)) trace = rotation::read_trace_csv(run_dir / kTraceFile);
    auto entries = oracle_sweep(config, data, ckpt_dir, candidates, trace);
    write_text(run_dir / kSweepFile, sweep_csv(entries));
    return entries;
}

std::optional<detect::DetectionEvent> cmd_detect(const std::filesystem::path& trace_path,
                                                 const detect::DetectorConfig& config) {
    return detect::detect_offline(rotation::read_trace_csv(trace_path), config);
}

report::RunReport compare_logs(const TrainRunLog& run, const TrainRunLog& baseline, std::string label,
                               const report::EmissionAssumptions& assumptions) {
    for (const auto* log : {&run, &baseline})
        if (log->header.start_epoch != 0 || log->epochs.size() != static_cast<std::size_t>(log->header.total_epochs))
            throw StateError("report needs complete logs");
    if (run.header.total_epochs != baseline.header.total_epochs || run.header.train_size != baseline.header.train_size)
        throw StateError("logs describe different tasks");
    const double cost = static_cast<double>(run.total_samples()) / static_cast<double>(baseline.total_samples());
    return report::make_report(std::move(label), baseline.final_accuracy(), run.final_accuracy(), cost,
                               baseline.wall_seconds(), run.wall_seconds(), assumptions);
}

report::RunReport cmd_report(const std::filesystem::path& run_log, const std::filesystem::path& baseline_log,
                             const report::EmissionAssumptions& assumptions, const std::filesystem::path& out_dir,
                             std::string label) {
    const auto r = compare_logs(read_run_log(run_log), read_run_log(baseline_log), std::move(label), assumptions);
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        write_text(out_dir / kReportFile, report::to_json(r) + "\n");
        write_text(out_dir / kTableFile, report::comparison_table(std::span(&r, 1)));
    }
    return r;
}

} // namespace clp::harness
