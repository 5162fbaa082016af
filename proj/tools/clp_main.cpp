// SPDX-License-Identifier: Apache-2.0
// clp: train with live critical-period detection, sweep oracle switch epochs,
// replay detection on stored traces, and compare runs.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "clp/error.hpp"
#include "clp/harness/commands.hpp"

namespace {

using namespace clp;

struct ConfigArgs {
    std::string config_file;
    std::map<std::string, std::string> values;
};

void add_config_options(CLI::App* cmd, ConfigArgs& args) {
    cmd->add_option("-c,--config", args.config_file, "key = value config file")->check(CLI::ExistingFile);
    for (const auto& key : harness::config_keys())
        cmd->add_option("--" + key, args.values[key], "overrides config key '" + key + "'");
}

harness::RunConfig assemble_config(const ConfigArgs& args, CLI::App* cmd) {
    std::string text;
    if (!args.config_file.empty()) {
        std::ifstream in(args.config_file);
        std::ostringstream os;
        os << in.rdbuf();
        text = os.str();
    }
    for (const auto& key : harness::config_keys())
        if (cmd->count("--" + key) > 0) text += "\n" + key + " = " + args.values.at(key);
    return harness::parse_run_config(text);
}

int run_train(const ConfigArgs& args, CLI::App* cmd, bool quiet) {
    const auto config = assemble_config(args, cmd);
    harness::TrainOptions opts;
    if (!quiet)
        opts.on_epoch = [](const harness::EpochRecord& r) {
            std::fprintf(stderr, "epoch %4d  k=%-6g loss=%.4f  acc=%.4f  dist=%.6f  alpha=%s\n", r.epoch, r.k,
                         r.train_loss, r.val_accuracy, r.cosine_distance,
                         r.alpha ? std::to_string(*r.alpha).c_str() : "-");
        };
    const auto result = harness::cmd_train(config, opts);
    const auto& log = result.log;
    std::printf("final_accuracy %.6f\n", log.final_accuracy());
    std::printf("total_samples %zu\n", log.total_samples());
    if (log.detection)
        std::printf("detected epoch %d, switch at %d\n", log.detection->epoch, log.detection->epoch + 1);
    else
        std::printf("no detection\n");
    std::printf("outputs in %s\n", config.output_dir.string().c_str());
    return 0;
}

std::vector<int> parse_candidates(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(std::stoi(item));
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Critical learning period detection and recipe scheduling"};
    app.require_subcommand(1);

    ConfigArgs train_args;
    bool quiet = false;
    auto* train = app.add_subcommand("train", "train one run, writing trace, log and optional checkpoints");
    add_config_options(train, train_args);
    train->add_flag("-q,--quiet", quiet, "no per-epoch progress");

    std::string run_dir, candidates;
    auto* sweep = app.add_subcommand("oracle-sweep", "resume a checkpointed k_pre run at each candidate switch epoch");
    sweep->add_option("--run-dir", run_dir, "output directory of a train run with checkpoints = true")
        ->required()
        ->check(CLI::ExistingDirectory);
    sweep->add_option("--candidates", candidates, "comma-separated switch epochs (default: 0..N)");

    std::string trace_path;
    detect::DetectorConfig det;
    std::optional<double> epoch_norm;
    bool no_arm = false;
    auto* detect_cmd = app.add_subcommand("detect", "replay the detector over a trace CSV");
    detect_cmd->add_option("--trace", trace_path, "epoch,cosine_distance CSV")->required()->check(CLI::ExistingFile);
    detect_cmd->add_option("--epochs", det.total_epochs, "N, the default epoch normalizer")->capture_default_str();
    detect_cmd->add_option("--window", det.window, "points per regression window")->capture_default_str();
    detect_cmd->add_option("--threshold", det.threshold_degrees, "angle threshold in degrees")->capture_default_str();
    detect_cmd->add_option("--epoch-norm", epoch_norm, "epoch normalizer (default N)");
    detect_cmd->add_option("--distance-norm", det.distance_norm, "distance normalizer")->capture_default_str();
    detect_cmd->add_flag("--no-arm", no_arm, "fire on the first sub-threshold window");

    std::string run_log, baseline_log, out_dir, label = "run", price_unit = "kwh";
    report::EmissionAssumptions assumptions;
    auto* report_cmd = app.add_subcommand("report", "compare a run log with a baseline log");
    report_cmd->add_option("--run", run_log, "log.jsonl of the run")->required()->check(CLI::ExistingFile);
    report_cmd->add_option("--baseline", baseline_log, "log.jsonl of the baseline")->required()->check(CLI::ExistingFile);
    report_cmd->add_option("--out", out_dir, "directory for report.json and report.txt");
    report_cmd->add_option("--label", label, "column label")->capture_default_str();
    report_cmd->add_option("--power-watts", assumptions.power_watts)->capture_default_str();
    report_cmd->add_option("--carbon-kg-per-kwh", assumptions.carbon_kg_per_kwh)->capture_default_str();
    report_cmd->add_option("--price", assumptions.price)->capture_default_str();
    report_cmd->add_option("--price-unit", price_unit)->check(CLI::IsMember({"kwh", "hour"}))->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*train) return run_train(train_args, train, quiet);
        if (*sweep) {
            const auto config = harness::load_run_config(std::filesystem::path(run_dir) / harness::kConfigFile);
            const auto entries = harness::cmd_oracle_sweep(config, run_dir, parse_candidates(candidates));
            std::cout << harness::sweep_csv(entries);
            return 0;
        }
        if (*detect_cmd) {
            det.epoch_norm = epoch_norm;
            det.arm_before_fire = !no_arm;
            det.validate();
            if (const auto ev = harness::cmd_detect(trace_path, det))
                std::printf("fired at epoch %d; switch epoch %d\n", ev->epoch, ev->epoch + 1);
            else
                std::printf("none\n");
            return 0;
        }
        if (*report_cmd) {
            assumptions.price_unit = price_unit == "hour" ? report::PriceUnit::per_hour : report::PriceUnit::per_kwh;
            const auto r = harness::cmd_report(run_log, baseline_log, assumptions, out_dir, label);
            std::cout << report::comparison_table(std::span(&r, 1));
            std::printf("energy %.6f kWh  CO2 %.6f kg  cost %.6f (baseline %.6f kWh)\n", r.energy_kwh, r.co2_kg, r.money,
                        r.baseline_energy_kwh);
            return 0;
        }
    } catch (const clp::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
