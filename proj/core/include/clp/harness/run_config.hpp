// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "clp/data/augment.hpp"
#include "clp/data/dataset.hpp"
#include "clp/data/loaders.hpp"
#include "clp/detect/detector.hpp"
#include "clp/nn/checkpoint.hpp"
#include "clp/nn/model_spec.hpp"
#include "clp/nn/optimizer.hpp"
#include "clp/schedule/schedule.hpp"

namespace clp::harness {

/// Everything that determines a training run. Seeds are always explicit.
///
/// Text form: one `key = value` per line, `#` comments. Keys:
///
///   model            layer list for ModelSpec::parse (empty: MLP from `hidden`)
///   hidden           comma-separated hidden widths of the default MLP (64,64)
///   data.format      idx | csv | synthetic-spec
///   data.path        dataset file (idx images, csv, or synthetic spec file)
///   data.labels      idx labels file
///   data.synthetic   inline synthetic spec, `;`-separated, instead of data.path
///   val_fraction     hold-out share carved from the data (0.1)
///   optimizer        sgd | adamw | rmsprop | adagrad
///   lr, momentum, beta1, beta2, rho, epsilon, weight_decay
///   lr_decay_epochs  comma list; default N/2 and 3N/4
///   lr_decay_divisor (10)
///   epochs, batch_size
///   seed.init, seed.data, seed.augment
///   mode             static-baseline | reduce-at-critical | prune-anneal
///   k_pre, k_post, k_prune, delta
///   detector.window, detector.threshold, detector.epoch_norm,
///   detector.distance_norm, detector.arm (true/false)
///   augment.flip_p, augment.crop_p, augment.crop_padding, augment.rotation_p,
///   augment.rotation_degrees, augment.translation_p, augment.translation_fraction
///   output_dir, checkpoints (true/false)
struct RunConfig {
    std::string model;
    std::vector<std::size_t> hidden = {64, 64};
    data::DataSource data;
    std::string synthetic_inline;
    double val_fraction = 0.1;
    nn::OptimizerConfig optimizer;
    int epochs = 200;
    std::size_t batch_size = 128;
    nn::RunSeeds seeds{1, 2, 3};
    schedule::ScheduleParams schedule;
    detect::DetectorConfig detector;
    data::AugmentPolicy augment = data::AugmentPolicy::basic();
    std::filesystem::path output_dir;
    bool checkpoints = false;

    /// Syncs epoch counts into the schedule/detector and validates every part.
    void validate() const;

    bool operator==(const RunConfig&) const = default;
};

/// Step decay at N/2 and 3N/4, the 200-epoch recipe (100, 150) scaled to N.
nn::StepDecay proportional_step_decay(int total_epochs, double divisor = 10.0);

/// Applies `key = value` lines on top of `base`. Throws FormatError with the
/// offending line number for unknown keys or unparsable values.
RunConfig parse_run_config(std::string_view text, RunConfig base = {});
RunConfig load_run_config(const std::filesystem::path& path, RunConfig base = {});

/// Applies one assignment, e.g. from a command-line override.
void set_config_value(RunConfig& config, std::string_view key, std::string_view value);

/// Every key accepted by set_config_value, in documentation order.
const std::vector<std::string>& config_keys();

/// Inverse of parse_run_config for every key (round-trips).
std::string format_run_config(const RunConfig& config);

/// Copies N into the schedule and detector and fills the default decay epochs.
RunConfig resolve(RunConfig config, bool fill_default_decay = true);

/// Loaded data with the deterministic validation split applied.
struct PreparedData {
    data::Dataset train;
    data::Dataset validation;
};

PreparedData prepare_data(const RunConfig& config);

/// ModelSpec for the prepared data: `model` if set, otherwise the default MLP.
nn::ModelSpec build_model_spec(const RunConfig& config, const data::Dataset& train);

} // namespace clp::harness
