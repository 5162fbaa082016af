// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "clp/nn/params.hpp"

namespace clp::nn {

enum class OptimizerKind { sgd, adamw, rmsprop, adagrad };

std::string_view to_string(OptimizerKind kind);
OptimizerKind parse_optimizer_kind(std::string_view name);

/// Piecewise-constant decay: the base rate is divided by `divisor` once for
/// every listed epoch that is <= the current epoch.
struct StepDecay {
    std::vector<int> epochs;
    double divisor = 10.0;

    bool operator==(const StepDecay&) const = default;
};

struct OptimizerConfig {
    OptimizerKind kind = OptimizerKind::sgd;
    double learning_rate = 0.01;
    double momentum = 0.0;      // sgd
    double beta1 = 0.9;         // adamw
    double beta2 = 0.999;       // adamw
    double rho = 0.9;           // rmsprop
    double epsilon = 1e-8;      // adamw, rmsprop, adagrad
    double weight_decay = 0.0;  // decoupled for adamw, L2 on the gradient otherwise
    StepDecay decay;

    /// Throws SpecError on lr <= 0, divisor <= 1, or decay epochs that are not
    /// strictly increasing and below total_epochs.
    void validate(int total_epochs) const;

    double learning_rate_at(int epoch) const;

    bool operator==(const OptimizerConfig&) const = default;
};

/// Per-parameter moment buffers plus the update counter.
/// Slot count: sgd 1 (velocity), adamw 2 (first, second moment), rmsprop 1, adagrad 1.
struct OptimizerState {
    OptimizerKind kind = OptimizerKind::sgd;
    std::uint64_t step = 0;
    std::vector<ModelParams> slots;

    bool operator==(const OptimizerState&) const = default;
};

OptimizerState make_optimizer_state(OptimizerKind kind, const ModelParams& like);

/// Applies one update in place. `grad` must already be the batch mean.
/// Plain sgd computes theta - lr * g with a single rounding to 32 bits.
/// Throws NumericError (before touching anything) if `grad` has a non-finite entry.
void optimizer_step(ModelParams& params, const ModelParams& grad, OptimizerState& state,
                    const OptimizerConfig& config, int epoch);

} // namespace clp::nn
