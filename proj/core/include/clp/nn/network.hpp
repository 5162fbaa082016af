// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "clp/data/dataset.hpp"
#include "clp/nn/batch.hpp"
#include "clp/nn/params.hpp"

namespace clp::nn {

/// Everything backward() needs from a forward pass. activations[l] is the
/// input of layer l; the final entry holds the logits.
struct ForwardCache {
    std::uint64_t params_digest = 0;
    std::uint64_t spec_hash = 0;
    std::size_t batch_size = 0;
    std::vector<std::vector<double>> activations;
    std::vector<std::int32_t> labels;
};

struct ForwardResult {
    std::vector<double> logits; // batch_size x classes
    double loss = 0.0;          // mean softmax cross-entropy
    ForwardCache cache;
};

/// Runs the stack on a batch. Parameters are stored in 32 bits; activations and
/// every reduction are carried in 64 bits.
ForwardResult forward(const ModelParams& params, const ModelSpec& spec, const Batch& batch);

/// Gradient of the mean batch loss with respect to every parameter buffer.
/// Throws StateError if `cache` was produced with other parameters or another model.
ModelParams backward(const ModelParams& params, const ModelSpec& spec, const ForwardCache& cache);

/// d(mean loss)/d(logits) for softmax cross-entropy: (softmax - onehot) / batch.
std::vector<double> loss_gradient(std::span<const double> logits, std::span<const std::int32_t> labels,
                                  std::size_t classes);

/// Mean softmax cross-entropy, computed with the max-shift for stability.
double cross_entropy(std::span<const double> logits, std::span<const std::int32_t> labels, std::size_t classes);

/// Logits for `count` samples stored back to back in `inputs`.
std::vector<double> predict_logits(const ModelParams& params, const ModelSpec& spec, std::span<const float> inputs,
                                   std::size_t count);

/// Index of the largest logit; ties go to the lowest class index.
std::size_t argmax(std::span<const double> logits);

/// Fraction of samples whose argmax prediction equals the label.
/// Throws ShapeError on an empty dataset.
double evaluate(const ModelParams& params, const ModelSpec& spec, const data::Dataset& dataset);

} // namespace clp::nn
