// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "clp/data/augment.hpp"
#include "clp/data/dataset.hpp"
#include "clp/nn/batch.hpp"

namespace clp::data {

/// round(k * n), halves away from zero.
std::size_t plan_size(double k, std::size_t n);

/// What one epoch trains on, before shuffling. Every entry carries its own
/// transform seed, so repeated copies of a sample are augmented independently.
struct EpochDataPlan {
    int epoch = 0;
    double k = 1.0;
    std::uint64_t data_seed = 0;
    std::vector<std::uint32_t> indices;
    std::vector<std::uint64_t> transform_seeds;

    std::size_t size() const noexcept { return indices.size(); }
};

/// floor(k) full passes over [0, n), plus a uniform subset drawn without
/// replacement for the fractional part, for round(k * n) entries in total.
/// k < 1 therefore resamples a fresh random subset every epoch. The subset and
/// the shuffle depend on (data_seed, epoch); transform seeds on (augment_seed, epoch, slot).
/// Throws SpecError for k <= 0 or an empty epoch.
EpochDataPlan plan_epoch(std::size_t n, double k, std::uint64_t data_seed, std::uint64_t augment_seed, int epoch);

inline EpochDataPlan plan_epoch(const Dataset& dataset, double k, std::uint64_t run_seed, int epoch) {
    return plan_epoch(dataset.size(), k, run_seed, run_seed, epoch);
}

/// Lazily turns a plan into augmented minibatches. The plan order is permuted
/// with a seed derived from (data_seed, epoch); batches hold `batch_size`
/// samples except possibly the last.
class BatchStream {
public:
    BatchStream(const Dataset& dataset, const EpochDataPlan& plan, AugmentPolicy policy, std::size_t batch_size);

    /// Next batch, or nullopt when the epoch is exhausted.
    std::optional<nn::Batch> next();

    std::size_t batch_count() const noexcept { return (order_.size() + batch_size_ - 1) / batch_size_; }
    const std::vector<std::uint32_t>& order() const noexcept { return order_; }

private:
    const Dataset* dataset_;
    const EpochDataPlan* plan_;
    AugmentPolicy policy_;
    std::size_t batch_size_;
    std::vector<std::uint32_t> order_;
    std::size_t cursor_ = 0;
};

inline BatchStream materialize_batches(const Dataset& dataset, const EpochDataPlan& plan, const AugmentPolicy& policy,
                                       std::size_t batch_size) {
    return BatchStream(dataset, plan, policy, batch_size);
}

} // namespace clp::data
