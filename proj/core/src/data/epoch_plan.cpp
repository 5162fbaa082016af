// SPDX-License-Identifier: Apache-2.0
#include "clp/data/epoch_plan.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "clp/error.hpp"
#include "clp/rng.hpp"

namespace clp::data {

namespace {
constexpr std::uint64_t kSubsetStream = 0x5ab5e7;
constexpr std::uint64_t kShuffleStream = 0x5f1e;
constexpr std::uint64_t kTransformStream = 0x7a4f;
} // namespace

std::size_t plan_size(double k, std::size_t n) {
    if (!(k > 0.0) || !std::isfinite(k)) throw SpecError("augmentation factor k must be positive");
    return static_cast<std::size_t>(std::llround(k * static_cast<double>(n)));
}

EpochDataPlan plan_epoch(std::size_t n, double k, std::uint64_t data_seed, std::uint64_t augment_seed, int epoch) {
    const std::size_t total = plan_size(k, n);
    if (total == 0) throw SpecError("empty epoch: round(k * n) is 0 for k=" + std::to_string(k) + ", n=" + std::to_string(n));

    EpochDataPlan plan;
    plan.epoch = epoch;
    plan.k = k;
    plan.data_seed = data_seed;
    plan.indices.reserve(total);

    const auto passes = std::min(static_cast<std::size_t>(std::floor(k)), total / std::max<std::size_t>(n, 1));
    for (std::size_t p = 0; p < passes; ++p)
        for (std::size_t i = 0; i < n; ++i) plan.indices.push_back(static_cast<std::uint32_t>(i));

    const std::size_t extra = total - plan.indices.size();
    if (extra > 0) {
        // partial Fisher-Yates: the first `extra` slots become a uniform subset
        std::vector<std::uint32_t> pool(n);
        std::iota(pool.begin(), pool.end(), 0u);
        auto engine = rng::make_engine(rng::derive(data_seed, {kSubsetStream, static_cast<std::uint64_t>(epoch)}));
        for (std::size_t i = 0; i < extra; ++i) {
            const std::size_t j = i + rng::uniform_index(engine, n - i);
            std::swap(pool[i], pool[j]);
        }
        std::sort(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(extra));
        plan.indices.insert(plan.indices.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(extra));
    }

    plan.transform_seeds.resize(total);
    for (std::size_t j = 0; j < total; ++j)
        plan.transform_seeds[j] = rng::derive(augment_seed, {kTransformStream, static_cast<std::uint64_t>(epoch), j});
    return plan;
}

BatchStream::BatchStream(const Dataset& dataset, const EpochDataPlan& plan, AugmentPolicy policy, std::size_t batch_size)
    : dataset_(&dataset), plan_(&plan), policy_(policy), batch_size_(batch_size) {
    if (batch_size == 0) throw SpecError("batch size must be at least 1");
    policy_.validate();
    for (auto i : plan.indices)
        if (i >= dataset.size()) throw ShapeError("plan index " + std::to_string(i) + " outside the dataset");
    order_.resize(plan.size());
    std::iota(order_.begin(), order_.end(), 0u);
    auto engine = rng::make_engine(rng::derive(plan.data_seed, {kShuffleStream, static_cast<std::uint64_t>(plan.epoch)}));
    rng::shuffle(order_, engine);
}

std::optional<nn::Batch> BatchStream::next() {
    if (cursor_ >= order_.size()) return std::nullopt;
    const std::size_t count = std::min(batch_size_, order_.size() - cursor_);
    nn::Batch batch;
    batch.inputs.reserve(count * dataset_->sample_size());
    batch.labels.reserve(count);
    for (std::size_t b = 0; b < count; ++b) {
        const std::uint32_t slot = order_[cursor_ + b];
        const std::uint32_t idx = plan_->indices[slot];
        const auto augmented =
            augment_sample(dataset_->sample(idx), dataset_->sample_shape, policy_, plan_->transform_seeds[slot]);
        batch.inputs.insert(batch.inputs.end(), augmented.begin(), augmented.end());
        batch.labels.push_back(dataset_->labels[idx]);
    }
    cursor_ += count;
    return batch;
}

} // namespace clp::data
