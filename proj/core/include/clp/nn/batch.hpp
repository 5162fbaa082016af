// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

namespace clp::nn {

/// A minibatch: `labels.size()` samples laid out back to back in `inputs`.
struct Batch {
    std::vector<float> inputs;
    std::vector<std::int32_t> labels;

    std::size_t size() const noexcept { return labels.size(); }

    bool operator==(const Batch&) const = default;
};

} // namespace clp::nn
