// SPDX-License-Identifier: Apache-2.0
#include "clp/data/dataset.hpp"

#include <cmath>
#include <numeric>

#include "clp/error.hpp"
#include "clp/rng.hpp"

namespace clp::data {

void Dataset::validate() const {
    if (size() == 0) throw FormatError("dataset is empty");
    if (sample_size() == 0) throw FormatError("dataset has an empty sample shape");
    if (samples.size() != size() * sample_size())
        throw FormatError("dataset holds " + std::to_string(samples.size()) + " values for " + std::to_string(size()) +
                          " samples of shape " + nn::shape_string(sample_shape));
    if (classes == 0) throw FormatError("dataset declares zero classes");
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= classes)
            throw FormatError("label " + std::to_string(labels[i]) + " of sample " + std::to_string(i) +
                              " outside [0, " + std::to_string(classes) + ")");
}

Dataset subset(const Dataset& source, std::span<const std::size_t> indices, std::string provenance) {
    Dataset out;
    out.sample_shape = source.sample_shape;
    out.classes = source.classes;
    out.provenance = std::move(provenance);
    const std::size_t d = source.sample_size();
    out.samples.reserve(indices.size() * d);
    out.labels.reserve(indices.size());
    for (std::size_t i : indices) {
        if (i >= source.size()) throw ShapeError("subset index " + std::to_string(i) + " out of range");
        const auto s = source.sample(i);
        out.samples.insert(out.samples.end(), s.begin(), s.end());
        out.labels.push_back(source.labels[i]);
    }
    return out;
}

std::pair<Dataset, Dataset> split_validation(const Dataset& source, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction < 1.0)) throw SpecError("validation fraction must lie in (0, 1)");
    const std::size_t n = source.size();
    const auto n_val = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
    if (n_val == 0 || n_val >= n) throw SpecError("validation split leaves an empty side");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto engine = rng::make_engine(rng::derive(seed, {0x5b117}));
    rng::shuffle(order, engine);
    std::span<const std::size_t> all(order);
    Dataset val = subset(source, all.first(n_val), source.provenance + " [validation]");
    Dataset train = subset(source, all.subspan(n_val), source.provenance + " [train]");
    return {std::move(train), std::move(val)};
}

} // namespace clp::data
