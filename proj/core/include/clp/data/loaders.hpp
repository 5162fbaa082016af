// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "clp/data/dataset.hpp"

namespace clp::data {

enum class DataFormat { idx, csv, synthetic };

DataFormat parse_data_format(std::string_view name);
std::string_view to_string(DataFormat format);

struct DataSource {
    DataFormat format = DataFormat::synthetic;
    std::filesystem::path path;
    std::filesystem::path labels_path; // idx only

    bool operator==(const DataSource&) const = default;
};

Dataset load_dataset(const DataSource& source);

// ---- IDX (MNIST-style) ----------------------------------------------------

/// Raw IDX unsigned-byte array: big-endian dimensions after the magic.
struct IdxArray {
    std::uint32_t magic = 0;
    std::vector<std::uint32_t> dims;
    std::vector<std::uint8_t> data;
};

/// Accepts element type 0x08 (unsigned byte) only. Throws FormatError on a bad
/// magic, unsupported type or a payload that does not match the dimensions.
IdxArray read_idx(std::istream& in);
IdxArray read_idx(const std::filesystem::path& path);

/// Images must carry magic 0x00000803 with dims (n, h, w); labels 0x00000801
/// with dims (n). Pixels are scaled by 1/255. Samples keep shape (h, w).
Dataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels);
Dataset make_idx_dataset(const IdxArray& images, const IdxArray& labels, std::string provenance);

// ---- CSV --------------------------------------------------------------------

/// Header row required; the column named "label" holds integer class ids and every
/// other column is a feature. Rows with a different field count are rejected with
/// their line number. If any feature falls outside [0, 1], all features are
/// min-max scaled into [0, 1] with the global minimum and maximum.
Dataset load_csv(std::istream& in, std::string provenance = "csv");
Dataset load_csv(const std::filesystem::path& path);

// ---- synthetic --------------------------------------------------------------

/// Key-value block, one `key = value` per line, `#` starts a comment:
///
///   kind    = blobs | image-blobs
///   n       = sample count
///   classes = class count
///   dim     = feature count (blobs) or image side (image-blobs)
///   seed    = generator seed
///   noise   = per-value Gaussian noise standard deviation
///   jitter  = image-blobs only: max nuisance shift in pixels (default max(1, dim / 8))
///   bumps   = image-blobs only: Gaussian bumps per class prototype (default 3)
struct SyntheticSpec {
    std::string kind = "blobs";
    std::size_t n = 200;
    std::size_t classes = 2;
    std::size_t dim = 2;
    std::uint64_t seed = 0;
    double noise = 0.1;
    int jitter = -1;
    std::size_t bumps = 3;
};

SyntheticSpec parse_synthetic_spec(std::string_view text);

/// blobs: one Gaussian cluster per class with centres uniform in [0.25, 0.75]^dim.
/// image-blobs: 1 x dim x dim images; each class owns a prototype made of smooth
/// Gaussian bumps and every sample is that prototype under a random horizontal
/// flip, a random shift of up to `jitter` pixels, an intensity scale in [0.7, 1]
/// and additive pixel noise. Classes are balanced, order is shuffled, values are
/// clamped to [0, 1].
Dataset generate_synthetic(const SyntheticSpec& spec);

} // namespace clp::data
