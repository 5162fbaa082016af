// SPDX-License-Identifier: Apache-2.0
#pragma once

// Binary checkpoint layout, every integer and float little-endian:
//
//   magic            8 bytes  "CLPCKPT\0"
//   format version   u32      (currently 1)
//   spec hash        u64      ModelSpec::hash()
//   epoch            u32      number of epochs already trained
//   init seed        u64
//   data seed        u64
//   augment seed     u64
//   optimizer kind   u32      OptimizerKind ordinal
//   optimizer step   u64
//   slot count       u32
//   buffer count     u32      2 per layer (weight, bias); repeated for params and each slot
//   buffers          for params, then each slot, for each layer: weight then bias,
//                    each as u64 element count followed by f32 values

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "clp/nn/model_spec.hpp"
#include "clp/nn/optimizer.hpp"
#include "clp/nn/params.hpp"

namespace clp::nn {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct RunSeeds {
    std::uint64_t init = 0;
    std::uint64_t data = 0;
    std::uint64_t augment = 0;

    bool operator==(const RunSeeds&) const = default;
};

/// Training state at the start of `epoch` (after `epoch` completed epochs).
struct Checkpoint {
    std::uint64_t spec_hash = 0;
    std::uint32_t epoch = 0;
    RunSeeds seeds;
    ModelParams params;
    OptimizerState optimizer;

    bool operator==(const Checkpoint&) const = default;
};

std::vector<std::byte> encode_checkpoint(const Checkpoint& ckpt);

/// Decodes and validates against `spec` (hash and buffer shapes). Throws FormatError.
Checkpoint decode_checkpoint(std::span<const std::byte> bytes, const ModelSpec& spec);

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint read_checkpoint(const std::filesystem::path& path, const ModelSpec& spec);

/// "<dir>/ckpt_00042.bin"
std::filesystem::path checkpoint_path(const std::filesystem::path& dir, int epoch);

} // namespace clp::nn
