// SPDX-License-Identifier: Apache-2.0
#include "clp/nn/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "clp/error.hpp"

namespace clp::nn {

namespace {

constexpr std::array<char, 8> kMagic = {'C', 'L', 'P', 'C', 'K', 'P', 'T', '\0'};

class Writer {
public:
    void bytes(const void* data, std::size_t n) {
        const auto* p = static_cast<const std::byte*>(data);
        out_.insert(out_.end(), p, p + n);
    }
    template <typename T>
    void le(T value) {
        for (std::size_t i = 0; i < sizeof(T); ++i) out_.push_back(static_cast<std::byte>((value >> (8 * i)) & 0xff));
    }
    void buffer(const std::vector<float>& values) {
        le<std::uint64_t>(values.size());
        for (float v : values) le<std::uint32_t>(std::bit_cast<std::uint32_t>(v));
    }
    void params(const ModelParams& p) {
        for (const auto& l : p.layers) {
            buffer(l.weight.values);
            buffer(l.bias.values);
        }
    }
    std::vector<std::byte> take() { return std::move(out_); }

private:
    std::vector<std::byte> out_;
};

class Reader {
public:
    explicit Reader(std::span<const std::byte> in) : in_(in) {}

    void need(std::size_t n) const {
        if (in_.size() - pos_ < n) throw FormatError("checkpoint truncated at byte " + std::to_string(pos_));
    }
    template <typename T>
    T le() {
        need(sizeof(T));
        T v = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(std::to_integer<std::uint8_t>(in_[pos_ + i])) << (8 * i);
        pos_ += sizeof(T);
        return v;
    }
    void magic() {
        need(kMagic.size());
        if (std::memcmp(in_.data() + pos_, kMagic.data(), kMagic.size()) != 0) throw FormatError("not a checkpoint file (bad magic)");
        pos_ += kMagic.size();
    }
    void buffer(std::vector<float>& values) {
        const auto count = le<std::uint64_t>();
        if (count != values.size())
            throw FormatError("checkpoint buffer holds " + std::to_string(count) + " values, model expects " +
                              std::to_string(values.size()));
        need(count * 4);
        for (auto& v : values) v = std::bit_cast<float>(le<std::uint32_t>());
    }
    void params(ModelParams& p) {
        for (auto& l : p.layers) {
            buffer(l.weight.values);
            buffer(l.bias.values);
        }
    }
    bool done() const { return pos_ == in_.size(); }

private:
    std::span<const std::byte> in_;
    std::size_t pos_ = 0;
};

} // namespace

std::vector<std::byte> encode_checkpoint(const Checkpoint& ckpt) {
    Writer w;
    w.bytes(kMagic.data(), kMagic.size());
    w.le<std::uint32_t>(kCheckpointVersion);
    w.le<std::uint64_t>(ckpt.spec_hash);
    w.le<std::uint32_t>(ckpt.epoch);
    w.le<std::uint64_t>(ckpt.seeds.init);
    w.le<std::uint64_t>(ckpt.seeds.data);
    w.le<std::uint64_t>(ckpt.seeds.augment);
    w.le<std::uint32_t>(static_cast<std::uint32_t>(ckpt.optimizer.kind));
    w.le<std::uint64_t>(ckpt.optimizer.step);
    w.le<std::uint32_t>(static_cast<std::uint32_t>(ckpt.optimizer.slots.size()));
    w.le<std::uint32_t>(static_cast<std::uint32_t>(2 * ckpt.params.layers.size()));
    w.params(ckpt.params);
    for (const auto& slot : ckpt.optimizer.slots) w.params(slot);
    return w.take();
}

Checkpoint decode_checkpoint(std::span<const std::byte> bytes, const ModelSpec& spec) {
    Reader r(bytes);
    r.magic();
    if (const auto version = r.le<std::uint32_t>(); version != kCheckpointVersion)
        throw FormatError("unsupported checkpoint version " + std::to_string(version));
    Checkpoint ckpt;
    ckpt.spec_hash = r.le<std::uint64_t>();
    if (ckpt.spec_hash != spec.hash()) throw FormatError("checkpoint was written for a different model");
    ckpt.epoch = r.le<std::uint32_t>();
    ckpt.seeds.init = r.le<std::uint64_t>();
    ckpt.seeds.data = r.le<std::uint64_t>();
    ckpt.seeds.augment = r.le<std::uint64_t>();
    const auto kind = r.le<std::uint32_t>();
    if (kind > static_cast<std::uint32_t>(OptimizerKind::adagrad)) throw FormatError("unknown optimizer kind in checkpoint");
    const auto step = r.le<std::uint64_t>();
    const auto slots = r.le<std::uint32_t>();
    const auto buffers = r.le<std::uint32_t>();
    if (buffers != 2 * spec.layers.size()) throw FormatError("checkpoint buffer count does not match the model");

    ckpt.params = zeros_for(spec);
    r.params(ckpt.params);
    ckpt.optimizer = make_optimizer_state(static_cast<OptimizerKind>(kind), ckpt.params);
    if (ckpt.optimizer.slots.size() != slots) throw FormatError("optimizer slot count does not match its kind");
    ckpt.optimizer.step = step;
    for (auto& slot : ckpt.optimizer.slots) r.params(slot);
    if (!r.done()) throw FormatError("trailing bytes after checkpoint payload");
    return ckpt;
}

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
    const auto bytes = encode_checkpoint(ckpt);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("failed writing " + path.string());
}

Checkpoint read_checkpoint(const std::filesystem::path& path, const ModelSpec& spec) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("missing checkpoint " + path.string());
    std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode_checkpoint(std::as_bytes(std::span<const char>(raw)), spec);
}

std::filesystem::path checkpoint_path(const std::filesystem::path& dir, int epoch) {
    char name[32];
    std::snprintf(name, sizeof name, "ckpt_%05d.bin", epoch);
    return dir / name;
}

} // namespace clp::nn
