// SPDX-License-Identifier: Apache-2.0
#include "clp/data/loaders.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "clp/error.hpp"
#include "clp/rng.hpp"

namespace clp::data {

DataFormat parse_data_format(std::string_view name) {
    if (name == "idx") return DataFormat::idx;
    if (name == "csv") return DataFormat::csv;
    if (name == "synthetic" || name == "synthetic-spec") return DataFormat::synthetic;
    throw SpecError("unknown data format '" + std::string(name) + "'");
}

std::string_view to_string(DataFormat format) {
    switch (format) {
    case DataFormat::idx: return "idx";
    case DataFormat::csv: return "csv";
    case DataFormat::synthetic: return "synthetic-spec";
    }
    return "?";
}

namespace {

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

template <typename T>
T parse_number(std::string_view text, std::string_view what, std::size_t line) {
    T value{};
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end || text.empty())
        throw FormatError("cannot parse " + std::string(what) + " '" + std::string(text) + "'", line);
    return value;
}

} // namespace

Dataset load_dataset(const DataSource& source) {
    switch (source.format) {
    case DataFormat::idx:
        if (source.labels_path.empty()) throw SpecError("idx datasets need a labels file");
        return load_idx(source.path, source.labels_path);
    case DataFormat::csv: return load_csv(source.path);
    case DataFormat::synthetic: return generate_synthetic(parse_synthetic_spec(read_text(source.path)));
    }
    throw SpecError("unknown data format");
}

// ---- IDX --------------------------------------------------------------------

IdxArray read_idx(std::istream& in) {
    unsigned char header[4];
    if (!in.read(reinterpret_cast<char*>(header), 4)) throw FormatError("idx: file shorter than its magic number");
    IdxArray out;
    out.magic = (std::uint32_t{header[0]} << 24) | (std::uint32_t{header[1]} << 16) | (std::uint32_t{header[2]} << 8) |
                std::uint32_t{header[3]};
    if (header[0] != 0 || header[1] != 0) throw FormatError("idx: bad magic, leading bytes must be zero");
    if (header[2] != 0x08) throw FormatError("idx: only unsigned-byte (0x08) payloads are supported");
    const unsigned rank = header[3];
    if (rank == 0) throw FormatError("idx: zero-dimensional array");
    std::size_t total = 1;
    for (unsigned i = 0; i < rank; ++i) {
        unsigned char d[4];
        if (!in.read(reinterpret_cast<char*>(d), 4)) throw FormatError("idx: truncated dimension list");
        const std::uint32_t dim =
            (std::uint32_t{d[0]} << 24) | (std::uint32_t{d[1]} << 16) | (std::uint32_t{d[2]} << 8) | std::uint32_t{d[3]};
        out.dims.push_back(dim);
        total *= dim;
    }
    out.data.resize(total);
    if (total > 0 && !in.read(reinterpret_cast<char*>(out.data.data()), static_cast<std::streamsize>(total)))
        throw FormatError("idx: payload shorter than the declared dimensions");
    if (in.peek() != std::char_traits<char>::eof()) throw FormatError("idx: trailing bytes after payload");
    return out;
}

IdxArray read_idx(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    return read_idx(in);
}

Dataset make_idx_dataset(const IdxArray& images, const IdxArray& labels, std::string provenance) {
    if (images.magic != 0x00000803 || images.dims.size() != 3)
        throw FormatError("idx images need magic 0x00000803 and dims (n, h, w)");
    if (labels.magic != 0x00000801 || labels.dims.size() != 1)
        throw FormatError("idx labels need magic 0x00000801 and dims (n)");
    if (images.dims[0] != labels.dims[0]) throw FormatError("idx image and label counts differ");
    Dataset ds;
    ds.sample_shape = {images.dims[1], images.dims[2]};
    ds.samples.resize(images.data.size());
    std::transform(images.data.begin(), images.data.end(), ds.samples.begin(),
                   [](std::uint8_t v) { return static_cast<float>(v) / 255.0f; });
    ds.labels.assign(labels.data.begin(), labels.data.end());
    const auto max_label = ds.labels.empty() ? 0 : *std::max_element(ds.labels.begin(), ds.labels.end());
    ds.classes = static_cast<std::size_t>(max_label) + 1;
    ds.provenance = std::move(provenance);
    ds.validate();
    return ds;
}

Dataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels) {
    return make_idx_dataset(read_idx(images), read_idx(labels), "idx:" + images.filename().string());
}

// ---- CSV --------------------------------------------------------------------

Dataset load_csv(std::istream& in, std::string provenance) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty()) break;
    }
    if (trim(line).empty()) throw FormatError("csv: missing header row");
    for (auto f : split_fields(line)) header.emplace_back(f);
    const auto label_it = std::find(header.begin(), header.end(), "label");
    if (label_it == header.end()) throw FormatError("csv: no column named 'label'", line_no);
    const std::size_t label_col = static_cast<std::size_t>(label_it - header.begin());
    const std::size_t features = header.size() - 1;
    if (features == 0) throw FormatError("csv: no feature columns", line_no);

    Dataset ds;
    ds.sample_shape = {features};
    ds.provenance = std::move(provenance);
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != header.size())
            throw FormatError("csv: row has " + std::to_string(fields.size()) + " fields, header has " +
                              std::to_string(header.size()),
                              line_no);
        for (std::size_t c = 0; c < fields.size(); ++c) {
            if (c == label_col) {
                const auto y = parse_number<std::int32_t>(fields[c], "label", line_no);
                if (y < 0) throw FormatError("csv: negative label", line_no);
                ds.labels.push_back(y);
            } else {
                const auto v = parse_number<double>(fields[c], "feature", line_no);
                if (!std::isfinite(v)) throw FormatError("csv: non-finite feature", line_no);
                ds.samples.push_back(static_cast<float>(v));
            }
        }
    }
    if (ds.labels.empty()) throw FormatError("csv: no data rows");
    ds.classes = static_cast<std::size_t>(*std::max_element(ds.labels.begin(), ds.labels.end())) + 1;

    const auto [lo_it, hi_it] = std::minmax_element(ds.samples.begin(), ds.samples.end());
    const float lo = *lo_it, hi = *hi_it;
    if (lo < 0.0f || hi > 1.0f) {
        const double span = hi > lo ? static_cast<double>(hi) - lo : 1.0;
        for (float& v : ds.samples) v = static_cast<float>((static_cast<double>(v) - lo) / span);
    }
    ds.validate();
    return ds;
}

Dataset load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    return load_csv(in, "csv:" + path.filename().string());
}

// ---- synthetic --------------------------------------------------------------

SyntheticSpec parse_synthetic_spec(std::string_view text) {
    SyntheticSpec spec;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw FormatError("synthetic spec: expected key = value", line_no);
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (key == "kind") spec.kind = std::string(value);
        else if (key == "n") spec.n = parse_number<std::size_t>(value, "n", line_no);
        else if (key == "classes") spec.classes = parse_number<std::size_t>(value, "classes", line_no);
        else if (key == "dim") spec.dim = parse_number<std::size_t>(value, "dim", line_no);
        else if (key == "seed") spec.seed = parse_number<std::uint64_t>(value, "seed", line_no);
        else if (key == "noise") spec.noise = parse_number<double>(value, "noise", line_no);
        else if (key == "jitter") spec.jitter = parse_number<int>(value, "jitter", line_no);
        else if (key == "bumps") spec.bumps = parse_number<std::size_t>(value, "bumps", line_no);
        else throw FormatError("synthetic spec: unknown key '" + std::string(key) + "'", line_no);
    }
    if (spec.kind != "blobs" && spec.kind != "image-blobs")
        throw FormatError("synthetic spec: unknown kind '" + spec.kind + "'");
    if (spec.n == 0 || spec.classes < 2 || spec.dim == 0) throw FormatError("synthetic spec: need n >= 1, classes >= 2, dim >= 1");
    if (spec.noise < 0.0) throw FormatError("synthetic spec: negative noise");
    return spec;
}

namespace {

std::vector<std::int32_t> balanced_labels(std::size_t n, std::size_t classes, rng::Engine& engine) {
    std::vector<std::int32_t> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<std::int32_t>(i % classes);
    rng::shuffle(labels, engine);
    return labels;
}

float clamp01(double v) { return static_cast<float>(std::clamp(v, 0.0, 1.0)); }

Dataset generate_blobs(const SyntheticSpec& spec) {
    auto engine = rng::make_engine(rng::derive(spec.seed, {0xb10b5}));
    std::vector<double> centres(spec.classes * spec.dim);
    for (double& c : centres) c = rng::uniform(engine, 0.25, 0.75);
    Dataset ds;
    ds.sample_shape = {spec.dim};
    ds.classes = spec.classes;
    ds.labels = balanced_labels(spec.n, spec.classes, engine);
    ds.samples.resize(spec.n * spec.dim);
    for (std::size_t i = 0; i < spec.n; ++i) {
        const double* centre = centres.data() + static_cast<std::size_t>(ds.labels[i]) * spec.dim;
        for (std::size_t j = 0; j < spec.dim; ++j)
            ds.samples[i * spec.dim + j] = clamp01(centre[j] + spec.noise * rng::normal(engine));
    }
    return ds;
}

Dataset generate_image_blobs(const SyntheticSpec& spec) {
    const std::size_t side = spec.dim;
    const int jitter = spec.jitter >= 0 ? spec.jitter : std::max(1, static_cast<int>(side / 8));
    auto engine = rng::make_engine(rng::derive(spec.seed, {0x1b10b5}));

    // Prototype images rendered on a canvas with a `jitter` margin so shifted
    // copies stay smooth at the border.
    const std::size_t canvas = side + 2 * static_cast<std::size_t>(jitter);
    std::vector<double> protos(spec.classes * canvas * canvas, 0.0);
    for (std::size_t c = 0; c < spec.classes; ++c) {
        double* img = protos.data() + c * canvas * canvas;
        for (std::size_t b = 0; b < spec.bumps; ++b) {
            const double cy = rng::uniform(engine, 0.15, 0.85) * static_cast<double>(side - 1) + jitter;
            const double cx = rng::uniform(engine, 0.15, 0.85) * static_cast<double>(side - 1) + jitter;
            const double sigma = rng::uniform(engine, 0.08, 0.18) * static_cast<double>(side);
            const double amp = rng::uniform(engine, 0.5, 1.0);
            for (std::size_t y = 0; y < canvas; ++y)
                for (std::size_t x = 0; x < canvas; ++x) {
                    const double dy = static_cast<double>(y) - cy, dx = static_cast<double>(x) - cx;
                    img[y * canvas + x] += amp * std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
                }
        }
        const double peak = *std::max_element(img, img + canvas * canvas);
        for (std::size_t i = 0; i < canvas * canvas; ++i) img[i] /= peak;
    }

    Dataset ds;
    ds.sample_shape = {1, side, side};
    ds.classes = spec.classes;
    ds.labels = balanced_labels(spec.n, spec.classes, engine);
    ds.samples.resize(spec.n * side * side);
    for (std::size_t i = 0; i < spec.n; ++i) {
        const double* img = protos.data() + static_cast<std::size_t>(ds.labels[i]) * canvas * canvas;
        const bool flip = rng::bernoulli(engine, 0.5);
        const auto sy = static_cast<std::size_t>(rng::uniform_index(engine, 2 * static_cast<std::uint64_t>(jitter) + 1));
        const auto sx = static_cast<std::size_t>(rng::uniform_index(engine, 2 * static_cast<std::uint64_t>(jitter) + 1));
        const double scale = rng::uniform(engine, 0.7, 1.0);
        float* out = ds.samples.data() + i * side * side;
        for (std::size_t y = 0; y < side; ++y)
            for (std::size_t x = 0; x < side; ++x) {
                const std::size_t src_x = flip ? side - 1 - x : x;
                const double v = scale * img[(y + sy) * canvas + src_x + sx];
                out[y * side + x] = clamp01(v + spec.noise * rng::normal(engine));
            }
    }
    return ds;
}

} // namespace

Dataset generate_synthetic(const SyntheticSpec& spec) {
    Dataset ds = spec.kind == "image-blobs" ? generate_image_blobs(spec) : generate_blobs(spec);
    ds.provenance = "synthetic:" + spec.kind + " n=" + std::to_string(spec.n) + " classes=" + std::to_string(spec.classes) +
                    " dim=" + std::to_string(spec.dim) + " seed=" + std::to_string(spec.seed);
    ds.validate();
    return ds;
}

} // namespace clp::data
