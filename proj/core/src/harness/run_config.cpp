// SPDX-License-Identifier: Apache-2.0
#include "clp/harness/run_config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "clp/error.hpp"

namespace clp::harness {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

template <typename T>
T parse_value(std::string_view key, std::string_view text) {
    T value{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
        throw FormatError("bad value '" + std::string(text) + "' for " + std::string(key));
    return value;
}

bool parse_bool(std::string_view key, std::string_view text) {
    if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
    if (text == "false" || text == "0" || text == "no" || text == "off") return false;
    throw FormatError("bad boolean '" + std::string(text) + "' for " + std::string(key));
}

template <typename T>
std::vector<T> parse_list(std::string_view key, std::string_view text) {
    std::vector<T> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto comma = text.find(',', pos);
        const auto item = trim(text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
        if (!item.empty()) out.push_back(parse_value<T>(key, item));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <typename T>
std::string join(const std::vector<T>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(xs[i]);
    }
    return out;
}

} // namespace

nn::StepDecay proportional_step_decay(int total_epochs, double divisor) {
    nn::StepDecay d;
    d.divisor = divisor;
    const int a = total_epochs / 2, b = (3 * total_epochs) / 4;
    if (a > 0) d.epochs.push_back(a);
    if (b > a && b < total_epochs) d.epochs.push_back(b);
    return d;
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = {
        "model", "hidden", "data.format", "data.path", "data.labels", "data.synthetic", "val_fraction",
        "optimizer", "lr", "momentum", "beta1", "beta2", "rho", "epsilon", "weight_decay", "lr_decay_epochs",
        "lr_decay_divisor", "epochs", "batch_size", "seed.init", "seed.data", "seed.augment", "mode", "k_pre",
        "k_post", "k_prune", "delta", "detector.window", "detector.threshold", "detector.epoch_norm",
        "detector.distance_norm", "detector.arm", "augment.flip_p", "augment.crop_p", "augment.crop_padding",
        "augment.rotation_p", "augment.rotation_degrees", "augment.translation_p", "augment.translation_fraction",
        "output_dir", "checkpoints"};
    return keys;
}

void set_config_value(RunConfig& c, std::string_view key, std::string_view value) {
    value = trim(value);
    if (key == "model") c.model = std::string(value);
    else if (key == "hidden") c.hidden = parse_list<std::size_t>(key, value);
    else if (key == "data.format") c.data.format = data::parse_data_format(value);
    else if (key == "data.path") c.data.path = std::string(value);
    else if (key == "data.labels") c.data.labels_path = std::string(value);
    else if (key == "data.synthetic") c.synthetic_inline = std::string(value);
    else if (key == "val_fraction") c.val_fraction = parse_value<double>(key, value);
    else if (key == "optimizer") c.optimizer.kind = nn::parse_optimizer_kind(value);
    else if (key == "lr") c.optimizer.learning_rate = parse_value<double>(key, value);
    else if (key == "momentum") c.optimizer.momentum = parse_value<double>(key, value);
    else if (key == "beta1") c.optimizer.beta1 = parse_value<double>(key, value);
    else if (key == "beta2") c.optimizer.beta2 = parse_value<double>(key, value);
    else if (key == "rho") c.optimizer.rho = parse_value<double>(key, value);
    else if (key == "epsilon") c.optimizer.epsilon = parse_value<double>(key, value);
    else if (key == "weight_decay") c.optimizer.weight_decay = parse_value<double>(key, value);
    else if (key == "lr_decay_epochs") c.optimizer.decay.epochs = parse_list<int>(key, value);
    else if (key == "lr_decay_divisor") c.optimizer.decay.divisor = parse_value<double>(key, value);
    else if (key == "epochs") c.epochs = parse_value<int>(key, value);
    else if (key == "batch_size") c.batch_size = parse_value<std::size_t>(key, value);
    else if (key == "seed.init") c.seeds.init = parse_value<std::uint64_t>(key, value);
    else if (key == "seed.data") c.seeds.data = parse_value<std::uint64_t>(key, value);
    else if (key == "seed.augment") c.seeds.augment = parse_value<std::uint64_t>(key, value);
    else if (key == "mode") c.schedule.mode = schedule::parse_schedule_mode(value);
    else if (key == "k_pre") c.schedule.k_pre = parse_value<double>(key, value);
    else if (key == "k_post") c.schedule.k_post = parse_value<double>(key, value);
    else if (key == "k_prune") c.schedule.k_prune = parse_value<double>(key, value);
    else if (key == "delta") c.schedule.delta = parse_value<double>(key, value);
    else if (key == "detector.window") c.detector.window = parse_value<int>(key, value);
    else if (key == "detector.threshold") c.detector.threshold_degrees = parse_value<double>(key, value);
    else if (key == "detector.epoch_norm") {
        if (value == "auto" || value.empty()) c.detector.epoch_norm.reset();
        else c.detector.epoch_norm = parse_value<double>(key, value);
    } else if (key == "detector.distance_norm") c.detector.distance_norm = parse_value<double>(key, value);
    else if (key == "detector.arm") c.detector.arm_before_fire = parse_bool(key, value);
    else if (key == "augment.flip_p") c.augment.flip_p = parse_value<double>(key, value);
    else if (key == "augment.crop_p") c.augment.crop_p = parse_value<double>(key, value);
    else if (key == "augment.crop_padding") c.augment.crop_padding = parse_value<double>(key, value);
    else if (key == "augment.rotation_p") c.augment.rotation_p = parse_value<double>(key, value);
    else if (key == "augment.rotation_degrees") c.augment.rotation_degrees = parse_value<double>(key, value);
    else if (key == "augment.translation_p") c.augment.translation_p = parse_value<double>(key, value);
    else if (key == "augment.translation_fraction") c.augment.translation_fraction = parse_value<double>(key, value);
    else if (key == "output_dir") c.output_dir = std::string(value);
    else if (key == "checkpoints") c.checkpoints = parse_bool(key, value);
    else throw FormatError("unknown config key '" + std::string(key) + "'");
}

RunConfig parse_run_config(std::string_view text, RunConfig base) {
    bool decay_given = false;
    std::size_t line_no = 0, pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw FormatError("config: expected key = value", line_no);
        const auto key = trim(line.substr(0, eq));
        try {
            set_config_value(base, key, line.substr(eq + 1));
        } catch (const Error& e) {
            throw FormatError(std::string("config: ") + e.what(), line_no);
        }
        decay_given = decay_given || key == "lr_decay_epochs";
    }
    return resolve(std::move(base), !decay_given);
}

RunConfig load_run_config(const std::filesystem::path& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return parse_run_config(os.str(), std::move(base));
}

RunConfig resolve(RunConfig c, bool fill_default_decay) {
    c.schedule.total_epochs = c.epochs;
    c.detector.total_epochs = c.epochs;
    if (fill_default_decay && c.optimizer.decay.epochs.empty())
        c.optimizer.decay = proportional_step_decay(c.epochs, c.optimizer.decay.divisor);
    return c;
}

void RunConfig::validate() const {
    if (epochs < 1) throw SpecError("epochs must be at least 1");
    if (batch_size < 1) throw SpecError("batch size must be at least 1");
    if (schedule.total_epochs != epochs || detector.total_epochs != epochs)
        throw SpecError("schedule and detector epoch counts must equal epochs (call resolve)");
    if (!(val_fraction > 0.0 && val_fraction < 1.0)) throw SpecError("val_fraction must lie in (0, 1)");
    optimizer.validate(epochs);
    schedule.validate();
    detector.validate();
    augment.validate();
    if (synthetic_inline.empty() && data.path.empty()) throw SpecError("no dataset configured");
    if (!synthetic_inline.empty() && data.format != data::DataFormat::synthetic)
        throw SpecError("data.synthetic needs data.format = synthetic-spec");
    if (synthetic_inline.empty() && !std::filesystem::exists(data.path))
        throw SpecError("dataset file " + data.path.string() + " does not exist");
    if (data.format == data::DataFormat::idx && !std::filesystem::exists(data.labels_path))
        throw SpecError("labels file " + data.labels_path.string() + " does not exist");
}

std::string format_run_config(const RunConfig& c) {
    std::ostringstream os;
    os << "model = " << c.model << "\n";
    os << "hidden = " << join(c.hidden) << "\n";
    os << "data.format = " << data::to_string(c.data.format) << "\n";
    if (!c.data.path.empty()) os << "data.path = " << c.data.path.string() << "\n";
    if (!c.data.labels_path.empty()) os << "data.labels = " << c.data.labels_path.string() << "\n";
    if (!c.synthetic_inline.empty()) os << "data.synthetic = " << c.synthetic_inline << "\n";
    os << "val_fraction = " << fmt(c.val_fraction) << "\n";
    os << "optimizer = " << nn::to_string(c.optimizer.kind) << "\n";
    os << "lr = " << fmt(c.optimizer.learning_rate) << "\n";
    os << "momentum = " << fmt(c.optimizer.momentum) << "\n";
    os << "beta1 = " << fmt(c.optimizer.beta1) << "\n";
    os << "beta2 = " << fmt(c.optimizer.beta2) << "\n";
    os << "rho = " << fmt(c.optimizer.rho) << "\n";
    os << "epsilon = " << fmt(c.optimizer.epsilon) << "\n";
    os << "weight_decay = " << fmt(c.optimizer.weight_decay) << "\n";
    os << "lr_decay_epochs = " << join(c.optimizer.decay.epochs) << "\n";
    os << "lr_decay_divisor = " << fmt(c.optimizer.decay.divisor) << "\n";
    os << "epochs = " << c.epochs << "\n";
    os << "batch_size = " << c.batch_size << "\n";
    os << "seed.init = " << c.seeds.init << "\n";
    os << "seed.data = " << c.seeds.data << "\n";
    os << "seed.augment = " << c.seeds.augment << "\n";
    os << "mode = " << schedule::to_string(c.schedule.mode) << "\n";
    os << "k_pre = " << fmt(c.schedule.k_pre) << "\n";
    os << "k_post = " << fmt(c.schedule.k_post) << "\n";
    os << "k_prune = " << fmt(c.schedule.k_prune) << "\n";
    os << "delta = " << fmt(c.schedule.delta) << "\n";
    os << "detector.window = " << c.detector.window << "\n";
    os << "detector.threshold = " << fmt(c.detector.threshold_degrees) << "\n";
    os << "detector.epoch_norm = " << (c.detector.epoch_norm ? fmt(*c.detector.epoch_norm) : "auto") << "\n";
    os << "detector.distance_norm = " << fmt(c.detector.distance_norm) << "\n";
    os << "detector.arm = " << (c.detector.arm_before_fire ? "true" : "false") << "\n";
    os << "augment.flip_p = " << fmt(c.augment.flip_p) << "\n";
    os << "augment.crop_p = " << fmt(c.augment.crop_p) << "\n";
    os << "augment.crop_padding = " << fmt(c.augment.crop_padding) << "\n";
    os << "augment.rotation_p = " << fmt(c.augment.rotation_p) << "\n";
    os << "augment.rotation_degrees = " << fmt(c.augment.rotation_degrees) << "\n";
    os << "augment.translation_p = " << fmt(c.augment.translation_p) << "\n";
    os << "augment.translation_fraction = " << fmt(c.augment.translation_fraction) << "\n";
    if (!c.output_dir.empty()) os << "output_dir = " << c.output_dir.string() << "\n";
    os << "checkpoints = " << (c.checkpoints ? "true" : "false") << "\n";
    return os.str();
}

PreparedData prepare_data(const RunConfig& config) {
    data::Dataset full;
    if (!config.synthetic_inline.empty()) {
        std::string text = config.synthetic_inline;
        for (char& ch : text)
            if (ch == ';') ch = '\n';
        full = data::generate_synthetic(data::parse_synthetic_spec(text));
    } else {
        full = data::load_dataset(config.data);
    }
    auto [train, val] = data::split_validation(full, config.val_fraction, config.seeds.data);
    return {std::move(train), std::move(val)};
}

nn::ModelSpec build_model_spec(const RunConfig& config, const data::Dataset& train) {
    if (config.model.empty()) return nn::make_mlp(train.sample_shape, config.hidden, train.classes);
    return nn::ModelSpec::parse(config.model, train.sample_shape, train.classes);
}

} // namespace clp::harness
