// SPDX-License-Identifier: Apache-2.0
#include "clp/harness/run_log.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "clp/error.hpp"

namespace clp::harness {

using nlohmann::ordered_json;

double TrainRunLog::final_accuracy() const {
    if (epochs.empty()) throw StateError("run log has no epochs");
    return epochs.back().val_accuracy;
}

std::size_t TrainRunLog::total_samples() const {
    std::size_t total = 0;
    for (const auto& e : epochs) total += e.samples;
    return total;
}

double TrainRunLog::wall_seconds() const {
    double ms = 0.0;
    for (const auto& e : epochs) ms += e.wall_ms;
    return ms / 1000.0;
}

std::vector<std::size_t> TrainRunLog::samples_per_epoch() const {
    if (header.start_epoch != 0 || epochs.size() != static_cast<std::size_t>(header.total_epochs))
        throw StateError("run log does not cover every epoch");
    std::vector<std::size_t> out;
    out.reserve(epochs.size());
    for (const auto& e : epochs) out.push_back(e.samples);
    return out;
}

std::string to_jsonl(const TrainRunLog& log, bool include_wall_time) {
    std::string out;
    auto emit = [&out](const ordered_json& j) { out += j.dump() + "\n"; };

    const auto& h = log.header;
    emit({{"type", "run"},
          {"mode", h.mode},
          {"total_epochs", h.total_epochs},
          {"start_epoch", h.start_epoch},
          {"baseline_k", h.baseline_k},
          {"train_size", h.train_size},
          {"val_size", h.val_size},
          {"model", h.model},
          {"optimizer", h.optimizer},
          {"seeds", {{"init", h.seeds.init}, {"data", h.seeds.data}, {"augment", h.seeds.augment}}}});

    for (const auto& e : log.epochs) {
        ordered_json j = {{"type", "epoch"},
                          {"epoch", e.epoch},
                          {"k", e.k},
                          {"samples", e.samples},
                          {"learning_rate", e.learning_rate},
                          {"train_loss", e.train_loss},
                          {"val_accuracy", e.val_accuracy},
                          {"cosine_distance", e.cosine_distance}};
        j["alpha"] = e.alpha ? ordered_json(*e.alpha) : ordered_json(nullptr);
        j["wall_ms"] = include_wall_time ? e.wall_ms : 0.0;
        emit(j);
    }

    if (log.detection)
        emit({{"type", "detection"},
              {"epoch", log.detection->epoch},
              {"critical_epoch", log.detection->epoch + 1},
              {"alphas", log.detection->alphas}});

    const auto& s = log.schedule;
    ordered_json phases = ordered_json::array();
    for (const auto& p : s.phases)
        phases.push_back({{"start", p.start}, {"end", p.end}, {"k", p.k}, {"label", schedule::to_string(p.label)}});
    ordered_json sched = {{"type", "schedule"},
                          {"mode", schedule::to_string(s.params.mode)},
                          {"total_epochs", s.params.total_epochs},
                          {"k_pre", s.params.k_pre},
                          {"k_post", s.params.k_post},
                          {"k_prune", s.params.k_prune},
                          {"delta", s.params.delta}};
    sched["critical_epoch"] = s.critical_epoch ? ordered_json(*s.critical_epoch) : ordered_json(nullptr);
    sched["phases"] = phases;
    emit(sched);

    ordered_json summary = {{"type", "summary"},
                            {"epochs_trained", log.epochs.size()},
                            {"total_samples", log.total_samples()}};
    summary["final_accuracy"] = log.epochs.empty() ? ordered_json(nullptr) : ordered_json(log.final_accuracy());
    summary["wall_seconds"] = include_wall_time ? log.wall_seconds() : 0.0;
    emit(summary);
    return out;
}

namespace {

schedule::PhaseLabel parse_label(std::string_view name) {
    for (auto l : {schedule::PhaseLabel::pre_critical, schedule::PhaseLabel::reduced, schedule::PhaseLabel::pruned,
                   schedule::PhaseLabel::annealed_restore})
        if (schedule::to_string(l) == name) return l;
    throw FormatError("unknown phase label '" + std::string(name) + "'");
}

} // namespace

TrainRunLog run_log_from_jsonl(std::string_view text) {
    TrainRunLog log;
    bool saw_run = false, saw_schedule = false;
    std::size_t line_no = 0, pos = 0;
    while (pos < text.size()) {
        const auto nl = text.find('\n', pos);
        const auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            const auto type = j.at("type").get<std::string>();
            if (type == "run") {
                auto& h = log.header;
                h.mode = j.at("mode").get<std::string>();
                h.total_epochs = j.at("total_epochs").get<int>();
                h.start_epoch = j.at("start_epoch").get<int>();
                h.baseline_k = j.at("baseline_k").get<double>();
                h.train_size = j.at("train_size").get<std::size_t>();
                h.val_size = j.at("val_size").get<std::size_t>();
                h.model = j.at("model").get<std::string>();
                h.optimizer = j.at("optimizer").get<std::string>();
                const auto& s = j.at("seeds");
                h.seeds = {s.at("init").get<std::uint64_t>(), s.at("data").get<std::uint64_t>(),
                           s.at("augment").get<std::uint64_t>()};
                saw_run = true;
            } else if (type == "epoch") {
                EpochRecord e;
                e.epoch = j.at("epoch").get<int>();
                e.k = j.at("k").get<double>();
                e.samples = j.at("samples").get<std::size_t>();
                e.learning_rate = j.at("learning_rate").get<double>();
                e.train_loss = j.at("train_loss").get<double>();
                e.val_accuracy = j.at("val_accuracy").get<double>();
                e.cosine_distance = j.at("cosine_distance").get<double>();
                if (!j.at("alpha").is_null()) e.alpha = j.at("alpha").get<double>();
                e.wall_ms = j.at("wall_ms").get<double>();
                log.epochs.push_back(e);
            } else if (type == "detection") {
                log.detection = detect::DetectionEvent{j.at("epoch").get<int>(),
                                                       j.at("alphas").get<std::vector<double>>()};
            } else if (type == "schedule") {
                auto& s = log.schedule;
                s.params.mode = schedule::parse_schedule_mode(j.at("mode").get<std::string>());
                s.params.total_epochs = j.at("total_epochs").get<int>();
                s.params.k_pre = j.at("k_pre").get<double>();
                s.params.k_post = j.at("k_post").get<double>();
                s.params.k_prune = j.at("k_prune").get<double>();
                s.params.delta = j.at("delta").get<double>();
                if (!j.at("critical_epoch").is_null()) s.critical_epoch = j.at("critical_epoch").get<int>();
                s.phases.clear();
                for (const auto& p : j.at("phases"))
                    s.phases.push_back({p.at("start").get<int>(), p.at("end").get<int>(), p.at("k").get<double>(),
                                        parse_label(p.at("label").get<std::string>())});
                saw_schedule = true;
            } else if (type != "summary") {
                throw FormatError("unknown record type '" + type + "'");
            }
        } catch (const nlohmann::json::exception& e) {
            throw FormatError(std::string("run log: ") + e.what(), line_no);
        } catch (const Error& e) {
            throw FormatError(std::string("run log: ") + e.what(), line_no);
        }
    }
    if (!saw_run || !saw_schedule) throw FormatError("run log is missing its run or schedule record");
    return log;
}

void write_run_log(const std::filesystem::path& path, const TrainRunLog& log) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << to_jsonl(log);
}

TrainRunLog read_run_log(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return run_log_from_jsonl(os.str());
}

std::string plot_csv(const TrainRunLog& log) {
    std::string out = "epoch,cosine_distance,alpha\n";
    char buf[96];
    for (const auto& e : log.epochs) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,", e.epoch, e.cosine_distance);
        out += buf;
        if (e.alpha) {
            std::snprintf(buf, sizeof buf, "%.17g", *e.alpha);
            out += buf;
        }
        out += "\n";
    }
    return out;
}

} // namespace clp::harness
