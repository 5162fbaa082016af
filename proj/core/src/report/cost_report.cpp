// SPDX-License-Identifier: Apache-2.0
#include "clp/report/cost_report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "clp/data/epoch_plan.hpp"
#include "clp/error.hpp"

namespace clp::report {

double normalized_cost(std::span<const std::size_t> samples_per_epoch, std::size_t n, int total_epochs,
                       double baseline_k) {
    if (n == 0 || total_epochs <= 0 || !(baseline_k > 0.0)) throw SpecError("cost normalizer must be positive");
    if (samples_per_epoch.size() != static_cast<std::size_t>(total_epochs))
        throw SpecError("expected one sample count per epoch");
    double used = 0.0;
    for (std::size_t s : samples_per_epoch) used += static_cast<double>(s);
    return used / (static_cast<double>(total_epochs) * baseline_k * static_cast<double>(n));
}

double normalized_cost(const schedule::RecipeSchedule& schedule, std::size_t n, int total_epochs, double baseline_k) {
    std::vector<std::size_t> per_epoch;
    per_epoch.reserve(static_cast<std::size_t>(std::max(total_epochs, 0)));
    for (int e = 0; e < total_epochs; ++e) per_epoch.push_back(data::plan_size(schedule::effective_k(schedule, e), n));
    return normalized_cost(per_epoch, n, total_epochs, baseline_k);
}

std::string_view AccuracyDelta::arrow() const {
    if (points > 0.0) return "↑";
    if (points < 0.0) return "↓";
    return "";
}

std::string AccuracyDelta::format(int decimals) const {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, std::fabs(points));
    return std::string(arrow()) + buf;
}

AccuracyDelta accuracy_delta(double baseline_accuracy, double run_accuracy) {
    for (double a : {baseline_accuracy, run_accuracy})
        if (!(a >= 0.0 && a <= 1.0)) throw SpecError("accuracies must lie in [0, 1]");
    return {(run_accuracy - baseline_accuracy) * 100.0};
}

void EmissionAssumptions::validate() const {
    if (!(power_watts > 0.0) || !(carbon_kg_per_kwh > 0.0) || !(price > 0.0))
        throw SpecError("emission assumptions must be positive");
}

Emissions estimate_emissions(double wall_seconds, const EmissionAssumptions& a) {
    a.validate();
    if (!(wall_seconds >= 0.0)) throw SpecError("wall time must be non-negative");
    Emissions e;
    e.kwh = a.power_watts * wall_seconds / 3.6e6;
    e.co2_kg = e.kwh * a.carbon_kg_per_kwh;
    e.money = a.price_unit == PriceUnit::per_kwh ? e.kwh * a.price : wall_seconds / 3600.0 * a.price;
    return e;
}

RunReport make_report(std::string label, double baseline_accuracy, double run_accuracy, double normalized_cost,
                      double baseline_wall_seconds, double wall_seconds, const EmissionAssumptions& assumptions) {
    RunReport r;
    r.label = std::move(label);
    r.baseline_accuracy = baseline_accuracy;
    r.run_accuracy = run_accuracy;
    r.accuracy_delta_pp = accuracy_delta(baseline_accuracy, run_accuracy).points;
    r.normalized_cost = normalized_cost;
    r.percent_saved = percent_saved(normalized_cost);
    r.baseline_wall_seconds = baseline_wall_seconds;
    r.wall_seconds = wall_seconds;
    r.time_saved_percent = baseline_wall_seconds > 0.0 ? (1.0 - wall_seconds / baseline_wall_seconds) * 100.0 : 0.0;
    const auto run = estimate_emissions(wall_seconds, assumptions);
    const auto base = estimate_emissions(baseline_wall_seconds, assumptions);
    r.energy_kwh = run.kwh;
    r.co2_kg = run.co2_kg;
    r.money = run.money;
    r.baseline_energy_kwh = base.kwh;
    r.baseline_co2_kg = base.co2_kg;
    r.baseline_money = base.money;
    r.assumptions = assumptions;
    return r;
}

std::string to_json(const RunReport& r) {
    nlohmann::ordered_json j;
    j["schema"] = "clp.run_report";
    j["version"] = kReportSchemaVersion;
    j["label"] = r.label;
    j["baseline_accuracy"] = r.baseline_accuracy;
    j["run_accuracy"] = r.run_accuracy;
    j["accuracy_delta_pp"] = r.accuracy_delta_pp;
    j["accuracy_delta"] = accuracy_delta(r.baseline_accuracy, r.run_accuracy).format();
    j["normalized_cost"] = r.normalized_cost;
    j["percent_saved"] = r.percent_saved;
    j["baseline_wall_seconds"] = r.baseline_wall_seconds;
    j["wall_seconds"] = r.wall_seconds;
    j["time_saved_percent"] = r.time_saved_percent;
    j["energy_kwh"] = r.energy_kwh;
    j["co2_kg"] = r.co2_kg;
    j["money"] = r.money;
    j["baseline_energy_kwh"] = r.baseline_energy_kwh;
    j["baseline_co2_kg"] = r.baseline_co2_kg;
    j["baseline_money"] = r.baseline_money;
    j["assumptions"] = {{"power_watts", r.assumptions.power_watts},
                        {"carbon_kg_per_kwh", r.assumptions.carbon_kg_per_kwh},
                        {"price", r.assumptions.price},
                        {"price_unit", r.assumptions.price_unit == PriceUnit::per_kwh ? "kwh" : "hour"}};
    return j.dump(2);
}

RunReport report_from_json(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(std::string("report JSON: ") + e.what());
    }
    if (j.value("schema", "") != "clp.run_report") throw FormatError("not a run report");
    if (j.value("version", 0) != kReportSchemaVersion) throw FormatError("unsupported run report version");
    try {
        RunReport r;
        r.label = j.at("label").get<std::string>();
        r.baseline_accuracy = j.at("baseline_accuracy").get<double>();
        r.run_accuracy = j.at("run_accuracy").get<double>();
        r.accuracy_delta_pp = j.at("accuracy_delta_pp").get<double>();
        r.normalized_cost = j.at("normalized_cost").get<double>();
        r.percent_saved = j.at("percent_saved").get<double>();
        r.baseline_wall_seconds = j.at("baseline_wall_seconds").get<double>();
        r.wall_seconds = j.at("wall_seconds").get<double>();
        r.time_saved_percent = j.at("time_saved_percent").get<double>();
        r.energy_kwh = j.at("energy_kwh").get<double>();
        r.co2_kg = j.at("co2_kg").get<double>();
        r.money = j.at("money").get<double>();
        r.baseline_energy_kwh = j.at("baseline_energy_kwh").get<double>();
        r.baseline_co2_kg = j.at("baseline_co2_kg").get<double>();
        r.baseline_money = j.at("baseline_money").get<double>();
        const auto& a = j.at("assumptions");
        r.assumptions.power_watts = a.at("power_watts").get<double>();
        r.assumptions.carbon_kg_per_kwh = a.at("carbon_kg_per_kwh").get<double>();
        r.assumptions.price = a.at("price").get<double>();
        r.assumptions.price_unit = a.at("price_unit").get<std::string>() == "hour" ? PriceUnit::per_hour : PriceUnit::per_kwh;
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("report JSON: ") + e.what());
    }
}

std::string comparison_table(std::span<const RunReport> reports) {
    constexpr int label_w = 12, col_w = 14;
    auto pad = [](std::string s, int width) {
        // Arrows are 3 bytes in UTF-8 but one column wide.
        int visible = 0;
        for (unsigned char c : s)
            if ((c & 0xC0) != 0x80) ++visible;
        if (visible < width) s.insert(0, static_cast<std::size_t>(width - visible), ' ');
        return s;
    };
    std::string out = pad("", label_w);
    for (const auto& r : reports) out += pad(r.label, col_w);
    out += "\n";
    out += std::string(static_cast<std::size_t>(label_w + col_w * static_cast<int>(reports.size())), '-') + "\n";
    std::string acc = "ΔAcc", saved = "Saved (%)";
    out += acc + std::string(static_cast<std::size_t>(label_w - 4), ' ');
    for (const auto& r : reports) out += pad(AccuracyDelta{r.accuracy_delta_pp}.format(), col_w);
    out += "\n" + saved + std::string(static_cast<std::size_t>(label_w - 9), ' ');
    char buf[32];
    for (const auto& r : reports) {
        std::snprintf(buf, sizeof buf, "%.2f", r.percent_saved);
        out += pad(buf, col_w);
    }
    out += "\n";
    return out;
}

} // namespace clp::report
