// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "clp/schedule/schedule.hpp"

namespace clp::report {

/// Data points consumed over a run divided by N * baseline_k * n, with the
/// per-epoch count taken as round(k * n) exactly as the epoch planner sizes it.
double normalized_cost(const schedule::RecipeSchedule& schedule, std::size_t n, int total_epochs, double baseline_k);

/// Same ratio from recorded per-epoch sample counts.
double normalized_cost(std::span<const std::size_t> samples_per_epoch, std::size_t n, int total_epochs,
                       double baseline_k);

/// (1 - cost) * 100; negative when the run consumed more than the baseline.
inline double percent_saved(double normalized_cost) { return (1.0 - normalized_cost) * 100.0; }

struct AccuracyDelta {
    double points = 0.0; // (run - baseline) * 100, signed

    /// "↑", "↓", or "" for an exact tie.
    std::string_view arrow() const;
    /// Arrow followed by the magnitude, e.g. "↓0.30".
    std::string format(int decimals = 2) const;
};

/// Both accuracies are fractions in [0, 1]; throws SpecError otherwise.
AccuracyDelta accuracy_delta(double baseline_accuracy, double run_accuracy);

enum class PriceUnit { per_kwh, per_hour };

/// Documented defaults, not measurements: a 250 W accelerator, 0.4 kg CO2 per kWh,
/// 0.15 currency units per kWh.
struct EmissionAssumptions {
    double power_watts = 250.0;
    double carbon_kg_per_kwh = 0.4;
    double price = 0.15;
    PriceUnit price_unit = PriceUnit::per_kwh;

    void validate() const;
    bool operator==(const EmissionAssumptions&) const = default;
};

struct Emissions {
    double kwh = 0.0;
    double co2_kg = 0.0;
    double money = 0.0;
};

/// kWh = W * s / 3.6e6; CO2 = kWh * intensity; money = kWh * price (or hours * price).
Emissions estimate_emissions(double wall_seconds, const EmissionAssumptions& assumptions);

inline constexpr int kReportSchemaVersion = 1;

struct RunReport {
    std::string label;
    double baseline_accuracy = 0.0;
    double run_accuracy = 0.0;
    double accuracy_delta_pp = 0.0;
    double normalized_cost = 1.0;
    double percent_saved = 0.0;
    double baseline_wall_seconds = 0.0;
    double wall_seconds = 0.0;
    double time_saved_percent = 0.0;
    double energy_kwh = 0.0;
    double co2_kg = 0.0;
    double money = 0.0;
    double baseline_energy_kwh = 0.0;
    double baseline_co2_kg = 0.0;
    double baseline_money = 0.0;
    EmissionAssumptions assumptions;

    bool operator==(const RunReport&) const = default;
};

/// Assembles a report from the raw measurements of a run and its baseline.
RunReport make_report(std::string label, double baseline_accuracy, double run_accuracy, double normalized_cost,
                      double baseline_wall_seconds, double wall_seconds, const EmissionAssumptions& assumptions);

/// Versioned JSON: {"schema": "clp.run_report", "version": 1, ...}.
std::string to_json(const RunReport& report);
RunReport report_from_json(std::string_view text);

/// Plain-text table with a "Δ Acc" row and a "Saved (%)" row, one column per run.
std::string comparison_table(std::span<const RunReport> reports);

} // namespace clp::report
