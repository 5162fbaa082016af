// SPDX-License-Identifier: Apache-2.0
#include "clp/harness/trainer.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

#include "clp/data/epoch_plan.hpp"
#include "clp/error.hpp"
#include "clp/nn/network.hpp"
#include "clp/report/cost_report.hpp"

namespace clp::harness {

TrainResult train(const RunConfig& config, const PreparedData& data, const TrainOptions& options) {
    config.validate();
    const nn::ModelSpec spec = build_model_spec(config, data.train);
    spec.validate();
    const int N = config.epochs;

    const nn::ModelParams initial = nn::init_params(spec, config.seeds.init);
    const rotation::WeightVector theta0 = rotation::flatten(initial, 0);

    TrainResult result;
    int start = 0;
    if (options.resume) {
        const auto& ck = *options.resume;
        if (ck.spec_hash != spec.hash()) throw StateError("checkpoint belongs to a different model");
        if (!(ck.seeds == config.seeds)) throw StateError("checkpoint seeds differ from the run config");
        if (ck.optimizer.kind != config.optimizer.kind) throw StateError("checkpoint optimizer differs from the run config");
        if (static_cast<int>(ck.epoch) > N) throw StateError("checkpoint is past the last epoch");
        nn::check_matches(ck.params, spec);
        start = static_cast<int>(ck.epoch);
        result.params = ck.params;
        result.optimizer = ck.optimizer;
    } else {
        result.params = initial;
        result.optimizer = nn::make_optimizer_state(config.optimizer.kind, initial);
    }

    const bool live = !options.fixed_schedule && config.schedule.mode != schedule::ScheduleMode::static_baseline;
    schedule::RecipeSchedule sched =
        options.fixed_schedule ? *options.fixed_schedule : schedule::build_schedule(config.schedule, std::nullopt);
    if (sched.params.total_epochs != N) throw SpecError("schedule length differs from the run length");

    auto& log = result.log;
    log.header = {std::string(schedule::to_string(sched.params.mode)),
                  N,
                  start,
                  config.schedule.k_pre,
                  data.train.size(),
                  data.validation.size(),
                  spec.canonical(),
                  std::string(nn::to_string(config.optimizer.kind)),
                  config.seeds};

    auto save = [&](int epoch) {
        if (options.checkpoint_dir.empty()) return;
        nn::write_checkpoint(nn::checkpoint_path(options.checkpoint_dir, epoch),
                             {spec.hash(), static_cast<std::uint32_t>(epoch), config.seeds, result.params,
                              result.optimizer});
    };
    if (!options.checkpoint_dir.empty()) std::filesystem::create_directories(options.checkpoint_dir);
    save(start);

    detect::CriticalDetector detector(config.detector);
    for (const auto& pt : options.history.points()) {
        if (pt.epoch >= start) throw StateError("history reaches past the resume epoch");
        result.trace.append(pt.epoch, pt.distance);
        const auto step = detector.step(pt.epoch, pt.distance);
        if (live && step.fired && !sched.critical_epoch) {
            sched = schedule::on_detection(sched, step.fired->epoch);
            log.detection = step.fired;
        }
    }
    using clock = std::chrono::steady_clock;

    for (int e = start; e < N; ++e) {
        const auto t0 = clock::now();
        const double k = schedule::effective_k(sched, e);
        const auto plan = data::plan_epoch(data.train.size(), k, config.seeds.data, config.seeds.augment, e);
        data::BatchStream stream(data.train, plan, config.augment, config.batch_size);

        double loss_sum = 0.0;
        std::size_t seen = 0;
        while (auto batch = stream.next()) {
            auto fwd = nn::forward(result.params, spec, *batch);
            if (!std::isfinite(fwd.loss)) {
                char buf[96];
                std::snprintf(buf, sizeof buf, "non-finite training loss at epoch %d", e);
                throw NumericError(buf);
            }
            const auto grad = nn::backward(result.params, spec, fwd.cache);
            nn::optimizer_step(result.params, grad, result.optimizer, config.optimizer, e);
            loss_sum += fwd.loss * static_cast<double>(batch->size());
            seen += batch->size();
        }
        if (!result.params.all_finite()) throw NumericError("parameters became non-finite at epoch " + std::to_string(e));

        EpochRecord rec;
        rec.epoch = e;
        rec.k = k;
        rec.samples = plan.size();
        rec.learning_rate = config.optimizer.learning_rate_at(e);
        rec.train_loss = loss_sum / static_cast<double>(seen);
        rec.val_accuracy = nn::evaluate(result.params, spec, data.validation);
        rotation::record_epoch(result.trace, e, result.params, theta0);
        rec.cosine_distance = result.trace.points().back().distance;

        const auto step = detector.step(e, rec.cosine_distance);
        rec.alpha = step.alpha;
        if (live && step.fired && !sched.critical_epoch) {
            sched = schedule::on_detection(sched, step.fired->epoch);
            log.detection = step.fired;
        }
        rec.wall_ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
        log.epochs.push_back(rec);
        save(e + 1);
        if (options.on_epoch) options.on_epoch(rec);
    }
    log.schedule = sched;
    return result;
}

std::vector<OracleEntry> oracle_sweep(const RunConfig& config, const PreparedData& data,
                                      const std::filesystem::path& checkpoint_dir, std::span<const int> candidates,
                                      const rotation::RotationTrace& baseline_trace) {
    config.validate();
    const nn::ModelSpec spec = build_model_spec(config, data.train);
    auto params = config.schedule;
    params.mode = schedule::ScheduleMode::reduce_at_critical;

    std::vector<OracleEntry> out;
    for (int i : candidates) {
        if (i < 0 || i > config.epochs) throw SpecError("oracle candidate outside [0, N]");
        const auto sched = schedule::build_schedule(params, i);
        auto ck = nn::read_checkpoint(nn::checkpoint_path(checkpoint_dir, i), spec);
        if (static_cast<int>(ck.epoch) != i) throw FormatError("checkpoint epoch does not match its file name");
        OracleEntry entry;
        entry.switch_epoch = i;
        entry.normalized_cost =
            report::normalized_cost(sched, data.train.size(), config.epochs, config.schedule.k_pre);
        if (i == config.epochs) {
            entry.final_accuracy = nn::evaluate(ck.params, spec, data.validation);
        } else {
            TrainOptions opts;
            opts.fixed_schedule = sched;
            opts.resume = std::move(ck);
            for (const auto& pt : baseline_trace.points())
                if (pt.epoch < i) opts.history.append(pt.epoch, pt.distance);
            entry.final_accuracy = train(config, data, opts).log.final_accuracy();
        }
        out.push_back(entry);
    }
    return out;
}

std::string sweep_csv(std::span<const OracleEntry> entries) {
    std::string out = "switch_epoch,final_accuracy,normalized_cost\n";
    char buf[96];
    for (const auto& e : entries) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", e.switch_epoch, e.final_accuracy, e.normalized_cost);
        out += buf;
    }
    return out;
}

} // namespace clp::harness
