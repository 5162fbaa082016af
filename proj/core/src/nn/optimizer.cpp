// SPDX-License-Identifier: Apache-2.0
#include "clp/nn/optimizer.hpp"

#include <cmath>

#include "clp/error.hpp"

namespace clp::nn {

std::string_view to_string(OptimizerKind kind) {
    switch (kind) {
    case OptimizerKind::sgd: return "sgd";
    case OptimizerKind::adamw: return "adamw";
    case OptimizerKind::rmsprop: return "rmsprop";
    case OptimizerKind::adagrad: return "adagrad";
    }
    return "?";
}

OptimizerKind parse_optimizer_kind(std::string_view name) {
    if (name == "sgd") return OptimizerKind::sgd;
    if (name == "adamw") return OptimizerKind::adamw;
    if (name == "rmsprop") return OptimizerKind::rmsprop;
    if (name == "adagrad") return OptimizerKind::adagrad;
    throw SpecError("unknown optimizer '" + std::string(name) + "'");
}

void OptimizerConfig::validate(int total_epochs) const {
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw SpecError("learning rate must be positive");
    if (!(decay.divisor > 1.0)) throw SpecError("decay divisor must exceed 1");
    for (std::size_t i = 0; i < decay.epochs.size(); ++i) {
        if (decay.epochs[i] < 0 || decay.epochs[i] >= total_epochs)
            throw SpecError("decay epoch " + std::to_string(decay.epochs[i]) + " outside [0, " +
                            std::to_string(total_epochs) + ")");
        if (i > 0 && decay.epochs[i] <= decay.epochs[i - 1]) throw SpecError("decay epochs must strictly increase");
    }
    if (momentum < 0.0 || momentum >= 1.0) throw SpecError("momentum must lie in [0, 1)");
    if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0) throw SpecError("betas must lie in [0, 1)");
    if (rho < 0.0 || rho >= 1.0) throw SpecError("rho must lie in [0, 1)");
    if (!(epsilon > 0.0)) throw SpecError("epsilon must be positive");
    if (weight_decay < 0.0) throw SpecError("weight decay must be non-negative");
}

double OptimizerConfig::learning_rate_at(int epoch) const {
    double lr = learning_rate;
    for (int e : decay.epochs)
        if (epoch >= e) lr /= decay.divisor;
    return lr;
}

OptimizerState make_optimizer_state(OptimizerKind kind, const ModelParams& like) {
    OptimizerState state;
    state.kind = kind;
    const std::size_t slots = kind == OptimizerKind::adamw ? 2 : 1;
    for (std::size_t i = 0; i < slots; ++i) state.slots.push_back(zeros_like(like));
    return state;
}

namespace {

template <typename Fn>
void for_each_buffer(ModelParams& params, const ModelParams& grad, OptimizerState& state, Fn&& fn) {
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        auto visit = [&](auto member) {
            std::vector<float>& theta = (params.layers[l].*member).values;
            const std::vector<float>& g = (grad.layers[l].*member).values;
            std::vector<float>* s0 = state.slots.size() > 0 ? &(state.slots[0].layers[l].*member).values : nullptr;
            std::vector<float>* s1 = state.slots.size() > 1 ? &(state.slots[1].layers[l].*member).values : nullptr;
            for (std::size_t i = 0; i < theta.size(); ++i)
                fn(theta[i], static_cast<double>(g[i]), s0 ? &(*s0)[i] : nullptr, s1 ? &(*s1)[i] : nullptr);
        };
        visit(&LayerParams::weight);
        visit(&LayerParams::bias);
    }
}

} // namespace

void optimizer_step(ModelParams& params, const ModelParams& grad, OptimizerState& state,
                    const OptimizerConfig& config, int epoch) {
    if (grad.layers.size() != params.layers.size()) throw ShapeError("gradient does not match parameters");
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        if (grad.layers[l].weight.values.size() != params.layers[l].weight.values.size() ||
            grad.layers[l].bias.values.size() != params.layers[l].bias.values.size())
            throw ShapeError("gradient buffers of layer " + std::to_string(l) + " do not match parameters");
    }
    if (!grad.all_finite())
        throw NumericError("non-finite gradient at epoch " + std::to_string(epoch) + ", optimizer step " +
                           std::to_string(state.step));
    if (state.kind != config.kind) throw StateError("optimizer state was created for a different optimizer");

    const double lr = config.learning_rate_at(epoch);
    const double wd = config.weight_decay;
    ++state.step;

    switch (config.kind) {
    case OptimizerKind::sgd:
        if (config.momentum == 0.0) {
            for_each_buffer(params, grad, state, [&](float& theta, double g, float*, float*) {
                if (wd != 0.0) g += wd * theta;
                theta = static_cast<float>(static_cast<double>(theta) - lr * g);
            });
        } else {
            const double mu = config.momentum;
            for_each_buffer(params, grad, state, [&](float& theta, double g, float* vel, float*) {
                if (wd != 0.0) g += wd * theta;
                const double v = mu * static_cast<double>(*vel) + g;
                *vel = static_cast<float>(v);
                theta = static_cast<float>(static_cast<double>(theta) - lr * v);
            });
        }
        break;
    case OptimizerKind::adamw: {
        const double b1 = config.beta1, b2 = config.beta2, eps = config.epsilon;
        const double t = static_cast<double>(state.step);
        const double c1 = 1.0 - std::pow(b1, t);
        const double c2 = 1.0 - std::pow(b2, t);
        for_each_buffer(params, grad, state, [&](float& theta, double g, float* m1, float* m2) {
            const double m = b1 * static_cast<double>(*m1) + (1.0 - b1) * g;
            const double v = b2 * static_cast<double>(*m2) + (1.0 - b2) * g * g;
            *m1 = static_cast<float>(m);
            *m2 = static_cast<float>(v);
            const double update = (m / c1) / (std::sqrt(v / c2) + eps) + wd * static_cast<double>(theta);
            theta = static_cast<float>(static_cast<double>(theta) - lr * update);
        });
        break;
    }
    case OptimizerKind::rmsprop: {
        const double rho = config.rho, eps = config.epsilon;
        for_each_buffer(params, grad, state, [&](float& theta, double g, float* sq, float*) {
            if (wd != 0.0) g += wd * theta;
            const double s = rho * static_cast<double>(*sq) + (1.0 - rho) * g * g;
            *sq = static_cast<float>(s);
            theta = static_cast<float>(static_cast<double>(theta) - lr * g / (std::sqrt(s) + eps));
        });
        break;
    }
    case OptimizerKind::adagrad: {
        const double eps = config.epsilon;
        for_each_buffer(params, grad, state, [&](float& theta, double g, float* acc, float*) {
            if (wd != 0.0) g += wd * theta;
            const double s = static_cast<double>(*acc) + g * g;
            *acc = static_cast<float>(s);
            theta = static_cast<float>(static_cast<double>(theta) - lr * g / (std::sqrt(s) + eps));
        });
        break;
    }
    }
}

} // namespace clp::nn
