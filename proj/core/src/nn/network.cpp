// SPDX-License-Identifier: Apache-2.0
#include "clp/nn/network.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "clp/error.hpp"

namespace clp::nn {

namespace {

struct ConvGeometry {
    std::size_t in_channels, out_channels, height, width, kernel, pad;
};

ConvGeometry conv_geometry(const LayerSpec& layer, const Shape& input) {
    const auto dims = image_dims(input);
    return {layer.in, layer.out, dims[1], dims[2], layer.kernel, layer.kernel / 2};
}

void dense_forward(const LayerSpec& layer, const LayerParams& p, std::size_t batch, const std::vector<double>& in,
                   std::vector<double>& out) {
    const std::size_t I = layer.in, O = layer.out;
    out.assign(batch * O, 0.0);
    const float* W = p.weight.values.data();
    for (std::size_t b = 0; b < batch; ++b) {
        const double* x = in.data() + b * I;
        double* y = out.data() + b * O;
        for (std::size_t o = 0; o < O; ++o) y[o] = p.bias.values[o];
        for (std::size_t i = 0; i < I; ++i) {
            const double xi = x[i];
            if (xi == 0.0) continue;
            const float* w = W + i * O;
            for (std::size_t o = 0; o < O; ++o) y[o] += xi * static_cast<double>(w[o]);
        }
    }
}

void dense_backward(const LayerSpec& layer, const LayerParams& p, std::size_t batch, const std::vector<double>& in,
                    const std::vector<double>& grad_out, LayerParams& grad, std::vector<double>* grad_in) {
    const std::size_t I = layer.in, O = layer.out;
    std::vector<double> dW(I * O, 0.0), db(O, 0.0);
    for (std::size_t b = 0; b < batch; ++b) {
        const double* x = in.data() + b * I;
        const double* g = grad_out.data() + b * O;
        for (std::size_t o = 0; o < O; ++o) db[o] += g[o];
        for (std::size_t i = 0; i < I; ++i) {
            const double xi = x[i];
            if (xi == 0.0) continue;
            double* row = dW.data() + i * O;
            for (std::size_t o = 0; o < O; ++o) row[o] += xi * g[o];
        }
    }
    if (grad_in) {
        grad_in->assign(batch * I, 0.0);
        const float* W = p.weight.values.data();
        for (std::size_t b = 0; b < batch; ++b) {
            const double* g = grad_out.data() + b * O;
            double* dx = grad_in->data() + b * I;
            for (std::size_t i = 0; i < I; ++i) {
                const float* w = W + i * O;
                double acc = 0.0;
                for (std::size_t o = 0; o < O; ++o) acc += static_cast<double>(w[o]) * g[o];
                dx[i] = acc;
            }
        }
    }
    std::transform(dW.begin(), dW.end(), grad.weight.values.begin(), [](double v) { return static_cast<float>(v); });
    std::transform(db.begin(), db.end(), grad.bias.values.begin(), [](double v) { return static_cast<float>(v); });
}

void conv_forward(const ConvGeometry& g, const LayerParams& p, std::size_t batch, const std::vector<double>& in,
                  std::vector<double>& out) {
    const std::size_t HW = g.height * g.width;
    const std::size_t K = g.kernel;
    out.assign(batch * g.out_channels * HW, 0.0);
    for (std::size_t b = 0; b < batch; ++b) {
        for (std::size_t o = 0; o < g.out_channels; ++o) {
            double* y = out.data() + (b * g.out_channels + o) * HW;
            std::fill(y, y + HW, static_cast<double>(p.bias.values[o]));
            for (std::size_t c = 0; c < g.in_channels; ++c) {
                const double* x = in.data() + (b * g.in_channels + c) * HW;
                const float* ker = p.weight.values.data() + ((o * g.in_channels + c) * K) * K;
                for (std::size_t h = 0; h < g.height; ++h) {
                    for (std::size_t w = 0; w < g.width; ++w) {
                        double acc = 0.0;
                        for (std::size_t kh = 0; kh < K; ++kh) {
                            const std::ptrdiff_t ih = static_cast<std::ptrdiff_t>(h + kh) - static_cast<std::ptrdiff_t>(g.pad);
                            if (ih < 0 || ih >= static_cast<std::ptrdiff_t>(g.height)) continue;
                            for (std::size_t kw = 0; kw < K; ++kw) {
                                const std::ptrdiff_t iw =
                                    static_cast<std::ptrdiff_t>(w + kw) - static_cast<std::ptrdiff_t>(g.pad);
                                if (iw < 0 || iw >= static_cast<std::ptrdiff_t>(g.width)) continue;
                                acc += x[ih * g.width + iw] * static_cast<double>(ker[kh * K + kw]);
                            }
                        }
                        y[h * g.width + w] += acc;
                    }
                }
            }
        }
    }
}

void conv_backward(const ConvGeometry& g, const LayerParams& p, std::size_t batch, const std::vector<double>& in,
                   const std::vector<double>& grad_out, LayerParams& grad, std::vector<double>* grad_in) {
    const std::size_t HW = g.height * g.width;
    const std::size_t K = g.kernel;
    std::vector<double> dK(p.weight.values.size(), 0.0), db(g.out_channels, 0.0);
    if (grad_in) grad_in->assign(batch * g.in_channels * HW, 0.0);
    for (std::size_t b = 0; b < batch; ++b) {
        for (std::size_t o = 0; o < g.out_channels; ++o) {
            const double* dy = grad_out.data() + (b * g.out_channels + o) * HW;
            for (std::size_t i = 0; i < HW; ++i) db[o] += dy[i];
            for (std::size_t c = 0; c < g.in_channels; ++c) {
                const double* x = in.data() + (b * g.in_channels + c) * HW;
                double* dx = grad_in ? grad_in->data() + (b * g.in_channels + c) * HW : nullptr;
                const std::size_t kbase = ((o * g.in_channels + c) * K) * K;
                for (std::size_t h = 0; h < g.height; ++h) {
                    for (std::size_t w = 0; w < g.width; ++w) {
                        const double gy = dy[h * g.width + w];
                        if (gy == 0.0) continue;
                        for (std::size_t kh = 0; kh < K; ++kh) {
                            const std::ptrdiff_t ih = static_cast<std::ptrdiff_t>(h + kh) - static_cast<std::ptrdiff_t>(g.pad);
                            if (ih < 0 || ih >= static_cast<std::ptrdiff_t>(g.height)) continue;
                            for (std::size_t kw = 0; kw < K; ++kw) {
                                const std::ptrdiff_t iw =
                                    static_cast<std::ptrdiff_t>(w + kw) - static_cast<std::ptrdiff_t>(g.pad);
                                if (iw < 0 || iw >= static_cast<std::ptrdiff_t>(g.width)) continue;
                                const std::size_t xi = static_cast<std::size_t>(ih) * g.width + static_cast<std::size_t>(iw);
                                dK[kbase + kh * K + kw] += gy * x[xi];
                                if (dx) dx[xi] += gy * static_cast<double>(p.weight.values[kbase + kh * K + kw]);
                            }
                        }
                    }
                }
            }
        }
    }
    std::transform(dK.begin(), dK.end(), grad.weight.values.begin(), [](double v) { return static_cast<float>(v); });
    std::transform(db.begin(), db.end(), grad.bias.values.begin(), [](double v) { return static_cast<float>(v); });
}

// Runs layers [0, n) and fills `acts` (size n + 1).
void run_layers(const ModelParams& params, const ModelSpec& spec, const std::vector<Shape>& shapes, std::size_t batch,
                std::vector<std::vector<double>>& acts) {
    for (std::size_t l = 0; l < spec.layers.size(); ++l) {
        const LayerSpec& layer = spec.layers[l];
        const auto& in = acts[l];
        auto& out = acts[l + 1];
        switch (layer.kind) {
        case LayerKind::dense: dense_forward(layer, params.layers[l], batch, in, out); break;
        case LayerKind::conv2d: conv_forward(conv_geometry(layer, shapes[l]), params.layers[l], batch, in, out); break;
        case LayerKind::relu:
            out.resize(in.size());
            std::transform(in.begin(), in.end(), out.begin(), [](double v) { return v > 0.0 ? v : 0.0; });
            break;
        case LayerKind::flatten:
        case LayerKind::softmax_ce: out = in; break;
        }
    }
}

std::vector<double> to_double_checked(std::span<const float> inputs) {
    std::vector<double> out(inputs.size());
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        if (!std::isfinite(inputs[i])) throw NumericError("non-finite input value at offset " + std::to_string(i));
        out[i] = inputs[i];
    }
    return out;
}

} // namespace

double cross_entropy(std::span<const double> logits, std::span<const std::int32_t> labels, std::size_t classes) {
    const std::size_t batch = labels.size();
    if (batch == 0 || logits.size() != batch * classes) throw ShapeError("logits and labels disagree");
    double total = 0.0;
    for (std::size_t b = 0; b < batch; ++b) {
        const double* z = logits.data() + b * classes;
        const double zmax = *std::max_element(z, z + classes);
        double sum = 0.0;
        for (std::size_t c = 0; c < classes; ++c) sum += std::exp(z[c] - zmax);
        total += std::log(sum) + zmax - z[labels[b]];
    }
    return total / static_cast<double>(batch);
}

std::vector<double> loss_gradient(std::span<const double> logits, std::span<const std::int32_t> labels,
                                  std::size_t classes) {
    const std::size_t batch = labels.size();
    if (batch == 0 || logits.size() != batch * classes) throw ShapeError("logits and labels disagree");
    std::vector<double> grad(logits.size());
    const double inv_b = 1.0 / static_cast<double>(batch);
    for (std::size_t b = 0; b < batch; ++b) {
        const double* z = logits.data() + b * classes;
        double* g = grad.data() + b * classes;
        const double zmax = *std::max_element(z, z + classes);
        double sum = 0.0;
        for (std::size_t c = 0; c < classes; ++c) {
            g[c] = std::exp(z[c] - zmax);
            sum += g[c];
        }
        for (std::size_t c = 0; c < classes; ++c) g[c] = g[c] / sum * inv_b;
        g[labels[b]] -= inv_b;
    }
    return grad;
}

ForwardResult forward(const ModelParams& params, const ModelSpec& spec, const Batch& batch) {
    const auto shapes = spec.layer_shapes();
    check_matches(params, spec);
    const std::size_t n = batch.size();
    const std::size_t d = shape_size(spec.input_shape);
    if (n == 0) throw ShapeError("empty batch");
    if (batch.inputs.size() != n * d)
        throw ShapeError("batch holds " + std::to_string(batch.inputs.size()) + " values, expected " +
                         std::to_string(n) + " x " + std::to_string(d));
    for (auto y : batch.labels)
        if (y < 0 || static_cast<std::size_t>(y) >= spec.classes)
            throw ShapeError("label " + std::to_string(y) + " outside [0, " + std::to_string(spec.classes) + ")");

    ForwardResult result;
    auto& cache = result.cache;
    cache.params_digest = digest(params);
    cache.spec_hash = spec.hash();
    cache.batch_size = n;
    cache.labels = batch.labels;
    cache.activations.resize(spec.layers.size() + 1);
    cache.activations[0] = to_double_checked(batch.inputs);
    run_layers(params, spec, shapes, n, cache.activations);
    result.logits = cache.activations.back();
    result.loss = cross_entropy(result.logits, batch.labels, spec.classes);
    return result;
}

ModelParams backward(const ModelParams& params, const ModelSpec& spec, const ForwardCache& cache) {
    if (cache.spec_hash != spec.hash()) throw StateError("forward cache belongs to a different model");
    if (cache.params_digest != digest(params)) throw StateError("stale forward cache: parameters changed since forward");
    const auto shapes = spec.layer_shapes();
    const std::size_t batch = cache.batch_size;

    ModelParams grad = zeros_like(params);
    std::vector<double> g = loss_gradient(cache.activations.back(), cache.labels, spec.classes);
    std::vector<double> g_in;
    for (std::size_t l = spec.layers.size(); l-- > 0;) {
        const LayerSpec& layer = spec.layers[l];
        const auto& in = cache.activations[l];
        const bool need_input_grad = l > 0;
        switch (layer.kind) {
        case LayerKind::dense:
            dense_backward(layer, params.layers[l], batch, in, g, grad.layers[l], need_input_grad ? &g_in : nullptr);
            g.swap(g_in);
            break;
        case LayerKind::conv2d:
            conv_backward(conv_geometry(layer, shapes[l]), params.layers[l], batch, in, g, grad.layers[l],
                          need_input_grad ? &g_in : nullptr);
            g.swap(g_in);
            break;
        case LayerKind::relu:
            for (std::size_t i = 0; i < g.size(); ++i)
                if (!(in[i] > 0.0)) g[i] = 0.0;
            break;
        case LayerKind::flatten:
        case LayerKind::softmax_ce: break;
        }
    }
    return grad;
}

std::vector<double> predict_logits(const ModelParams& params, const ModelSpec& spec, std::span<const float> inputs,
                                   std::size_t count) {
    const auto shapes = spec.layer_shapes();
    check_matches(params, spec);
    if (inputs.size() != count * shape_size(spec.input_shape)) throw ShapeError("input block does not match count");
    std::vector<std::vector<double>> acts(spec.layers.size() + 1);
    acts[0] = to_double_checked(inputs);
    run_layers(params, spec, shapes, count, acts);
    return std::move(acts.back());
}

std::size_t argmax(std::span<const double> logits) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < logits.size(); ++c)
        if (logits[c] > logits[best]) best = c;
    return best;
}

double evaluate(const ModelParams& params, const ModelSpec& spec, const data::Dataset& dataset) {
    if (dataset.size() == 0) throw ShapeError("cannot evaluate on an empty dataset");
    if (dataset.sample_size() != shape_size(spec.input_shape)) throw ShapeError("dataset samples do not fit the model input");
    constexpr std::size_t chunk = 256;
    const std::size_t d = dataset.sample_size();
    std::size_t correct = 0;
    for (std::size_t start = 0; start < dataset.size(); start += chunk) {
        const std::size_t count = std::min(chunk, dataset.size() - start);
        const auto logits =
            predict_logits(params, spec, std::span<const float>(dataset.samples).subspan(start * d, count * d), count);
        for (std::size_t i = 0; i < count; ++i) {
            const auto row = std::span<const double>(logits).subspan(i * spec.classes, spec.classes);
            if (static_cast<std::int32_t>(argmax(row)) == dataset.labels[start + i]) ++correct;
        }
    }
    return static_cast<double>(correct) / static_cast<double>(dataset.size());
}

} // namespace clp::nn
