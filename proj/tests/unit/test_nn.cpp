// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numeric>

#include "clp/error.hpp"
#include "clp/nn/checkpoint.hpp"
#include "clp/nn/network.hpp"
#include "clp/nn/optimizer.hpp"
#include "clp/nn/params.hpp"

#include "../support/gradcheck.hpp"
#include "test_util.hpp"

using namespace clp;
using nn::LayerSpec;

namespace {

nn::ModelSpec linear_head(std::size_t in, std::size_t classes) {
    return {{LayerSpec::dense(in, classes), LayerSpec::softmax_ce()}, {in}, classes};
}

} // namespace

// ---- ModelSpec ----------------------------------------------------------------

TEST(ModelSpec, ParsesLayerList) {
    const auto s = nn::ModelSpec::parse("flatten dense:64 relu dense:10 softmax-ce", {8, 8}, 10);
    ASSERT_EQ(s.layers.size(), 5u);
    EXPECT_EQ(s.layers[1], LayerSpec::dense(64, 64));
    EXPECT_EQ(s.layers[3], LayerSpec::dense(64, 10));
    EXPECT_NO_THROW(s.validate());
    EXPECT_EQ(s, nn::make_mlp({8, 8}, {64}, 10));
}

TEST(ModelSpec, ParsesConvolutionOnRankTwoInput) {
    const auto s = nn::ModelSpec::parse("conv2d:4:3, relu, flatten, dense:3, softmax-ce", {6, 6}, 3);
    EXPECT_EQ(s.layers[0], LayerSpec::conv2d(1, 4, 3));
    EXPECT_EQ(s.layers[3], LayerSpec::dense(4 * 36, 3));
    EXPECT_NO_THROW(s.validate());
}

TEST(ModelSpec, RejectsInvalidStacks) {
    EXPECT_THROW((nn::ModelSpec{{LayerSpec::dense(4, 1), LayerSpec::softmax_ce()}, {4}, 1}.validate()), SpecError);
    EXPECT_THROW((nn::ModelSpec{{LayerSpec::relu(), LayerSpec::softmax_ce()}, {2}, 2}.validate()), SpecError);
    EXPECT_THROW((nn::ModelSpec{{LayerSpec::dense(4, 3), LayerSpec::softmax_ce()}, {5}, 3}.validate()), SpecError);
    EXPECT_THROW((nn::ModelSpec{{LayerSpec::dense(4, 3)}, {4}, 3}.validate()), SpecError);
    EXPECT_THROW((nn::ModelSpec{{LayerSpec::conv2d(1, 2, 2), LayerSpec::flatten(), LayerSpec::dense(32, 2),
                                 LayerSpec::softmax_ce()},
                                {4, 4},
                                2}
                      .validate()),
                 SpecError);
    EXPECT_THROW(nn::ModelSpec::parse("dense:4 softmax-ce", {2, 2}, 4), SpecError);
    EXPECT_THROW(nn::ModelSpec::parse("dense:x softmax-ce", {2}, 2), SpecError);
    EXPECT_THROW(nn::ModelSpec::parse("pool softmax-ce", {2}, 2), SpecError);
}

TEST(ModelSpec, HashFollowsCanonicalForm) {
    const auto a = nn::make_mlp({4}, {8}, 3);
    const auto b = nn::make_mlp({4}, {9}, 3);
    EXPECT_EQ(a.hash(), nn::make_mlp({4}, {8}, 3).hash());
    EXPECT_NE(a.hash(), b.hash());
    EXPECT_NE(a.canonical(), b.canonical());
}

// ---- init_params ----------------------------------------------------------------

TEST(InitParams, DenseShapes) {
    const auto p = nn::init_params(linear_head(4, 3), 1);
    EXPECT_EQ(p.layers[0].weight.shape, (nn::Shape{4, 3}));
    EXPECT_EQ(p.layers[0].bias.shape, (nn::Shape{3}));
    EXPECT_TRUE(p.layers[1].weight.values.empty());
    EXPECT_EQ(p.parameter_count(), 15u);
}

TEST(InitParams, DeterministicPerSeed) {
    const auto spec = nn::ModelSpec::parse("conv2d:2:3 relu flatten dense:5 relu dense:3 softmax-ce", {2, 4, 4}, 3);
    EXPECT_EQ(nn::init_params(spec, 42), nn::init_params(spec, 42));
    EXPECT_NE(nn::init_params(spec, 42), nn::init_params(spec, 43));
}

TEST(InitParams, HeUniformBoundsAndZeroBias) {
    const auto spec = nn::ModelSpec::parse("conv2d:3:3 flatten dense:7 softmax-ce", {2, 5, 5}, 7);
    const auto p = nn::init_params(spec, 9);
    const double conv_bound = std::sqrt(6.0 / (2 * 9));
    const double dense_bound = std::sqrt(6.0 / (3 * 25));
    for (float w : p.layers[0].weight.values) EXPECT_LE(std::fabs(w), conv_bound);
    for (float w : p.layers[2].weight.values) EXPECT_LE(std::fabs(w), dense_bound);
    for (const auto& l : p.layers)
        for (float b : l.bias.values) EXPECT_EQ(b, 0.0f);
    EXPECT_EQ(p.layers[0].weight.shape, (nn::Shape{3, 2, 3, 3}));
}

// ---- forward ---------------------------------------------------------------------

TEST(Forward, UniformLogitsGiveLogC) {
    for (std::size_t c : {2u, 3u, 10u}) {
        const auto spec = linear_head(3, c);
        const auto p = nn::zeros_for(spec);
        const auto batch = testkit::random_batch(spec, 4, c);
        EXPECT_NEAR(nn::forward(p, spec, batch).loss, std::log(static_cast<double>(c)), 1e-15);
    }
}

TEST(Forward, LargeMarginDrivesLossToZero) {
    const auto spec = linear_head(2, 2);
    auto p = nn::zeros_for(spec);
    p.layers[0].weight.values = {100.0f, -100.0f, 0.0f, 0.0f};
    const nn::Batch batch{{1.0f, 0.0f}, {0}};
    EXPECT_LT(nn::forward(p, spec, batch).loss, 1e-80);
}

TEST(Forward, MatchesScalarRecomputation) {
    const auto spec = nn::ModelSpec::parse("dense:2 relu dense:3 softmax-ce", {2}, 3);
    auto p = nn::zeros_for(spec);
    p.layers[0].weight.values = {0.5f, -1.0f, 0.25f, 2.0f}; // (in, out) row-major
    p.layers[0].bias.values = {0.125f, -0.5f};
    p.layers[2].weight.values = {1.0f, -0.5f, 0.75f, -1.5f, 0.25f, 2.0f};
    p.layers[2].bias.values = {0.0f, 0.5f, -0.25f};
    const nn::Batch batch{{1.0f, 2.0f, -1.0f, 0.5f}, {2, 0}};

    double expected = 0.0;
    for (int s = 0; s < 2; ++s) {
        const double x0 = batch.inputs[2 * s], x1 = batch.inputs[2 * s + 1];
        const double h0 = std::max(0.0, x0 * 0.5 + x1 * 0.25 + 0.125);
        const double h1 = std::max(0.0, x0 * -1.0 + x1 * 2.0 - 0.5);
        const double z[3] = {h0 * 1.0 + h1 * -1.5 + 0.0, h0 * -0.5 + h1 * 0.25 + 0.5, h0 * 0.75 + h1 * 2.0 - 0.25};
        const double lse = std::log(std::exp(z[0]) + std::exp(z[1]) + std::exp(z[2]));
        expected += lse - z[batch.labels[s]];
    }
    expected /= 2.0;
    EXPECT_NEAR(nn::forward(p, spec, batch).loss, expected, 1e-14);
}

TEST(Forward, RejectsBadBatches) {
    const auto spec = linear_head(3, 2);
    const auto p = nn::init_params(spec, 1);
    EXPECT_THROW(nn::forward(p, spec, nn::Batch{{1.0f, 2.0f}, {0}}), ShapeError);
    EXPECT_THROW(nn::forward(p, spec, nn::Batch{{1.0f, 2.0f, 3.0f}, {2}}), ShapeError);
    EXPECT_THROW(nn::forward(p, spec, nn::Batch{{}, {}}), ShapeError);
    const float nan = std::numeric_limits<float>::quiet_NaN();
    EXPECT_THROW(nn::forward(p, spec, nn::Batch{{1.0f, nan, 0.0f}, {1}}), NumericError);
}

// ---- backward ----------------------------------------------------------------------

TEST(Backward, LogitGradientRowsSumToZero) {
    auto e = rng::make_engine(5);
    std::vector<double> logits(6 * 4);
    for (auto& z : logits) z = rng::uniform(e, -3.0, 3.0);
    const std::vector<std::int32_t> labels = {0, 1, 2, 3, 0, 1};
    const auto g = nn::loss_gradient(logits, labels, 4);
    for (std::size_t s = 0; s < 6; ++s) {
        const double sum = g[4 * s] + g[4 * s + 1] + g[4 * s + 2] + g[4 * s + 3];
        EXPECT_NEAR(sum, 0.0, 1e-16);
    }
}

TEST(Backward, LossInvariantToLogitShift) {
    auto e = rng::make_engine(6);
    std::vector<double> logits(5 * 3);
    for (auto& z : logits) z = rng::uniform(e, -2.0, 2.0);
    const std::vector<std::int32_t> labels = {0, 2, 1, 1, 0};
    const double base = nn::cross_entropy(logits, labels, 3);
    for (auto& z : logits) z += 7.25;
    EXPECT_NEAR(nn::cross_entropy(logits, labels, 3), base, 1e-12);
}

TEST(Backward, ZeroHeadOnSymmetricBatch) {
    const auto spec = linear_head(2, 2);
    const auto p = nn::zeros_for(spec);
    const nn::Batch batch{{1.0f, 0.0f, 1.0f, 0.0f}, {0, 1}};
    const auto fwd = nn::forward(p, spec, batch);
    const auto g = nn::backward(p, spec, fwd.cache);
    for (float v : g.layers[0].weight.values) EXPECT_FLOAT_EQ(v, 0.0f);
    for (float v : g.layers[0].bias.values) EXPECT_FLOAT_EQ(v, 0.0f);
}

TEST(Backward, RejectsStaleCache) {
    const auto spec = nn::make_mlp({3}, {4}, 2);
    auto p = nn::init_params(spec, 3);
    const auto fwd = nn::forward(p, spec, testkit::random_batch(spec, 2, 1));
    p.layers[1].weight.values[0] += 1.0f;
    EXPECT_THROW(nn::backward(p, spec, fwd.cache), StateError);
    const auto other = nn::make_mlp({3}, {4}, 3);
    EXPECT_THROW(nn::backward(nn::init_params(other, 3), other, fwd.cache), StateError);
}

TEST(Backward, MatchesCentralDifferencesOnEveryLayerKind) {
    auto e = rng::make_engine(2024);
    for (int variant = 0; variant < 5; ++variant) {
        for (int rep = 0; rep < 2; ++rep) {
            const auto spec = testkit::random_small_spec(variant, e);
            spec.validate();
            const std::uint64_t seed = e();
            const auto p = testkit::random_params(spec, seed);
            const auto batch = testkit::random_batch(spec, 1 + rng::uniform_index(e, 3), seed + 1);
            const auto r = testkit::gradient_check(p, spec, batch);
            EXPECT_GT(r.checked, 0u) << spec.canonical();
            EXPECT_LT(r.max_rel_error, 1e-3) << spec.canonical();
        }
    }
}

// ---- evaluate ----------------------------------------------------------------------

namespace {

// Identity head: class = index of the larger coordinate; ties go to class 0.
nn::ModelParams identity_head() {
    auto p = nn::zeros_for(linear_head(2, 2));
    p.layers[0].weight.values = {1.0f, 0.0f, 0.0f, 1.0f};
    return p;
}

data::Dataset two_class_set(const std::vector<std::pair<int, int>>& prediction_and_label) {
    data::Dataset d;
    d.sample_shape = {2};
    d.classes = 2;
    for (auto [pred, label] : prediction_and_label) {
        d.samples.push_back(pred == 0 ? 1.0f : 0.0f);
        d.samples.push_back(pred == 1 ? 1.0f : 0.0f);
        d.labels.push_back(label);
    }
    return d;
}

} // namespace

TEST(Evaluate, CountsArgmaxMatches) {
    const auto spec = linear_head(2, 2);
    const auto p = identity_head();
    EXPECT_EQ(nn::evaluate(p, spec, two_class_set({{0, 0}, {1, 1}, {1, 1}})), 1.0);
    EXPECT_EQ(nn::evaluate(p, spec, two_class_set({{0, 1}, {1, 0}, {1, 0}})), 0.0);
    std::vector<std::pair<int, int>> ten;
    for (int i = 0; i < 10; ++i) ten.push_back({i % 2, i < 7 ? i % 2 : 1 - i % 2});
    EXPECT_DOUBLE_EQ(nn::evaluate(p, spec, two_class_set(ten)), 0.7);
}

TEST(Evaluate, TiesGoToLowestIndex) {
    EXPECT_EQ(nn::argmax(std::vector<double>{0.5, 0.5, 0.1}), 0u);
    EXPECT_EQ(nn::argmax(std::vector<double>{0.1, 0.7, 0.7}), 1u);
    data::Dataset d;
    d.sample_shape = {2};
    d.classes = 2;
    d.samples = {0.0f, 0.0f};
    d.labels = {0};
    EXPECT_EQ(nn::evaluate(identity_head(), linear_head(2, 2), d), 1.0);
}

TEST(Evaluate, RejectsEmptyDataset) {
    data::Dataset d;
    d.sample_shape = {2};
    d.classes = 2;
    EXPECT_THROW(nn::evaluate(identity_head(), linear_head(2, 2), d), ShapeError);
}

// ---- optimizers ----------------------------------------------------------------------

namespace {

nn::ModelParams scalar_params(float w) {
    nn::ModelParams p;
    p.layers.push_back({{{1, 1}, {w}}, {{1}, {0.0f}}});
    return p;
}

} // namespace

TEST(Optimizer, PlainSgdStep) {
    auto p = scalar_params(1.0f);
    auto g = scalar_params(2.0f);
    nn::OptimizerConfig c;
    c.learning_rate = 0.1;
    auto s = nn::make_optimizer_state(c.kind, p);
    nn::optimizer_step(p, g, s, c, 0);
    EXPECT_EQ(p.layers[0].weight.values[0], 0.8f);
}

TEST(Optimizer, PlainSgdIsLinearInTheGradient) {
    nn::OptimizerConfig c;
    c.learning_rate = 0.5;
    auto once = scalar_params(1.0f), twice = scalar_params(1.0f);
    auto s1 = nn::make_optimizer_state(c.kind, once), s2 = nn::make_optimizer_state(c.kind, twice);
    nn::optimizer_step(once, scalar_params(0.75f), s1, c, 0);
    nn::optimizer_step(twice, scalar_params(0.25f), s2, c, 0);
    nn::optimizer_step(twice, scalar_params(0.5f), s2, c, 0);
    EXPECT_EQ(once.layers[0].weight.values[0], 0.625f);
    EXPECT_EQ(once, twice);
}

TEST(Optimizer, StepDecaySchedule) {
    nn::OptimizerConfig c;
    c.learning_rate = 0.01;
    c.decay = {{100, 150}, 10.0};
    EXPECT_NO_THROW(c.validate(200));
    EXPECT_DOUBLE_EQ(c.learning_rate_at(0), 0.01);
    EXPECT_DOUBLE_EQ(c.learning_rate_at(99), 0.01);
    EXPECT_NEAR(c.learning_rate_at(120), 0.001, 1e-18);
    EXPECT_NEAR(c.learning_rate_at(150), 0.0001, 1e-18);
    for (int e = 1; e < 200; ++e) EXPECT_LE(c.learning_rate_at(e), c.learning_rate_at(e - 1));
}

TEST(Optimizer, ConfigValidation) {
    nn::OptimizerConfig c;
    c.learning_rate = 0.0;
    EXPECT_THROW(c.validate(10), SpecError);
    c.learning_rate = 0.1;
    c.decay = {{5, 5}, 10.0};
    EXPECT_THROW(c.validate(10), SpecError);
    c.decay = {{5, 10}, 10.0};
    EXPECT_THROW(c.validate(10), SpecError);
    c.decay = {{5}, 1.0};
    EXPECT_THROW(c.validate(10), SpecError);
    EXPECT_THROW(nn::parse_optimizer_kind("lion"), SpecError);
}

TEST(Optimizer, AdagradSecondStepIsSmaller) {
    nn::OptimizerConfig c;
    c.kind = nn::OptimizerKind::adagrad;
    c.learning_rate = 0.1;
    auto p = scalar_params(1.0f);
    const auto g = scalar_params(0.5f);
    auto s = nn::make_optimizer_state(c.kind, p);
    nn::optimizer_step(p, g, s, c, 0);
    const double first = 1.0 - p.layers[0].weight.values[0];
    const float before = p.layers[0].weight.values[0];
    nn::optimizer_step(p, g, s, c, 0);
    const double second = static_cast<double>(before) - p.layers[0].weight.values[0];
    EXPECT_GT(first, 0.0);
    EXPECT_GT(second, 0.0);
    EXPECT_LT(second, first);
    // Closed form: lr * g / sqrt(t g^2) = lr / sqrt(t).
    EXPECT_NEAR(first, 0.1, 1e-6);
    EXPECT_NEAR(second, 0.1 / std::sqrt(2.0), 1e-6);
}

TEST(Optimizer, AdamwFirstStepIsLearningRate) {
    nn::OptimizerConfig c;
    c.kind = nn::OptimizerKind::adamw;
    c.learning_rate = 0.01;
    auto p = scalar_params(1.0f);
    auto s = nn::make_optimizer_state(c.kind, p);
    nn::optimizer_step(p, scalar_params(-3.0f), s, c, 0);
    EXPECT_NEAR(p.layers[0].weight.values[0], 1.01, 1e-6);
    EXPECT_EQ(s.step, 1u);
    EXPECT_EQ(s.slots.size(), 2u);
}

TEST(Optimizer, AdamwDecayIsDecoupled) {
    nn::OptimizerConfig c;
    c.kind = nn::OptimizerKind::adamw;
    c.learning_rate = 0.1;
    c.weight_decay = 0.5;
    auto p = scalar_params(2.0f);
    auto s = nn::make_optimizer_state(c.kind, p);
    nn::optimizer_step(p, scalar_params(0.0f), s, c, 0);
    // Zero gradient: only the decoupled shrink lr * wd * theta applies.
    EXPECT_NEAR(p.layers[0].weight.values[0], 2.0 - 0.1 * 0.5 * 2.0, 1e-6);
}

TEST(Optimizer, RmspropFirstStep) {
    nn::OptimizerConfig c;
    c.kind = nn::OptimizerKind::rmsprop;
    c.learning_rate = 0.01;
    c.rho = 0.9;
    auto p = scalar_params(1.0f);
    auto s = nn::make_optimizer_state(c.kind, p);
    nn::optimizer_step(p, scalar_params(2.0f), s, c, 0);
    // v = 0.1 * 4; step = lr * g / sqrt(v) = 0.01 * 2 / sqrt(0.4).
    EXPECT_NEAR(p.layers[0].weight.values[0], 1.0 - 0.02 / std::sqrt(0.4), 1e-6);
}

TEST(Optimizer, SgdMomentumAccumulatesVelocity) {
    nn::OptimizerConfig c;
    c.learning_rate = 0.5;
    c.momentum = 0.5;
    auto p = scalar_params(1.0f);
    auto s = nn::make_optimizer_state(c.kind, p);
    nn::optimizer_step(p, scalar_params(1.0f), s, c, 0);
    nn::optimizer_step(p, scalar_params(1.0f), s, c, 0);
    // v1 = 1, v2 = 1.5: theta = 1 - 0.5 - 0.75.
    EXPECT_EQ(p.layers[0].weight.values[0], -0.25f);
}

TEST(Optimizer, NonFiniteGradientLeavesStateUntouched) {
    for (auto kind : {nn::OptimizerKind::sgd, nn::OptimizerKind::adamw, nn::OptimizerKind::rmsprop,
                      nn::OptimizerKind::adagrad}) {
        nn::OptimizerConfig c;
        c.kind = kind;
        auto p = scalar_params(1.0f);
        auto s = nn::make_optimizer_state(kind, p);
        const auto p0 = p;
        const auto s0 = s;
        EXPECT_THROW(nn::optimizer_step(p, scalar_params(std::numeric_limits<float>::infinity()), s, c, 0),
                     NumericError);
        EXPECT_EQ(p, p0);
        EXPECT_EQ(s, s0);
    }
}

// ---- checkpoints -----------------------------------------------------------------------

TEST(Checkpoint, RoundTripsBitExactly) {
    const auto spec = nn::ModelSpec::parse("conv2d:2:3 relu flatten dense:4 relu dense:3 softmax-ce", {5, 5}, 3);
    nn::Checkpoint ck;
    ck.spec_hash = spec.hash();
    ck.epoch = 17;
    ck.seeds = {1, 2, 0xffffffffffffffffULL};
    ck.params = testkit::random_params(spec, 77);
    ck.optimizer = nn::make_optimizer_state(nn::OptimizerKind::adamw, ck.params);
    ck.optimizer.step = 123;
    ck.optimizer.slots[1] = testkit::random_params(spec, 78);
    ck.params.layers[0].weight.values[0] = -0.0f;
    ck.params.layers[0].weight.values[1] = std::numeric_limits<float>::denorm_min();

    const auto bytes = nn::encode_checkpoint(ck);
    const auto back = nn::decode_checkpoint(bytes, spec);
    EXPECT_EQ(back, ck);
    EXPECT_TRUE(std::signbit(back.params.layers[0].weight.values[0]));
    EXPECT_EQ(nn::encode_checkpoint(back), bytes);

    testkit::TempDir dir("ckpt");
    const auto path = nn::checkpoint_path(dir.path(), 17);
    EXPECT_EQ(path.filename(), "ckpt_00017.bin");
    nn::write_checkpoint(path, ck);
    EXPECT_EQ(nn::read_checkpoint(path, spec), ck);
}

TEST(Checkpoint, RejectsCorruption) {
    const auto spec = nn::make_mlp({3}, {4}, 2);
    nn::Checkpoint ck{spec.hash(), 2, {1, 2, 3}, nn::init_params(spec, 1), {}};
    ck.optimizer = nn::make_optimizer_state(nn::OptimizerKind::sgd, ck.params);
    const auto bytes = nn::encode_checkpoint(ck);

    auto bad_magic = bytes;
    bad_magic[0] = std::byte{'X'};
    EXPECT_THROW(nn::decode_checkpoint(bad_magic, spec), FormatError);

    auto bad_version = bytes;
    bad_version[8] = std::byte{9};
    EXPECT_THROW(nn::decode_checkpoint(bad_version, spec), FormatError);

    const std::vector<std::byte> truncated(bytes.begin(), bytes.end() - 3);
    EXPECT_THROW(nn::decode_checkpoint(truncated, spec), FormatError);

    auto trailing = bytes;
    trailing.push_back(std::byte{0});
    EXPECT_THROW(nn::decode_checkpoint(trailing, spec), FormatError);

    EXPECT_THROW(nn::decode_checkpoint(bytes, nn::make_mlp({3}, {5}, 2)), FormatError);
}
