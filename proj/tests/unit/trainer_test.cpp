#include "test_support.hpp"

#include "lcm/error.hpp"
#include "lcm/training/trainer.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>

namespace lcm {
namespace {

ModelParams<float> filled_like(const ModelParams<float>& p, float value)
{
    auto g = p.zeros_like();
    for (auto& t : g.tensors()) t.value->setConstant(value);
    return g;
}

TEST(Adam, ZeroGradientLeavesParams)
{
    const auto cfg = testing::tiny_config(20);
    TrainConfig tc;
    tc.learning_rate = 1e-2;
    auto s = init_train_state(cfg, tc);
    const auto before = s.params;
    adam_step(s, s.params.zeros_like(), tc);
    EXPECT_EQ(s.step, 1);
    const auto a = before.tensors();
    const auto b = s.params.tensors();
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_TRUE(*a[i].value == *b[i].value) << a[i].name;
}

TEST(Adam, FirstStepMovesByLearningRate)
{
    const auto cfg = testing::tiny_config(20);
    TrainConfig tc;
    tc.learning_rate = 1e-3;
    for (float g : {0.5f, -3.0f, 1e-3f}) {
        auto s = init_train_state(cfg, tc);
        const auto before = s.params;
        adam_step(s, filled_like(s.params, g), tc);
        // t = 1: m̂ = g, v̂ = g², update = -lr g / (|g| + eps)
        const double want = -tc.learning_rate * g / (std::abs(g) + tc.adam_eps);
        const auto a = before.tensors();
    const auto b = s.params.tensors();
        for (std::size_t i = 0; i + 1 < a.size(); ++i) // log_temperature last, checked below
            for (Eigen::Index k = 0; k < a[i].value->size(); ++k)
                ASSERT_NEAR(b[i].value->data()[k] - a[i].value->data()[k], want, 1e-7) << a[i].name;
    }
}

TEST(Adam, MatchesScalarRecurrenceOverSteps)
{
    const auto cfg = testing::tiny_config(20);
    TrainConfig tc;
    tc.learning_rate = 0.01;
    auto s = init_train_state(cfg, tc);
    double p = s.params.text.projection(0, 0), m = 0, v = 0;
    const double gs[] = {0.3, -0.1, 0.7, 0.0, -2.0};
    for (int t = 1; t <= 5; ++t) {
        const double g = gs[t - 1];
        auto grads = s.params.zeros_like();
        grads.text.projection(0, 0) = static_cast<float>(g);
        adam_step(s, grads, tc);
        m = 0.9 * m + 0.1 * g;
        v = 0.999 * v + 0.001 * g * g;
        p -= 0.01 * (m / (1 - std::pow(0.9, t))) / (std::sqrt(v / (1 - std::pow(0.999, t))) + 1e-8);
        EXPECT_NEAR(s.params.text.projection(0, 0), p, 1e-6);
    }
}

TEST(Adam, DeterministicAndZeroLearningRate)
{
    const auto cfg = testing::tiny_config(20);
    TrainConfig tc;
    auto a = init_train_state(cfg, tc), b = init_train_state(cfg, tc);
    const auto g = filled_like(a.params, 0.25f);
    adam_step(a, g, tc);
    adam_step(b, g, tc);
    const auto ta = a.params.tensors();
    const auto tb = b.params.tensors();
    for (std::size_t i = 0; i < ta.size(); ++i) EXPECT_TRUE(*ta[i].value == *tb[i].value);

    tc.learning_rate = 0.0; // bypasses validate, as adam_step does not re-check
    auto c = init_train_state(cfg, TrainConfig{});
    const auto before = c.params;
    adam_step(c, g, tc);
    const auto x = before.tensors();
    const auto y = c.params.tensors();
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_TRUE(*x[i].value == *y[i].value);
}

TEST(Adam, ClampsLogTemperature)
{
    const auto cfg = testing::tiny_config(20);
    TrainConfig tc;
    tc.learning_rate = 10.0;
    auto s = init_train_state(cfg, tc);
    auto g = s.params.zeros_like();
    g.log_temperature(0, 0) = -1.0f;
    adam_step(s, g, tc);
    EXPECT_FLOAT_EQ(s.params.temperature_log(), static_cast<float>(std::log(100.0)));
}

TEST(TrainConfig, Validation)
{
    TrainConfig tc;
    tc.epochs = 0;
    EXPECT_THROW(tc.validate(), Error);
    tc = {};
    tc.batch_size = 1;
    EXPECT_THROW(tc.validate(), Error);
    tc = {};
    tc.learning_rate = 0;
    EXPECT_THROW(tc.validate(), Error);
    TrainConfig defaults;
    EXPECT_EQ(defaults.learning_rate, 1e-6);
    EXPECT_EQ(defaults.epochs, 10u);
    EXPECT_EQ(defaults.batch_size, 50u);
}

TEST(Schedule, StepsPerEpoch)
{
    EXPECT_EQ(steps_per_epoch(100, 50) * 10, 20u);
    EXPECT_EQ(steps_per_epoch(101, 50), 2u); // trailing singleton dropped
    EXPECT_EQ(steps_per_epoch(102, 50), 3u);
    EXPECT_EQ(steps_per_epoch(1, 50), 0u);
}

TEST(Schedule, EpochOrderIsSeededPermutation)
{
    const auto a = epoch_order(50, 3, 0);
    EXPECT_EQ(a, epoch_order(50, 3, 0));
    EXPECT_NE(a, epoch_order(50, 3, 1));
    EXPECT_EQ(epoch_order(50, 3, 1), epoch_order(50, 4, 0)); // seed + epoch
    EXPECT_EQ(std::set<std::size_t>(a.begin(), a.end()).size(), 50u);
}

TEST(LogLine, Format)
{
    EXPECT_EQ(format_log_line({3, 2.772588722239781, 1.23456, 4}), "3\t2.77258872\t1.235");
}

struct Data {
    Vocabulary vocab = testing::letters_vocab();
    EncoderConfig cfg = testing::tiny_config(vocab.size());
    LongTextConfig ltc{cfg.context_len, 3, false};
    std::vector<PairedSample> samples;

    explicit Data(std::size_t n)
    {
        Rng rng(9);
        for (std::size_t i = 0; i < n; ++i)
            samples.push_back({"s" + std::to_string(i), testing::random_image(cfg.image_size, rng),
                               testing::random_sequence(vocab, 2 + rng.below(12), rng)});
    }
};

TEST(Train, StepCountAndRecords)
{
    Data d(100);
    TrainConfig tc;
    tc.learning_rate = 1e-3;
    auto s = init_train_state(d.cfg, tc);
    std::vector<std::size_t> seen;
    const auto recs = train(d.samples, s, tc, d.cfg, d.ltc, 1,
                            [&](const EpochRecord& r, const TrainState&) { seen.push_back(r.epoch); });
    EXPECT_EQ(s.step, 20);
    ASSERT_EQ(recs.size(), 10u);
    EXPECT_EQ(seen, (std::vector<std::size_t>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10}));
    EXPECT_EQ(s.epoch_losses.size(), 10u);
    for (const auto& r : recs) {
        EXPECT_EQ(r.steps, 2u);
        EXPECT_TRUE(std::isfinite(r.mean_loss));
    }
}

TEST(Train, SameSeedSameTrajectory)
{
    Data d(24);
    TrainConfig tc;
    tc.learning_rate = 1e-3;
    tc.batch_size = 8;
    tc.epochs = 3;
    auto a = init_train_state(d.cfg, tc), b = init_train_state(d.cfg, tc);
    train(d.samples, a, tc, d.cfg, d.ltc, 1);
    train(d.samples, b, tc, d.cfg, d.ltc, 2);
    EXPECT_EQ(a.epoch_losses, b.epoch_losses);
    const auto x = a.params.tensors();
    const auto y = b.params.tensors();
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_TRUE(*x[i].value == *y[i].value) << x[i].name;
}

TEST(Train, DivergenceKeepsLastFiniteState)
{
    Data d(8);
    TrainConfig tc;
    tc.learning_rate = 1e-3;
    tc.batch_size = 4;
    auto s = init_train_state(d.cfg, tc);
    s.params.text.projection(0, 0) = std::numeric_limits<float>::infinity();
    const auto before = s.params;
    try {
        train(d.samples, s, tc, d.cfg, d.ltc, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::TrainingDiverged);
    }
    EXPECT_EQ(s.step, 0);
    EXPECT_TRUE(before.image.projection == s.params.image.projection);
}

TEST(Train, RejectsTooSmallData)
{
    Data d(1);
    TrainConfig tc;
    auto s = init_train_state(d.cfg, tc);
    try {
        train(d.samples, s, tc, d.cfg, d.ltc, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::DatasetTooSmall);
    }
}

} // namespace
} // namespace lcm
