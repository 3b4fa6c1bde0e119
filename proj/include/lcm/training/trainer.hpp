#pragma once

#include "lcm/data/dataset.hpp"
#include "lcm/encoders/params.hpp"
#include "lcm/longcap/long_text.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace lcm {

/// Optimizer and loop settings. The defaults are the fine-tuning values
/// (Adam at 1e-6, 10 epochs, batch 50); desk-scale runs override the rate.
struct TrainConfig {
    double learning_rate = 1e-6;
    std::size_t epochs = 10;
    std::size_t batch_size = 50;
    std::uint64_t seed = 0;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;

    void validate() const;
};

struct TrainState {
    ModelParams<float> params;
    ModelParams<float> first_moment;
    ModelParams<float> second_moment;
    std::int64_t step = 0;
    std::vector<double> epoch_losses;
};

// Parameters from init_params(cfg, train.seed), zero moments.
TrainState init_train_state(const EncoderConfig& cfg, const TrainConfig& train);
TrainState make_train_state(ModelParams<float> params);

/// Adam with bias correction; log_temperature is clamped to
/// [ln(1/100), ln(100)] afterwards.
void adam_step(TrainState& state, const ModelParams<float>& grads, const TrainConfig& cfg);

struct EpochRecord {
    std::size_t epoch = 0; // 1-based
    double mean_loss = 0.0;
    double seconds = 0.0;
    std::size_t steps = 0;
};

// "<epoch>\t<mean loss, 9 significant digits>\t<seconds>"
std::string format_log_line(const EpochRecord& r);

// Batches per epoch after dropping a trailing batch of fewer than 2 samples.
std::size_t steps_per_epoch(std::size_t dataset_size, std::size_t batch_size);

// Sample order for one epoch: a shuffle seeded with seed + epoch_index.
std::vector<std::size_t> epoch_order(std::size_t dataset_size, std::uint64_t seed, std::size_t epoch_index);

using EpochCallback = std::function<void(const EpochRecord&, const TrainState&)>;

/// Runs train.epochs epochs of shuffled mini-batch Adam. On divergence the
/// TrainingDiverged error propagates and `state` holds the last finite step.
std::vector<EpochRecord> train(std::span<const PairedSample> data, TrainState& state, const TrainConfig& train,
                               const EncoderConfig& cfg, const LongTextConfig& ltc, std::size_t threads = 1,
                               const EpochCallback& on_epoch = {});

} // namespace lcm
