#include "lcm/training/trainer.hpp"

#include "lcm/error.hpp"
#include "lcm/training/gradients.hpp"
#include "lcm/util/random.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

namespace lcm {

void TrainConfig::validate() const
{
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
        throw Error(ErrorKind::InvalidConfig, "learning_rate: must be > 0");
    if (epochs < 1) throw Error(ErrorKind::InvalidConfig, "epochs: must be >= 1");
    if (batch_size < 2) throw Error(ErrorKind::InvalidConfig, "batch_size: must be >= 2");
    if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0)) throw Error(ErrorKind::InvalidConfig, "adam_beta1: must be in [0, 1)");
    if (!(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) throw Error(ErrorKind::InvalidConfig, "adam_beta2: must be in [0, 1)");
    if (!(adam_eps > 0.0)) throw Error(ErrorKind::InvalidConfig, "adam_eps: must be > 0");
}

std::string format_log_line(const EpochRecord& r)
{
    char buf[128];
    std::snprintf(buf, sizeof buf, "%zu\t%.9g\t%.3f", r.epoch, r.mean_loss, r.seconds);
    return buf;
}

std::size_t steps_per_epoch(std::size_t dataset_size, std::size_t batch_size)
{
    const std::size_t full = dataset_size / batch_size;
    return full + (dataset_size % batch_size >= 2 ? 1 : 0);
}

std::vector<std::size_t> epoch_order(std::size_t dataset_size, std::uint64_t seed, std::size_t epoch_index)
{
    return shuffled_indices(dataset_size, seed + epoch_index);
}

std::vector<EpochRecord> train(std::span<const PairedSample> data, TrainState& state, const TrainConfig& train,
                               const EncoderConfig& cfg, const LongTextConfig& ltc, std::size_t threads,
                               const EpochCallback& on_epoch)
{
    train.validate();
    if (data.empty()) throw Error(ErrorKind::DatasetTooSmall, "training split is empty");
    if (steps_per_epoch(data.size(), train.batch_size) == 0)
        throw Error(ErrorKind::DatasetTooSmall, "training split has fewer than 2 samples");

    std::vector<EpochRecord> records;
    for (std::size_t epoch = 0; epoch < train.epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto order = epoch_order(data.size(), train.seed, epoch);
        double loss_sum = 0.0;
        std::size_t steps = 0;
        std::vector<const PairedSample*> batch;
        for (std::size_t lo = 0; lo < order.size(); lo += train.batch_size) {
            const std::size_t hi = std::min(order.size(), lo + train.batch_size);
            if (hi - lo < 2) break;
            batch.clear();
            for (std::size_t i = lo; i < hi; ++i) batch.push_back(&data[order[i]]);
            auto result = compute_gradients<float>(batch, state.params, cfg, ltc, threads);
            adam_step(state, result.grads, train);
            loss_sum += static_cast<double>(result.loss);
            ++steps;
        }
        EpochRecord rec;
        rec.epoch = epoch + 1;
        rec.steps = steps;
        rec.mean_loss = loss_sum / static_cast<double>(steps);
        rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        state.epoch_losses.push_back(rec.mean_loss);
        records.push_back(rec);
        if (on_epoch) on_epoch(rec, state);
    }
    return records;
}

} // namespace lcm
