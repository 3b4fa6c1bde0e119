#pragma once

#include "lcm/data/dataset.hpp"
#include "lcm/encoders/params.hpp"
#include "lcm/longcap/long_text.hpp"

#include <span>

namespace lcm {

template <class T>
struct GradientResult {
    T loss{};
    ModelParams<T> grads;
};

// Contrastive loss of a batch through both towers and the sliding-window
// caption path. Forward only.
template <class T>
T batch_loss(std::span<const PairedSample* const> batch, const ModelParams<T>& params, const EncoderConfig& cfg,
             const LongTextConfig& ltc, std::size_t threads = 1);

/// Loss and its gradient w.r.t. every parameter tensor.
///
/// Each item gets its own gradient buffer; buffers are summed in batch order,
/// so the result is bitwise independent of `threads`. Window activations are
/// recomputed during the reverse pass instead of being held for the whole
/// batch. Throws TrainingDiverged when the loss is not finite.
template <class T>
GradientResult<T> compute_gradients(std::span<const PairedSample* const> batch, const ModelParams<T>& params,
                                    const EncoderConfig& cfg, const LongTextConfig& ltc, std::size_t threads = 1);

} // namespace lcm
