#pragma once

#include "lcm/encoders/encoders.hpp"
#include "lcm/textpipe/windows.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace lcm {

/// How a caption longer than one context is cut and recombined. Aggregation
/// is always the arithmetic mean of per-window projected embeddings.
struct LongTextConfig {
    std::size_t context_len = 77;
    std::size_t stride = 38;
    // Normalize every window embedding before the mean (the final result is
    // always normalized).
    bool normalize_before_mean = false;

    void validate() const;
};

LongTextConfig default_long_text_config(std::size_t context_len);

struct LongTextTrace {
    // Text-encoder forward passes performed.
    std::size_t forward_passes = 0;
    std::vector<std::size_t> window_starts;
};

/// Encodes each sliding window of `seq`, averages the window embeddings in
/// window order (sequential summation) and returns the unit-norm result.
template <class T>
RowVector<T> encode_long_text(const TokenSequence& seq, const ModelParams<T>& params, const EncoderConfig& cfg,
                              const LongTextConfig& ltc, LongTextTrace* trace = nullptr);

// Mean of window embeddings (optionally normalized first), then normalized.
// Exposed separately so the aggregation rule can be checked on its own.
template <class T>
RowVector<T> aggregate_windows(std::span<const RowVector<T>> window_embeddings, bool normalize_before_mean);

/// encode_long_text over a list. With threads > 1 items are spread across
/// workers; every item is still reduced in window order so results do not
/// depend on the thread count. Errors carry the failing item's index.
std::vector<Embedding> encode_caption_batch(std::span<const TokenSequence> seqs, const ModelParams<float>& params,
                                            const EncoderConfig& cfg, const LongTextConfig& ltc,
                                            std::size_t threads = 1);

} // namespace lcm
