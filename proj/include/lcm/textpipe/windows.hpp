#pragma once

#include "lcm/textpipe/tokenizer.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace lcm {

/// Fixed-width encoder inputs cut from one TokenSequence.
///
/// Every row is `start_of_text, content..., end_of_text, pad...` and exactly
/// context_len long. A sequence that fits in content_capacity gives a single
/// padded row. Longer sequences give rows starting at 0, stride, 2*stride, ...
/// plus a final row right-aligned to the sequence end; those rows are full and
/// carry no padding.
struct WindowBatch {
    std::vector<std::vector<TokenId>> windows;
    std::vector<std::vector<std::uint8_t>> masks;
    std::vector<std::size_t> starts;
    std::size_t context_len = 0;
    std::size_t content_capacity = 0;
    std::size_t stride = 0;
    std::size_t sequence_length = 0;

    std::size_t size() const noexcept { return windows.size(); }

    // Content tokens held by window w (excluding specials).
    std::size_t content_length(std::size_t w) const;
};

// Half the content capacity, rounded up (38 for a 77-token context).
std::size_t default_stride(std::size_t context_len);

void validate_window_params(std::size_t context_len, std::size_t stride);

WindowBatch make_windows(const TokenSequence& seq, std::size_t context_len, std::size_t stride);

std::size_t window_count(std::size_t sequence_length, std::size_t content_capacity, std::size_t stride);

} // namespace lcm
