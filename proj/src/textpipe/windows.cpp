#include "lcm/textpipe/windows.hpp"

#include "lcm/error.hpp"

#include <algorithm>

namespace lcm {

std::size_t WindowBatch::content_length(std::size_t w) const
{
    return std::min(content_capacity, sequence_length - starts.at(w));
}

std::size_t default_stride(std::size_t context_len)
{
    if (context_len < 3) throw Error(ErrorKind::InvalidContext, "context_len must be >= 3");
    return (context_len - 2 + 1) / 2;
}

void validate_window_params(std::size_t context_len, std::size_t stride)
{
    if (context_len < 3)
        throw Error(ErrorKind::InvalidContext, "context_len " + std::to_string(context_len) + " < 3");
    const std::size_t capacity = context_len - 2;
    if (stride < 1 || stride > capacity)
        throw Error(ErrorKind::InvalidStride, "stride " + std::to_string(stride) + " outside [1, " +
                                                  std::to_string(capacity) + "]");
}

std::size_t window_count(std::size_t sequence_length, std::size_t content_capacity, std::size_t stride)
{
    validate_window_params(content_capacity + 2, stride);
    if (sequence_length <= content_capacity) return 1;
    const std::size_t excess = sequence_length - content_capacity;
    return (excess + stride - 1) / stride + 1;
}

WindowBatch make_windows(const TokenSequence& seq, std::size_t context_len, std::size_t stride)
{
    validate_window_params(context_len, stride);
    const auto& sp = seq.specials;
    WindowBatch batch;
    batch.context_len = context_len;
    batch.content_capacity = context_len - 2;
    batch.stride = stride;
    batch.sequence_length = seq.size();

    const std::size_t cap = batch.content_capacity;
    const std::size_t len = seq.size();

    auto emit = [&](std::size_t start) {
        const std::size_t n = std::min(cap, len - start);
        std::vector<TokenId> row(context_len, sp.pad);
        std::vector<std::uint8_t> mask(context_len, 0);
        row[0] = sp.start_of_text;
        std::copy_n(seq.ids.begin() + static_cast<std::ptrdiff_t>(start), n, row.begin() + 1);
        row[n + 1] = sp.end_of_text;
        std::fill_n(mask.begin(), n + 2, std::uint8_t{1});
        batch.windows.push_back(std::move(row));
        batch.masks.push_back(std::move(mask));
        batch.starts.push_back(start);
    };

    std::size_t start = 0;
    while (true) {
        if (start + cap >= len) {
            emit(len > cap ? std::min(start, len - cap) : 0);
            break;
        }
        emit(start);
        start += stride;
    }
    return batch;
}

} // namespace lcm
