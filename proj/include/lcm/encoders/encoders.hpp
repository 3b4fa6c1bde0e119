#pragma once

#include "lcm/encoders/config.hpp"
#include "lcm/encoders/params.hpp"
#include "lcm/encoders/tensor.hpp"
#include "lcm/textpipe/vocabulary.hpp"

#include <cstdint>
#include <span>

namespace lcm {

/// Runs the text tower over one window row.
///
/// Attention is bidirectional and restricted to positions where mask == 1;
/// the row must look like `1...1 0...0` with at least two valid positions,
/// the last valid one being end_of_text. Final hidden states are zeroed at pad
/// positions, average-pooled with cfg.pool_kernel, read at the group holding
/// end_of_text, and projected. The result is not normalized.
template <class T>
RowVector<T> encode_text_window(std::span<const TokenId> row, std::span<const std::uint8_t> mask,
                                const ModelParams<T>& params, const EncoderConfig& cfg);

/// Vision transformer: patchify, project, prepend class token, run blocks,
/// read the class token, project. The result is not normalized.
template <class T>
RowVector<T> encode_image(const Image& image, const ModelParams<T>& params, const EncoderConfig& cfg);

// Non-overlapping mean over groups of `kernel` consecutive rows; the final
// partial group is averaged over its actual size. kernel == 1 copies.
template <class T>
Matrix<T> avg_pool_sequence(const Matrix<T>& hidden, std::size_t kernel);

// Row index of the pooled group that contains sequence position `position`.
inline std::size_t pooled_index(std::size_t position, std::size_t kernel) { return position / kernel; }

template <class T>
RowVector<T> normalize(const RowVector<T>& v);

} // namespace lcm
