#pragma once

// Forward passes that record activations, and the matching reverse passes.
// Gradients are accumulated (+=) into a ModelParams of the same shapes.

#include "lcm/encoders/encoders.hpp"

#include <vector>

namespace lcm {

template <class T>
struct LayerNormCache {
    Matrix<T> xhat;
    Eigen::Matrix<T, Eigen::Dynamic, 1> inv_std;
};

template <class T>
struct BlockCache {
    LayerNormCache<T> ln1;
    Matrix<T> ln1_out;
    Matrix<T> q, k, v;
    std::vector<Matrix<T>> probs; // one L x L matrix per head
    Matrix<T> heads_out;
    LayerNormCache<T> ln2;
    Matrix<T> ln2_out;
    Matrix<T> fc_pre;
    Matrix<T> fc_act;
};

template <class T>
struct TextCache {
    std::vector<TokenId> ids;
    std::vector<std::uint8_t> mask;
    std::vector<BlockCache<T>> blocks;
    LayerNormCache<T> ln_final;
    Matrix<T> pooled;
    std::size_t eot_position = 0;
};

template <class T>
struct ImageCache {
    Matrix<T> patches;
    LayerNormCache<T> ln_pre;
    std::vector<BlockCache<T>> blocks;
    LayerNormCache<T> ln_post;
    Matrix<T> class_state;
};

template <class T>
RowVector<T> text_window_forward(std::span<const TokenId> row, std::span<const std::uint8_t> mask,
                                 const ModelParams<T>& params, const EncoderConfig& cfg, TextCache<T>& cache);

template <class T>
void text_window_backward(const TextCache<T>& cache, const RowVector<T>& d_out, const ModelParams<T>& params,
                          const EncoderConfig& cfg, ModelParams<T>& grads);

template <class T>
RowVector<T> image_forward(const Image& image, const ModelParams<T>& params, const EncoderConfig& cfg,
                           ImageCache<T>& cache);

template <class T>
void image_backward(const ImageCache<T>& cache, const RowVector<T>& d_out, const ModelParams<T>& params,
                    const EncoderConfig& cfg, ModelParams<T>& grads);

// Given v and the gradient w.r.t. v/|v|, returns the gradient w.r.t. v.
template <class T>
RowVector<T> normalize_backward(const RowVector<T>& v, const RowVector<T>& d_unit);

} // namespace lcm
