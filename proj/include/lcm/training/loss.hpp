#pragma once

#include "lcm/encoders/tensor.hpp"

namespace lcm {

template <class T>
struct ContrastiveResult {
    T loss{};
    Matrix<T> logits;
    Matrix<T> d_logits;
};

/// Symmetric InfoNCE over a square logit matrix whose diagonal holds the
/// positives: mean of the row-wise and column-wise softmax cross-entropies.
/// d_logits is the gradient of the loss w.r.t. the logits.
template <class T>
ContrastiveResult<T> contrastive_loss_from_logits(const Matrix<T>& logits);

/// logits[i][j] = exp(log_temperature) * <image_i, text_j> for row-stacked
/// unit-norm embeddings, then contrastive_loss_from_logits.
template <class T>
ContrastiveResult<T> contrastive_loss(const Matrix<T>& image_embs, const Matrix<T>& text_embs, T log_temperature);

} // namespace lcm
