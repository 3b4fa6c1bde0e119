#include "lcm/training/loss.hpp"

#include "lcm/error.hpp"

#include <cmath>
#include <string>

namespace lcm {

namespace {

// Softmax along each row, with the log-sum-exp kept for the loss.
template <class T>
Matrix<T> row_softmax(const Matrix<T>& x, Eigen::Matrix<T, Eigen::Dynamic, 1>& lse)
{
    Matrix<T> p(x.rows(), x.cols());
    lse.resize(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const T mx = x.row(i).maxCoeff();
        p.row(i) = (x.row(i).array() - mx).exp().matrix();
        const T s = p.row(i).sum();
        p.row(i) /= s;
        lse(i) = mx + std::log(s);
    }
    return p;
}

} // namespace

template <class T>
ContrastiveResult<T> contrastive_loss_from_logits(const Matrix<T>& logits)
{
    const auto n = logits.rows();
    if (logits.cols() != n) throw Error(ErrorKind::Shape, "logit matrix must be square");
    if (n < 2) throw Error(ErrorKind::BatchTooSmall, "contrastive loss needs at least 2 pairs, got " + std::to_string(n));

    Eigen::Matrix<T, Eigen::Dynamic, 1> lse_rows, lse_cols;
    const Matrix<T> p_rows = row_softmax<T>(logits, lse_rows);
    const Matrix<T> logits_t = logits.transpose();
    const Matrix<T> p_cols_t = row_softmax<T>(logits_t, lse_cols);

    T row_ce = 0, col_ce = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        row_ce += lse_rows(i) - logits(i, i);
        col_ce += lse_cols(i) - logits(i, i);
    }
    const T nn = static_cast<T>(n);

    ContrastiveResult<T> r;
    r.loss = T(0.5) * (row_ce / nn + col_ce / nn);
    r.logits = logits;
    r.d_logits = (p_rows + p_cols_t.transpose()) * (T(0.5) / nn);
    r.d_logits.diagonal().array() -= T(1) / nn;
    return r;
}

template <class T>
ContrastiveResult<T> contrastive_loss(const Matrix<T>& image_embs, const Matrix<T>& text_embs, T log_temperature)
{
    if (image_embs.rows() != text_embs.rows() || image_embs.cols() != text_embs.cols())
        throw Error(ErrorKind::Shape, "image and text embedding lists differ in shape");
    if (image_embs.rows() < 2)
        throw Error(ErrorKind::BatchTooSmall,
                    "contrastive loss needs at least 2 pairs, got " + std::to_string(image_embs.rows()));
    Matrix<T> logits(image_embs.rows(), text_embs.rows());
    logits.noalias() = image_embs * text_embs.transpose();
    logits *= std::exp(log_temperature);
    return contrastive_loss_from_logits<T>(logits);
}

template ContrastiveResult<float> contrastive_loss_from_logits<float>(const Matrix<float>&);
template ContrastiveResult<double> contrastive_loss_from_logits<double>(const Matrix<double>&);
template ContrastiveResult<float> contrastive_loss<float>(const Matrix<float>&, const Matrix<float>&, float);
template ContrastiveResult<double> contrastive_loss<double>(const Matrix<double>&, const Matrix<double>&, double);

} // namespace lcm
