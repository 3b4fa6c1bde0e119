#pragma once

// Shared transformer building blocks (private to the encoders module).

#include "lcm/encoders/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace lcm::detail {

inline constexpr double kLayerNormEps = 1e-5;
inline constexpr double kGeluScale = 1.702;

template <class T>
Matrix<T> layer_norm_forward(const Matrix<T>& x, const Matrix<T>& gain, const Matrix<T>& bias, LayerNormCache<T>& c)
{
    const auto rows = x.rows();
    const auto width = static_cast<T>(x.cols());
    c.xhat.resize(rows, x.cols());
    c.inv_std.resize(rows);
    Matrix<T> y(rows, x.cols());
    for (Eigen::Index r = 0; r < rows; ++r) {
        const T mean = x.row(r).sum() / width;
        const auto centered = (x.row(r).array() - mean).matrix();
        const T var = centered.squaredNorm() / width;
        const T inv = T(1) / std::sqrt(var + T(kLayerNormEps));
        c.inv_std(r) = inv;
        c.xhat.row(r) = centered * inv;
        y.row(r) = c.xhat.row(r).cwiseProduct(gain) + bias;
    }
    return y;
}

template <class T>
Matrix<T> layer_norm_backward(const Matrix<T>& dy, const LayerNormCache<T>& c, const Matrix<T>& gain,
                              Matrix<T>& d_gain, Matrix<T>& d_bias)
{
    const auto width = static_cast<T>(dy.cols());
    d_gain += dy.cwiseProduct(c.xhat).colwise().sum();
    d_bias += dy.colwise().sum();
    Matrix<T> dx(dy.rows(), dy.cols());
    for (Eigen::Index r = 0; r < dy.rows(); ++r) {
        const RowVector<T> dxhat = dy.row(r).cwiseProduct(gain);
        const T mean_d = dxhat.sum() / width;
        const T mean_dx = dxhat.dot(c.xhat.row(r)) / width;
        dx.row(r) = c.inv_std(r) * ((dxhat.array() - mean_d) - c.xhat.row(r).array() * mean_dx).matrix();
    }
    return dx;
}

template <class T>
Matrix<T> linear_forward(const Matrix<T>& x, const Matrix<T>& w, const Matrix<T>& b)
{
    Matrix<T> y(x.rows(), w.cols());
    y.noalias() = x * w;
    y.rowwise() += b.row(0);
    return y;
}

template <class T>
Matrix<T> linear_backward(const Matrix<T>& dy, const Matrix<T>& x, const Matrix<T>& w, Matrix<T>& dw, Matrix<T>& db)
{
    dw.noalias() += x.transpose() * dy;
    db += dy.colwise().sum();
    Matrix<T> dx(dy.rows(), w.rows());
    dx.noalias() = dy * w.transpose();
    return dx;
}

template <class T>
T sigmoid(T x)
{
    return T(1) / (T(1) + std::exp(-x));
}

// x * sigmoid(1.702 x)
template <class T>
Matrix<T> quick_gelu(const Matrix<T>& x)
{
    return x.unaryExpr([](T v) { return v * sigmoid(T(kGeluScale) * v); });
}

template <class T>
Matrix<T> quick_gelu_backward(const Matrix<T>& dy, const Matrix<T>& x)
{
    return dy.binaryExpr(x, [](T g, T v) {
        const T s = sigmoid(T(kGeluScale) * v);
        return g * (s + T(kGeluScale) * v * s * (T(1) - s));
    });
}

// Multi-head self attention; keys with mask == 0 receive zero probability.
// An empty mask means every key is valid.
template <class T>
Matrix<T> attention_forward(const Matrix<T>& a, const BlockParams<T>& p, std::size_t heads,
                            std::span<const std::uint8_t> mask, BlockCache<T>& c)
{
    const auto len = a.rows();
    const auto width = a.cols();
    const auto hd = width / static_cast<Eigen::Index>(heads);
    const T scale = T(1) / std::sqrt(static_cast<T>(hd));

    c.q = linear_forward(a, p.q_weight, p.q_bias);
    c.k = linear_forward(a, p.k_weight, p.k_bias);
    c.v = linear_forward(a, p.v_weight, p.v_bias);
    c.probs.assign(heads, Matrix<T>());
    c.heads_out.resize(len, width);

    for (std::size_t h = 0; h < heads; ++h) {
        const auto off = static_cast<Eigen::Index>(h) * hd;
        Matrix<T> s(len, len);
        s.noalias() = c.q.middleCols(off, hd) * c.k.middleCols(off, hd).transpose();
        for (Eigen::Index i = 0; i < len; ++i) {
            T mx = -std::numeric_limits<T>::infinity();
            for (Eigen::Index j = 0; j < len; ++j)
                if (mask.empty() || mask[static_cast<std::size_t>(j)]) mx = std::max(mx, s(i, j) * scale);
            T total = 0;
            for (Eigen::Index j = 0; j < len; ++j) {
                T e = 0;
                if (mask.empty() || mask[static_cast<std::size_t>(j)]) e = std::exp(s(i, j) * scale - mx);
                s(i, j) = e;
                total += e;
            }
            s.row(i) /= total;
        }
        c.heads_out.middleCols(off, hd).noalias() = s * c.v.middleCols(off, hd);
        c.probs[h] = std::move(s);
    }
    return linear_forward(c.heads_out, p.out_weight, p.out_bias);
}

template <class T>
Matrix<T> attention_backward(const Matrix<T>& d_out, const Matrix<T>& a, const BlockParams<T>& p, std::size_t heads,
                             const BlockCache<T>& c, BlockParams<T>& g)
{
    const auto len = a.rows();
    const auto width = a.cols();
    const auto hd = width / static_cast<Eigen::Index>(heads);
    const T scale = T(1) / std::sqrt(static_cast<T>(hd));

    const Matrix<T> d_heads = linear_backward(d_out, c.heads_out, p.out_weight, g.out_weight, g.out_bias);
    Matrix<T> dq(len, width), dk(len, width), dv(len, width);

    for (std::size_t h = 0; h < heads; ++h) {
        const auto off = static_cast<Eigen::Index>(h) * hd;
        const Matrix<T>& prob = c.probs[h];
        const auto d_oh = d_heads.middleCols(off, hd);
        dv.middleCols(off, hd).noalias() = prob.transpose() * d_oh;
        Matrix<T> dp(len, len);
        dp.noalias() = d_oh * c.v.middleCols(off, hd).transpose();
        // softmax backward, then fold in the 1/sqrt(d) scale
        const Eigen::Matrix<T, Eigen::Dynamic, 1> row_dot = dp.cwiseProduct(prob).rowwise().sum();
        Matrix<T> ds = prob.cwiseProduct(dp - row_dot.replicate(1, len)) * scale;
        dq.middleCols(off, hd).noalias() = ds * c.k.middleCols(off, hd);
        dk.middleCols(off, hd).noalias() = ds.transpose() * c.q.middleCols(off, hd);
    }

    Matrix<T> da = linear_backward(dq, a, p.q_weight, g.q_weight, g.q_bias);
    da += linear_backward(dk, a, p.k_weight, g.k_weight, g.k_bias);
    da += linear_backward(dv, a, p.v_weight, g.v_weight, g.v_bias);
    return da;
}

// Pre-norm residual block: x + attn(ln1(x)), then + mlp(ln2(.)).
template <class T>
Matrix<T> block_forward(const Matrix<T>& x, const BlockParams<T>& p, std::size_t heads,
                        std::span<const std::uint8_t> mask, BlockCache<T>& c)
{
    c.ln1_out = layer_norm_forward(x, p.ln1_gain, p.ln1_bias, c.ln1);
    Matrix<T> x1 = x + attention_forward(c.ln1_out, p, heads, mask, c);
    c.ln2_out = layer_norm_forward(x1, p.ln2_gain, p.ln2_bias, c.ln2);
    c.fc_pre = linear_forward(c.ln2_out, p.fc_weight, p.fc_bias);
    c.fc_act = quick_gelu(c.fc_pre);
    x1 += linear_forward(c.fc_act, p.proj_weight, p.proj_bias);
    return x1;
}

template <class T>
Matrix<T> block_backward(const Matrix<T>& d_y, const BlockParams<T>& p, std::size_t heads, const BlockCache<T>& c,
                         BlockParams<T>& g)
{
    Matrix<T> d_act = linear_backward(d_y, c.fc_act, p.proj_weight, g.proj_weight, g.proj_bias);
    const Matrix<T> d_pre = quick_gelu_backward(d_act, c.fc_pre);
    const Matrix<T> d_ln2 = linear_backward(d_pre, c.ln2_out, p.fc_weight, g.fc_weight, g.fc_bias);
    Matrix<T> d_x1 = d_y + layer_norm_backward(d_ln2, c.ln2, p.ln2_gain, g.ln2_gain, g.ln2_bias);

    const Matrix<T> d_ln1 = attention_backward(d_x1, c.ln1_out, p, heads, c, g);
    d_x1 += layer_norm_backward(d_ln1, c.ln1, p.ln1_gain, g.ln1_gain, g.ln1_bias);
    return d_x1;
}

} // namespace lcm::detail
