#include "layers.hpp"

#include "lcm/error.hpp"

#include <string>

namespace lcm {

namespace {

// Returns the end_of_text position (last valid slot) after checking the
// mask is a prefix of ones covering at least start and end tokens.
std::size_t check_row(std::span<const TokenId> row, std::span<const std::uint8_t> mask, const EncoderConfig& cfg)
{
    if (row.size() != cfg.context_len || mask.size() != cfg.context_len)
        throw Error(ErrorKind::Shape, "window row length " + std::to_string(row.size()) + " != context_len " +
                                          std::to_string(cfg.context_len));
    std::size_t valid = 0;
    while (valid < mask.size() && mask[valid]) ++valid;
    for (std::size_t i = valid; i < mask.size(); ++i)
        if (mask[i]) throw Error(ErrorKind::Shape, "mask is not a prefix of valid positions");
    if (valid < 2) throw Error(ErrorKind::Shape, "mask must cover start_of_text and end_of_text");
    for (std::size_t i = 0; i < row.size(); ++i)
        if (row[i] < 0 || static_cast<std::size_t>(row[i]) >= cfg.vocab_size)
            throw Error(ErrorKind::Shape, "token id " + std::to_string(row[i]) + " outside vocabulary");
    return valid - 1;
}

} // namespace

template <class T>
Matrix<T> avg_pool_sequence(const Matrix<T>& hidden, std::size_t kernel)
{
    const auto len = static_cast<std::size_t>(hidden.rows());
    if (kernel < 1 || kernel % 2 == 0 || kernel > len)
        throw Error(ErrorKind::InvalidKernel,
                    "kernel " + std::to_string(kernel) + " must be odd and within [1, " + std::to_string(len) + "]");
    if (kernel == 1) return hidden;
    const std::size_t groups = (len + kernel - 1) / kernel;
    Matrix<T> out(static_cast<Eigen::Index>(groups), hidden.cols());
    for (std::size_t g = 0; g < groups; ++g) {
        const std::size_t lo = g * kernel;
        const std::size_t n = std::min(kernel, len - lo);
        out.row(static_cast<Eigen::Index>(g)) =
            hidden.middleRows(static_cast<Eigen::Index>(lo), static_cast<Eigen::Index>(n)).colwise().sum() /
            static_cast<T>(n);
    }
    return out;
}

template <class T>
RowVector<T> normalize(const RowVector<T>& v)
{
    const T n = v.norm();
    if (!(n > T(0))) throw Error(ErrorKind::ZeroNorm, "cannot normalize a zero vector");
    return v / n;
}

template <class T>
RowVector<T> normalize_backward(const RowVector<T>& v, const RowVector<T>& d_unit)
{
    const T n = v.norm();
    const RowVector<T> u = v / n;
    return (d_unit - u * u.dot(d_unit)) / n;
}

template <class T>
RowVector<T> text_window_forward(std::span<const TokenId> row, std::span<const std::uint8_t> mask,
                                 const ModelParams<T>& params, const EncoderConfig& cfg, TextCache<T>& cache)
{
    cache.eot_position = check_row(row, mask, cfg);
    cache.ids.assign(row.begin(), row.end());
    cache.mask.assign(mask.begin(), mask.end());

    const auto& tp = params.text;
    const auto len = static_cast<Eigen::Index>(cfg.context_len);
    Matrix<T> x(len, tp.token_embedding.cols());
    for (Eigen::Index i = 0; i < len; ++i) x.row(i) = tp.token_embedding.row(row[static_cast<std::size_t>(i)]);
    x += tp.positional;

    cache.blocks.resize(tp.blocks.size());
    for (std::size_t l = 0; l < tp.blocks.size(); ++l)
        x = detail::block_forward(x, tp.blocks[l], cfg.text_heads, mask, cache.blocks[l]);

    Matrix<T> hidden = detail::layer_norm_forward(x, tp.ln_final_gain, tp.ln_final_bias, cache.ln_final);
    for (Eigen::Index i = 0; i < len; ++i)
        if (!mask[static_cast<std::size_t>(i)]) hidden.row(i).setZero();

    cache.pooled = avg_pool_sequence(hidden, cfg.pool_kernel);
    const auto g = static_cast<Eigen::Index>(pooled_index(cache.eot_position, cfg.pool_kernel));
    return cache.pooled.row(g) * tp.projection;
}

template <class T>
void text_window_backward(const TextCache<T>& cache, const RowVector<T>& d_out, const ModelParams<T>& params,
                          const EncoderConfig& cfg, ModelParams<T>& grads)
{
    const auto& tp = params.text;
    auto& tg = grads.text;
    const auto len = static_cast<Eigen::Index>(cfg.context_len);
    const std::size_t k = cfg.pool_kernel;
    const std::size_t group = pooled_index(cache.eot_position, k);

    tg.projection.noalias() += cache.pooled.row(static_cast<Eigen::Index>(group)).transpose() * d_out;
    const RowVector<T> d_pooled = d_out * tp.projection.transpose();

    Matrix<T> d_hidden = Matrix<T>::Zero(len, tp.projection.rows());
    const std::size_t lo = group * k;
    const std::size_t n = std::min(k, cfg.context_len - lo);
    for (std::size_t i = lo; i < lo + n; ++i)
        if (cache.mask[i]) d_hidden.row(static_cast<Eigen::Index>(i)) = d_pooled / static_cast<T>(n);

    Matrix<T> dx = detail::layer_norm_backward(d_hidden, cache.ln_final, tp.ln_final_gain, tg.ln_final_gain,
                                               tg.ln_final_bias);
    for (std::size_t l = tp.blocks.size(); l-- > 0;)
        dx = detail::block_backward(dx, tp.blocks[l], cfg.text_heads, cache.blocks[l], tg.blocks[l]);

    tg.positional += dx;
    for (Eigen::Index i = 0; i < len; ++i) tg.token_embedding.row(cache.ids[static_cast<std::size_t>(i)]) += dx.row(i);
}

template <class T>
RowVector<T> encode_text_window(std::span<const TokenId> row, std::span<const std::uint8_t> mask,
                                const ModelParams<T>& params, const EncoderConfig& cfg)
{
    TextCache<T> cache;
    return text_window_forward(row, mask, params, cfg, cache);
}

#define LCM_INSTANTIATE_TEXT(T)                                                                                     \
    template Matrix<T> avg_pool_sequence<T>(const Matrix<T>&, std::size_t);                                       \
    template RowVector<T> normalize<T>(const RowVector<T>&);                                                      \
    template RowVector<T> normalize_backward<T>(const RowVector<T>&, const RowVector<T>&);                        \
    template RowVector<T> text_window_forward<T>(std::span<const TokenId>, std::span<const std::uint8_t>,         \
                                                 const ModelParams<T>&, const EncoderConfig&, TextCache<T>&);     \
    template void text_window_backward<T>(const TextCache<T>&, const RowVector<T>&, const ModelParams<T>&,        \
                                          const EncoderConfig&, ModelParams<T>&);                                 \
    template RowVector<T> encode_text_window<T>(std::span<const TokenId>, std::span<const std::uint8_t>,          \
                                                const ModelParams<T>&, const EncoderConfig&);

LCM_INSTANTIATE_TEXT(float)
LCM_INSTANTIATE_TEXT(double)

} // namespace lcm
