#include "layers.hpp"

#include "lcm/error.hpp"

#include <string>

namespace lcm {

namespace {

// Rows are patches in raster order, each flattened as (y, x, channel) with
// pixel values mapped from [0, 1] to [-1, 1].
template <class T>
Matrix<T> patchify(const Image& image, const EncoderConfig& cfg)
{
    if (image.height != cfg.image_size || image.width != cfg.image_size ||
        image.pixels.size() != image.height * image.width * 3)
        throw Error(ErrorKind::Shape, "image is " + std::to_string(image.height) + "x" + std::to_string(image.width) +
                                          ", encoder expects " + std::to_string(cfg.image_size) + "x" +
                                          std::to_string(cfg.image_size));
    const std::size_t ps = cfg.patch_size;
    const std::size_t side = cfg.patches_per_side();
    Matrix<T> patches(static_cast<Eigen::Index>(cfg.patch_count()), static_cast<Eigen::Index>(cfg.patch_dim()));
    for (std::size_t py = 0; py < side; ++py)
        for (std::size_t px = 0; px < side; ++px) {
            const auto r = static_cast<Eigen::Index>(py * side + px);
            Eigen::Index col = 0;
            for (std::size_t y = 0; y < ps; ++y)
                for (std::size_t x = 0; x < ps; ++x)
                    for (std::size_t c = 0; c < 3; ++c)
                        patches(r, col++) = T(2) * static_cast<T>(image.at(py * ps + y, px * ps + x, c)) - T(1);
        }
    return patches;
}

} // namespace

template <class T>
RowVector<T> image_forward(const Image& image, const ModelParams<T>& params, const EncoderConfig& cfg,
                           ImageCache<T>& cache)
{
    const auto& ip = params.image;
    cache.patches = patchify<T>(image, cfg);
    const auto n = cache.patches.rows();

    Matrix<T> x(n + 1, ip.patch_projection.cols());
    x.row(0) = ip.class_embedding;
    x.bottomRows(n).noalias() = cache.patches * ip.patch_projection;
    x += ip.positional;
    x = detail::layer_norm_forward(x, ip.ln_pre_gain, ip.ln_pre_bias, cache.ln_pre);

    cache.blocks.resize(ip.blocks.size());
    for (std::size_t l = 0; l < ip.blocks.size(); ++l)
        x = detail::block_forward(x, ip.blocks[l], cfg.image_heads, std::span<const std::uint8_t>{}, cache.blocks[l]);

    const Matrix<T> cls = x.topRows(1);
    cache.class_state = detail::layer_norm_forward(cls, ip.ln_post_gain, ip.ln_post_bias, cache.ln_post);
    return cache.class_state * ip.projection;
}

template <class T>
void image_backward(const ImageCache<T>& cache, const RowVector<T>& d_out, const ModelParams<T>& params,
                    const EncoderConfig& cfg, ModelParams<T>& grads)
{
    const auto& ip = params.image;
    auto& ig = grads.image;
    const auto n = cache.patches.rows();

    ig.projection.noalias() += cache.class_state.transpose() * d_out;
    const Matrix<T> d_state = d_out * ip.projection.transpose();
    const Matrix<T> d_cls =
        detail::layer_norm_backward(d_state, cache.ln_post, ip.ln_post_gain, ig.ln_post_gain, ig.ln_post_bias);

    Matrix<T> dx = Matrix<T>::Zero(n + 1, ip.patch_projection.cols());
    dx.row(0) = d_cls.row(0);
    for (std::size_t l = ip.blocks.size(); l-- > 0;)
        dx = detail::block_backward(dx, ip.blocks[l], cfg.image_heads, cache.blocks[l], ig.blocks[l]);
    dx = detail::layer_norm_backward(dx, cache.ln_pre, ip.ln_pre_gain, ig.ln_pre_gain, ig.ln_pre_bias);

    ig.positional += dx;
    ig.class_embedding += dx.topRows(1);
    ig.patch_projection.noalias() += cache.patches.transpose() * dx.bottomRows(n);
}

template <class T>
RowVector<T> encode_image(const Image& image, const ModelParams<T>& params, const EncoderConfig& cfg)
{
    ImageCache<T> cache;
    return image_forward(image, params, cfg, cache);
}

#define LCM_INSTANTIATE_IMAGE(T)                                                                                    \
    template RowVector<T> image_forward<T>(const Image&, const ModelParams<T>&, const EncoderConfig&,             \
                                           ImageCache<T>&);                                                       \
    template void image_backward<T>(const ImageCache<T>&, const RowVector<T>&, const ModelParams<T>&,             \
                                    const EncoderConfig&, ModelParams<T>&);                                       \
    template RowVector<T> encode_image<T>(const Image&, const ModelParams<T>&, const EncoderConfig&);

LCM_INSTANTIATE_IMAGE(float)
LCM_INSTANTIATE_IMAGE(double)

} // namespace lcm
