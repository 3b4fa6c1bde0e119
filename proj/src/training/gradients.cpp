#include "lcm/training/gradients.hpp"

#include "lcm/encoders/autodiff.hpp"
#include "lcm/error.hpp"
#include "lcm/training/loss.hpp"
#include "lcm/util/parallel.hpp"

#include <cmath>
#include <string>

namespace lcm {

namespace {

template <class T>
struct ItemForward {
    RowVector<T> image_raw;
    std::vector<RowVector<T>> window_raw;
    RowVector<T> caption_mean; // pre-normalization mean of (optionally normalized) windows
    WindowBatch windows;
};

template <class T>
ItemForward<T> forward_item(const PairedSample& s, const ModelParams<T>& params, const EncoderConfig& cfg,
                            const LongTextConfig& ltc)
{
    ItemForward<T> f;
    f.image_raw = encode_image<T>(s.image, params, cfg);
    if (!f.image_raw.allFinite()) throw Error(ErrorKind::TrainingDiverged, "non-finite image embedding");
    f.windows = make_windows(s.caption, ltc.context_len, ltc.stride);
    f.caption_mean = RowVector<T>::Zero(static_cast<Eigen::Index>(cfg.embed_dim));
    for (std::size_t w = 0; w < f.windows.size(); ++w) {
        f.window_raw.push_back(encode_text_window<T>(f.windows.windows[w], f.windows.masks[w], params, cfg));
        if (!f.window_raw.back().allFinite())
            throw Error(ErrorKind::TrainingDiverged, "non-finite text embedding");
        f.caption_mean += ltc.normalize_before_mean ? normalize<T>(f.window_raw.back()) : f.window_raw.back();
    }
    f.caption_mean /= static_cast<T>(f.windows.size());
    return f;
}

template <class T>
std::vector<ItemForward<T>> forward_batch(std::span<const PairedSample* const> batch, const ModelParams<T>& params,
                                          const EncoderConfig& cfg, const LongTextConfig& ltc, std::size_t threads)
{
    ltc.validate();
    if (ltc.context_len != cfg.context_len)
        throw Error(ErrorKind::Shape, "long-text context_len differs from encoder context_len");
    if (batch.size() < 2)
        throw Error(ErrorKind::BatchTooSmall, "batch of " + std::to_string(batch.size()) + " has no negatives");
    std::vector<ItemForward<T>> items(batch.size());
    parallel_for(batch.size(), threads, [&](std::size_t i) { items[i] = forward_item<T>(*batch[i], params, cfg, ltc); });
    return items;
}

template <class T>
ContrastiveResult<T> batch_objective(const std::vector<ItemForward<T>>& items, const ModelParams<T>& params,
                                     Matrix<T>& image_unit, Matrix<T>& text_unit)
{
    const auto n = static_cast<Eigen::Index>(items.size());
    const auto dim = items.front().image_raw.size();
    image_unit.resize(n, dim);
    text_unit.resize(n, dim);
    for (Eigen::Index i = 0; i < n; ++i) {
        image_unit.row(i) = normalize<T>(items[static_cast<std::size_t>(i)].image_raw);
        text_unit.row(i) = normalize<T>(items[static_cast<std::size_t>(i)].caption_mean);
    }
    auto r = contrastive_loss<T>(image_unit, text_unit, params.temperature_log());
    if (!std::isfinite(static_cast<double>(r.loss)))
        throw Error(ErrorKind::TrainingDiverged, "non-finite contrastive loss");
    return r;
}

} // namespace

template <class T>
T batch_loss(std::span<const PairedSample* const> batch, const ModelParams<T>& params, const EncoderConfig& cfg,
             const LongTextConfig& ltc, std::size_t threads)
{
    const auto items = forward_batch<T>(batch, params, cfg, ltc, threads);
    Matrix<T> image_unit, text_unit;
    return batch_objective<T>(items, params, image_unit, text_unit).loss;
}

template <class T>
GradientResult<T> compute_gradients(std::span<const PairedSample* const> batch, const ModelParams<T>& params,
                                    const EncoderConfig& cfg, const LongTextConfig& ltc, std::size_t threads)
{
    const auto items = forward_batch<T>(batch, params, cfg, ltc, threads);
    Matrix<T> image_unit, text_unit;
    const auto obj = batch_objective<T>(items, params, image_unit, text_unit);

    // logits = s * I T^T with s = exp(log_temperature)
    const T scale = std::exp(params.temperature_log());
    const Matrix<T> d_image_unit = scale * (obj.d_logits * text_unit);
    const Matrix<T> d_text_unit = scale * (obj.d_logits.transpose() * image_unit);

    std::vector<ModelParams<T>> item_grads(items.size());
    parallel_for(items.size(), threads, [&](std::size_t i) {
        const auto& it = items[i];
        const auto row = static_cast<Eigen::Index>(i);
        ModelParams<T> g = params.zeros_like();

        ImageCache<T> icache;
        image_forward<T>(batch[i]->image, params, cfg, icache);
        image_backward<T>(icache, normalize_backward<T>(it.image_raw, d_image_unit.row(row)), params, cfg, g);

        // The mean hands each window 1/W of the caption gradient.
        const RowVector<T> d_mean = normalize_backward<T>(it.caption_mean, d_text_unit.row(row)) /
                                    static_cast<T>(it.windows.size());
        TextCache<T> tcache;
        for (std::size_t w = 0; w < it.windows.size(); ++w) {
            text_window_forward<T>(it.windows.windows[w], it.windows.masks[w], params, cfg, tcache);
            const RowVector<T> d_win = ltc.normalize_before_mean ? normalize_backward<T>(it.window_raw[w], d_mean)
                                                                 : d_mean;
            text_window_backward<T>(tcache, d_win, params, cfg, g);
        }
        item_grads[i] = std::move(g);
    });

    GradientResult<T> result{obj.loss, params.zeros_like()};
    auto total = result.grads.tensors();
    for (auto& g : item_grads) {
        auto parts = g.tensors();
        for (std::size_t t = 0; t < total.size(); ++t) *total[t].value += *parts[t].value;
    }
    // d loss / d log_temperature = sum(d_logits .* logits)
    result.grads.log_temperature(0, 0) += obj.d_logits.cwiseProduct(obj.logits).sum();

    if (!result.grads.all_finite()) throw Error(ErrorKind::TrainingDiverged, "non-finite gradient");
    return result;
}

template float batch_loss<float>(std::span<const PairedSample* const>, const ModelParams<float>&,
                                 const EncoderConfig&, const LongTextConfig&, std::size_t);
template double batch_loss<double>(std::span<const PairedSample* const>, const ModelParams<double>&,
                                   const EncoderConfig&, const LongTextConfig&, std::size_t);
template GradientResult<float> compute_gradients<float>(std::span<const PairedSample* const>,
                                                        const ModelParams<float>&, const EncoderConfig&,
                                                        const LongTextConfig&, std::size_t);
template GradientResult<double> compute_gradients<double>(std::span<const PairedSample* const>,
                                                          const ModelParams<double>&, const EncoderConfig&,
                                                          const LongTextConfig&, std::size_t);

} // namespace lcm
