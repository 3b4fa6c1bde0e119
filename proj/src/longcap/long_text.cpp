#include "lcm/longcap/long_text.hpp"

#include "lcm/error.hpp"
#include "lcm/util/parallel.hpp"

#include <string>

namespace lcm {

void LongTextConfig::validate() const
{
    validate_window_params(context_len, stride);
}

LongTextConfig default_long_text_config(std::size_t context_len)
{
    return LongTextConfig{context_len, default_stride(context_len), false};
}

template <class T>
RowVector<T> aggregate_windows(std::span<const RowVector<T>> window_embeddings, bool normalize_before_mean)
{
    if (window_embeddings.empty()) throw Error(ErrorKind::Shape, "no window embeddings to aggregate");
    RowVector<T> sum = RowVector<T>::Zero(window_embeddings.front().size());
    for (const auto& e : window_embeddings) sum += normalize_before_mean ? normalize<T>(e) : e;
    return normalize<T>(sum / static_cast<T>(window_embeddings.size()));
}

template <class T>
RowVector<T> encode_long_text(const TokenSequence& seq, const ModelParams<T>& params, const EncoderConfig& cfg,
                              const LongTextConfig& ltc, LongTextTrace* trace)
{
    ltc.validate();
    if (ltc.context_len != cfg.context_len)
        throw Error(ErrorKind::Shape, "long-text context_len " + std::to_string(ltc.context_len) +
                                          " != encoder context_len " + std::to_string(cfg.context_len));
    const WindowBatch batch = make_windows(seq, ltc.context_len, ltc.stride);
    std::vector<RowVector<T>> embs;
    embs.reserve(batch.size());
    for (std::size_t w = 0; w < batch.size(); ++w)
        embs.push_back(encode_text_window<T>(batch.windows[w], batch.masks[w], params, cfg));
    if (trace) {
        trace->forward_passes += embs.size();
        trace->window_starts = batch.starts;
    }
    return aggregate_windows<T>(embs, ltc.normalize_before_mean);
}

std::vector<Embedding> encode_caption_batch(std::span<const TokenSequence> seqs, const ModelParams<float>& params,
                                            const EncoderConfig& cfg, const LongTextConfig& ltc, std::size_t threads)
{
    std::vector<Embedding> out(seqs.size());
    parallel_for(seqs.size(), threads, [&](std::size_t i) {
        try {
            out[i] = encode_long_text<float>(seqs[i], params, cfg, ltc);
        } catch (const Error& e) {
            throw Error(e.kind(), "caption " + std::to_string(i) + ": " + e.message());
        }
    });
    return out;
}

template RowVector<float> aggregate_windows<float>(std::span<const RowVector<float>>, bool);
template RowVector<double> aggregate_windows<double>(std::span<const RowVector<double>>, bool);
template RowVector<float> encode_long_text<float>(const TokenSequence&, const ModelParams<float>&,
                                                  const EncoderConfig&, const LongTextConfig&, LongTextTrace*);
template RowVector<double> encode_long_text<double>(const TokenSequence&, const ModelParams<double>&,
                                                    const EncoderConfig&, const LongTextConfig&, LongTextTrace*);

} // namespace lcm
