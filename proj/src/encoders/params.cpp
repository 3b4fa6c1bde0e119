#include "lcm/encoders/params.hpp"

#include "lcm/util/random.hpp"

#include <cmath>
#include <string_view>

namespace lcm {

namespace {

constexpr double kEmbeddingStd = 0.02;

template <class T>
BlockParams<T> shaped_block(std::size_t width)
{
    const auto w = static_cast<Eigen::Index>(width);
    BlockParams<T> b;
    b.ln1_gain = Matrix<T>::Ones(1, w);
    b.ln1_bias = Matrix<T>::Zero(1, w);
    b.q_weight = Matrix<T>::Zero(w, w);
    b.q_bias = Matrix<T>::Zero(1, w);
    b.k_weight = Matrix<T>::Zero(w, w);
    b.k_bias = Matrix<T>::Zero(1, w);
    b.v_weight = Matrix<T>::Zero(w, w);
    b.v_bias = Matrix<T>::Zero(1, w);
    b.out_weight = Matrix<T>::Zero(w, w);
    b.out_bias = Matrix<T>::Zero(1, w);
    b.ln2_gain = Matrix<T>::Ones(1, w);
    b.ln2_bias = Matrix<T>::Zero(1, w);
    b.fc_weight = Matrix<T>::Zero(w, 4 * w);
    b.fc_bias = Matrix<T>::Zero(1, 4 * w);
    b.proj_weight = Matrix<T>::Zero(4 * w, w);
    b.proj_bias = Matrix<T>::Zero(1, w);
    return b;
}

Eigen::Index idx(std::size_t n) { return static_cast<Eigen::Index>(n); }

bool is_weight(const std::string& name)
{
    auto ends_with = [&](std::string_view suffix) {
        return name.size() >= suffix.size() && name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0;
    };
    return !ends_with(".bias") && !ends_with(".gain") && name != "log_temperature";
}

} // namespace

template <class T>
ModelParams<T> shaped_params(const EncoderConfig& cfg)
{
    ModelParams<T> p;
    const auto tw = cfg.text_width;
    const auto iw = cfg.image_width;

    p.text.token_embedding = Matrix<T>::Zero(idx(cfg.vocab_size), idx(tw));
    p.text.positional = Matrix<T>::Zero(idx(cfg.context_len), idx(tw));
    for (std::size_t i = 0; i < cfg.text_layers; ++i) p.text.blocks.push_back(shaped_block<T>(tw));
    p.text.ln_final_gain = Matrix<T>::Ones(1, idx(tw));
    p.text.ln_final_bias = Matrix<T>::Zero(1, idx(tw));
    p.text.projection = Matrix<T>::Zero(idx(tw), idx(cfg.embed_dim));

    p.image.patch_projection = Matrix<T>::Zero(idx(cfg.patch_dim()), idx(iw));
    p.image.class_embedding = Matrix<T>::Zero(1, idx(iw));
    p.image.positional = Matrix<T>::Zero(idx(cfg.patch_count() + 1), idx(iw));
    p.image.ln_pre_gain = Matrix<T>::Ones(1, idx(iw));
    p.image.ln_pre_bias = Matrix<T>::Zero(1, idx(iw));
    for (std::size_t i = 0; i < cfg.image_layers; ++i) p.image.blocks.push_back(shaped_block<T>(iw));
    p.image.ln_post_gain = Matrix<T>::Ones(1, idx(iw));
    p.image.ln_post_bias = Matrix<T>::Zero(1, idx(iw));
    p.image.projection = Matrix<T>::Zero(idx(iw), idx(cfg.embed_dim));

    p.log_temperature = Matrix<T>::Constant(1, 1, T(kInitLogTemperature));
    return p;
}

namespace {

bool has(const std::string& name, std::string_view part) { return name.find(part) != std::string::npos; }

// Width-scaled normal init in the style of the base model: embeddings at
// 0.02 / 0.01, attention and MLP weights shrink with width, residual
// output projections also with depth.
double init_std(const std::string& name, const EncoderConfig& cfg)
{
    const bool text = name.rfind("text.", 0) == 0;
    const double width = static_cast<double>(text ? cfg.text_width : cfg.image_width);
    const double layers = static_cast<double>(text ? cfg.text_layers : cfg.image_layers);
    const double attn = 1.0 / std::sqrt(width);
    const double residual = attn / std::sqrt(2.0 * layers);
    if (name == "text.token_embedding") return kEmbeddingStd;
    if (name == "text.positional") return kEmbeddingStd / 2;
    if (name == "image.patch_projection") return 1.0 / std::sqrt(static_cast<double>(cfg.patch_dim()));
    if (has(name, ".attn.out.") || has(name, ".mlp.proj.")) return residual;
    if (has(name, ".mlp.fc.")) return 1.0 / std::sqrt(2.0 * width);
    return attn; // q/k/v, class token, image positional, projections
}

} // namespace

template <class T>
ModelParams<T> init_params(const EncoderConfig& cfg, std::uint64_t seed)
{
    cfg.validate();
    ModelParams<T> p = shaped_params<T>(cfg);
    Rng rng(seed);
    // Draws happen in canonical tensor order so the result depends only on
    // (cfg, seed).
    for (auto& t : p.tensors()) {
        if (!is_weight(t.name)) continue;
        auto& m = *t.value;
        const double std = init_std(t.name, cfg);
        for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<T>(rng.normal(0.0, std));
    }
    return p;
}

template ModelParams<float> shaped_params<float>(const EncoderConfig&);
template ModelParams<double> shaped_params<double>(const EncoderConfig&);
template ModelParams<float> init_params<float>(const EncoderConfig&, std::uint64_t);
template ModelParams<double> init_params<double>(const EncoderConfig&, std::uint64_t);

} // namespace lcm
