#pragma once

#include "lcm/encoders/config.hpp"
#include "lcm/encoders/tensor.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace lcm {

inline constexpr double kMinLogTemperature = -4.605170185988091; // ln(1/100)
inline constexpr double kMaxLogTemperature = 4.605170185988091;  // ln(100)
inline constexpr double kInitLogTemperature = 2.659260036932778; // ln(1/0.07)

/// A mutable or const view of one parameter tensor. Every tensor is stored as
/// a 2-D row-major matrix; `rank` records the logical rank (vectors are 1 x n,
/// scalars 1 x 1).
template <class M>
struct TensorRef {
    std::string name;
    std::size_t rank;
    M* value;
};

template <class T>
struct BlockParams {
    Matrix<T> ln1_gain, ln1_bias;
    Matrix<T> q_weight, q_bias, k_weight, k_bias, v_weight, v_bias;
    Matrix<T> out_weight, out_bias;
    Matrix<T> ln2_gain, ln2_bias;
    Matrix<T> fc_weight, fc_bias;
    Matrix<T> proj_weight, proj_bias;

    template <class Self, class Fn>
    static void visit(Self& self, const std::string& prefix, Fn&& fn)
    {
        fn(prefix + "ln1.gain", 1, self.ln1_gain);
        fn(prefix + "ln1.bias", 1, self.ln1_bias);
        fn(prefix + "attn.q.weight", 2, self.q_weight);
        fn(prefix + "attn.q.bias", 1, self.q_bias);
        fn(prefix + "attn.k.weight", 2, self.k_weight);
        fn(prefix + "attn.k.bias", 1, self.k_bias);
        fn(prefix + "attn.v.weight", 2, self.v_weight);
        fn(prefix + "attn.v.bias", 1, self.v_bias);
        fn(prefix + "attn.out.weight", 2, self.out_weight);
        fn(prefix + "attn.out.bias", 1, self.out_bias);
        fn(prefix + "ln2.gain", 1, self.ln2_gain);
        fn(prefix + "ln2.bias", 1, self.ln2_bias);
        fn(prefix + "mlp.fc.weight", 2, self.fc_weight);
        fn(prefix + "mlp.fc.bias", 1, self.fc_bias);
        fn(prefix + "mlp.proj.weight", 2, self.proj_weight);
        fn(prefix + "mlp.proj.bias", 1, self.proj_bias);
    }
};

template <class T>
struct TextTowerParams {
    Matrix<T> token_embedding; // vocab x width
    Matrix<T> positional;      // context x width
    std::vector<BlockParams<T>> blocks;
    Matrix<T> ln_final_gain, ln_final_bias;
    Matrix<T> projection; // width x embed
};

template <class T>
struct ImageTowerParams {
    Matrix<T> patch_projection; // patch_dim x width
    Matrix<T> class_embedding;  // 1 x width
    Matrix<T> positional;       // (patches + 1) x width
    Matrix<T> ln_pre_gain, ln_pre_bias;
    std::vector<BlockParams<T>> blocks;
    Matrix<T> ln_post_gain, ln_post_bias;
    Matrix<T> projection; // width x embed
};

/// Every trainable tensor of both towers plus the logit scale.
template <class T>
struct ModelParams {
    TextTowerParams<T> text;
    ImageTowerParams<T> image;
    Matrix<T> log_temperature; // 1 x 1

    // Visits tensors in canonical (checkpoint) order: fn(name, rank, matrix).
    template <class Self, class Fn>
    static void visit(Self& self, Fn&& fn)
    {
        fn("text.token_embedding", 2, self.text.token_embedding);
        fn("text.positional", 2, self.text.positional);
        for (std::size_t i = 0; i < self.text.blocks.size(); ++i)
            BlockParams<T>::visit(self.text.blocks[i], "text.blocks." + std::to_string(i) + ".", fn);
        fn("text.ln_final.gain", 1, self.text.ln_final_gain);
        fn("text.ln_final.bias", 1, self.text.ln_final_bias);
        fn("text.projection", 2, self.text.projection);

        fn("image.patch_projection", 2, self.image.patch_projection);
        fn("image.class_embedding", 1, self.image.class_embedding);
        fn("image.positional", 2, self.image.positional);
        fn("image.ln_pre.gain", 1, self.image.ln_pre_gain);
        fn("image.ln_pre.bias", 1, self.image.ln_pre_bias);
        for (std::size_t i = 0; i < self.image.blocks.size(); ++i)
            BlockParams<T>::visit(self.image.blocks[i], "image.blocks." + std::to_string(i) + ".", fn);
        fn("image.ln_post.gain", 1, self.image.ln_post_gain);
        fn("image.ln_post.bias", 1, self.image.ln_post_bias);
        fn("image.projection", 2, self.image.projection);

        fn("log_temperature", 0, self.log_temperature);
    }

    std::vector<TensorRef<Matrix<T>>> tensors()
    {
        std::vector<TensorRef<Matrix<T>>> out;
        visit(*this, [&](const std::string& n, std::size_t r, Matrix<T>& m) { out.push_back({n, r, &m}); });
        return out;
    }

    std::vector<TensorRef<const Matrix<T>>> tensors() const
    {
        std::vector<TensorRef<const Matrix<T>>> out;
        visit(*this, [&](const std::string& n, std::size_t r, const Matrix<T>& m) { out.push_back({n, r, &m}); });
        return out;
    }

    T temperature_log() const { return log_temperature(0, 0); }

    std::size_t parameter_count() const
    {
        std::size_t n = 0;
        for (const auto& t : tensors()) n += static_cast<std::size_t>(t.value->size());
        return n;
    }

    // Same shapes, all zeros.
    ModelParams zeros_like() const
    {
        ModelParams z = *this;
        for (auto& t : z.tensors()) t.value->setZero();
        return z;
    }

    template <class U>
    ModelParams<U> cast() const
    {
        ModelParams<U> out;
        out.text.blocks.resize(text.blocks.size());
        out.image.blocks.resize(image.blocks.size());
        auto src = tensors();
        auto dst = out.tensors();
        for (std::size_t i = 0; i < src.size(); ++i) *dst[i].value = src[i].value->template cast<U>();
        return out;
    }

    bool all_finite() const
    {
        for (const auto& t : tensors())
            if (!t.value->allFinite()) return false;
        return true;
    }

    void clamp_log_temperature()
    {
        auto& lt = log_temperature(0, 0);
        if (lt < T(kMinLogTemperature)) lt = T(kMinLogTemperature);
        if (lt > T(kMaxLogTemperature)) lt = T(kMaxLogTemperature);
    }
};

/// Normal(0, 0.02) weights, zero biases, unit layer-norm gains,
/// log_temperature = ln(1/0.07).
template <class T>
ModelParams<T> init_params(const EncoderConfig& cfg, std::uint64_t seed);

// Zero-initialized tensors with the shapes implied by cfg.
template <class T>
ModelParams<T> shaped_params(const EncoderConfig& cfg);

} // namespace lcm
