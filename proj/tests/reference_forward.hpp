#pragma once

// Loop-only re-implementation of both towers, written against the parameter
// layout rather than the library's layer code. Used as an oracle.

#include "lcm/encoders/params.hpp"
#include "lcm/textpipe/vocabulary.hpp"

#include <cmath>
#include <vector>

namespace lcm::testing::ref {

using Rows = std::vector<std::vector<double>>;

inline double at(const Matrix<double>& m, Eigen::Index r, Eigen::Index c) { return m(r, c); }

inline Rows layer_norm(const Rows& x, const Matrix<double>& g, const Matrix<double>& b)
{
    Rows y = x;
    for (auto& row : y) {
        double mean = 0, var = 0;
        for (double v : row) mean += v;
        mean /= static_cast<double>(row.size());
        for (double v : row) var += (v - mean) * (v - mean);
        var /= static_cast<double>(row.size());
        for (std::size_t i = 0; i < row.size(); ++i)
            row[i] = (row[i] - mean) / std::sqrt(var + 1e-5) * at(g, 0, Eigen::Index(i)) + at(b, 0, Eigen::Index(i));
    }
    return y;
}

inline Rows linear(const Rows& x, const Matrix<double>& w, const Matrix<double>* b)
{
    Rows y(x.size(), std::vector<double>(static_cast<std::size_t>(w.cols()), 0.0));
    for (std::size_t r = 0; r < x.size(); ++r)
        for (Eigen::Index o = 0; o < w.cols(); ++o) {
            double s = b ? at(*b, 0, o) : 0.0;
            for (Eigen::Index i = 0; i < w.rows(); ++i) s += x[r][std::size_t(i)] * at(w, i, o);
            y[r][std::size_t(o)] = s;
        }
    return y;
}

inline Rows block(const Rows& x, const BlockParams<double>& p, std::size_t heads, const std::vector<std::uint8_t>& mask)
{
    const std::size_t n = x.size(), width = x[0].size(), hd = width / heads;
    const Rows a = layer_norm(x, p.ln1_gain, p.ln1_bias);
    const Rows q = linear(a, p.q_weight, &p.q_bias), k = linear(a, p.k_weight, &p.k_bias),
               v = linear(a, p.v_weight, &p.v_bias);
    Rows cat(n, std::vector<double>(width, 0.0));
    for (std::size_t h = 0; h < heads; ++h)
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<double> w(n, 0.0);
            double total = 0;
            for (std::size_t j = 0; j < n; ++j) {
                if (!mask.empty() && !mask[j]) continue;
                double s = 0;
                for (std::size_t d = 0; d < hd; ++d) s += q[i][h * hd + d] * k[j][h * hd + d];
                w[j] = std::exp(s / std::sqrt(double(hd)));
                total += w[j];
            }
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t d = 0; d < hd; ++d) cat[i][h * hd + d] += w[j] / total * v[j][h * hd + d];
        }
    Rows y = x;
    const Rows attn = linear(cat, p.out_weight, &p.out_bias);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < width; ++c) y[i][c] += attn[i][c];
    Rows f = linear(layer_norm(y, p.ln2_gain, p.ln2_bias), p.fc_weight, &p.fc_bias);
    for (auto& row : f)
        for (auto& u : row) u = u / (1.0 + std::exp(-1.702 * u));
    const Rows m = linear(f, p.proj_weight, &p.proj_bias);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < width; ++c) y[i][c] += m[i][c];
    return y;
}

inline std::vector<double> text(const std::vector<TokenId>& row, const std::vector<std::uint8_t>& mask,
                                const ModelParams<double>& p, std::size_t heads, std::size_t kernel)
{
    const auto& t = p.text;
    Rows x(row.size());
    for (std::size_t i = 0; i < row.size(); ++i)
        for (Eigen::Index c = 0; c < t.token_embedding.cols(); ++c)
            x[i].push_back(t.token_embedding(row[i], c) + t.positional(Eigen::Index(i), c));
    for (const auto& b : t.blocks) x = block(x, b, heads, mask);
    x = layer_norm(x, t.ln_final_gain, t.ln_final_bias);
    std::size_t eot = 0;
    for (std::size_t i = 0; i < mask.size(); ++i)
        if (mask[i]) eot = i;
    // mean of the kernel-sized group holding end_of_text; pad rows count as zero
    const std::size_t g0 = eot / kernel * kernel, g1 = std::min(g0 + kernel, row.size());
    std::vector<double> pooled(x[0].size(), 0.0);
    for (std::size_t i = g0; i < g1; ++i)
        for (std::size_t c = 0; c < pooled.size(); ++c) pooled[c] += mask[i] ? x[i][c] / double(g1 - g0) : 0.0;
    return linear(Rows{pooled}, t.projection, nullptr)[0];
}

inline std::vector<double> image(const Image& img, const ModelParams<double>& p, std::size_t patch, std::size_t heads)
{
    const auto& m = p.image;
    const std::size_t side = img.height / patch;
    Rows patches;
    for (std::size_t py = 0; py < side; ++py)
        for (std::size_t px = 0; px < side; ++px) {
            std::vector<double> v;
            for (std::size_t y = 0; y < patch; ++y)
                for (std::size_t x = 0; x < patch; ++x)
                    for (std::size_t c = 0; c < 3; ++c)
                        v.push_back(2.0 * img.at(py * patch + y, px * patch + x, c) - 1.0);
            patches.push_back(v);
        }
    Rows x{std::vector<double>(m.class_embedding.data(), m.class_embedding.data() + m.class_embedding.size())};
    for (auto& r : linear(patches, m.patch_projection, nullptr)) x.push_back(r);
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t c = 0; c < x[i].size(); ++c) x[i][c] += m.positional(Eigen::Index(i), Eigen::Index(c));
    x = layer_norm(x, m.ln_pre_gain, m.ln_pre_bias);
    for (const auto& b : m.blocks) x = block(x, b, heads, {});
    const Rows cls = layer_norm(Rows{x[0]}, m.ln_post_gain, m.ln_post_bias);
    return linear(cls, m.projection, nullptr)[0];
}

} // namespace lcm::testing::ref
