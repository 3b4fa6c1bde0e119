#include "lcm/evaluation/retrieval.hpp"

#include "lcm/error.hpp"
#include "lcm/util/parallel.hpp"
#include "lcm/util/random.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace lcm {

std::string_view to_string(Direction d) noexcept
{
    return d == Direction::ImageToText ? "image-to-text" : "text-to-image";
}

Direction parse_direction(std::string_view s)
{
    if (s == "image-to-text" || s == "i2t") return Direction::ImageToText;
    if (s == "text-to-image" || s == "t2i") return Direction::TextToImage;
    throw Error(ErrorKind::InvalidConfig, "direction: unknown value '" + std::string(s) + "'");
}

SimilarityMatrix similarity_matrix(std::span<const Embedding> images, std::span<const Embedding> texts,
                                   Direction direction)
{
    if (images.size() != texts.size())
        throw Error(ErrorKind::Shape, std::to_string(images.size()) + " images vs " + std::to_string(texts.size()) +
                                          " captions");
    const auto n = static_cast<Eigen::Index>(images.size());
    Matrix<double> img(n, n > 0 ? images.front().size() : 0), txt(n, n > 0 ? texts.front().size() : 0);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& a = images[static_cast<std::size_t>(i)];
        const auto& b = texts[static_cast<std::size_t>(i)];
        if (a.size() != img.cols() || b.size() != img.cols())
            throw Error(ErrorKind::Shape, "embedding dimensions differ");
        img.row(i) = a.cast<double>();
        txt.row(i) = b.cast<double>();
    }
    SimilarityMatrix sim;
    sim.direction = direction;
    sim.values = direction == Direction::ImageToText ? Matrix<double>(img * txt.transpose())
                                                     : Matrix<double>(txt * img.transpose());
    return sim;
}

std::size_t true_match_rank(const SimilarityMatrix& sim, std::size_t row)
{
    const auto r = static_cast<Eigen::Index>(row);
    const double target = sim.values(r, r);
    std::size_t rank = 0;
    for (Eigen::Index j = 0; j < sim.values.cols(); ++j) {
        const double s = sim.values(r, j);
        if (s > target || (s == target && j < r)) ++rank;
    }
    return rank;
}

double recall_at_k(const SimilarityMatrix& sim, std::size_t k)
{
    const std::size_t n = sim.size();
    if (k < 1 || k > n)
        throw Error(ErrorKind::InvalidK, "k = " + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (true_match_rank(sim, i) < k) ++hits;
    return static_cast<double>(hits) / static_cast<double>(n);
}

SeedSummary summarize(std::span<const double> per_seed)
{
    if (per_seed.empty()) throw Error(ErrorKind::Shape, "no per-seed values");
    const double n = static_cast<double>(per_seed.size());
    double sum = 0.0;
    for (double v : per_seed) sum += v;
    SeedSummary s;
    s.mean = sum / n;
    if (per_seed.size() > 1) {
        double ss = 0.0;
        for (double v : per_seed) ss += (v - s.mean) * (v - s.mean);
        s.std_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    }
    return s;
}

void RecallReport::validate() const
{
    if (k_values.empty()) throw Error(ErrorKind::InvalidConfig, "k_values: must not be empty");
    if (seeds.empty()) throw Error(ErrorKind::InvalidConfig, "seeds: must not be empty");
    if (per_k.size() != k_values.size()) throw Error(ErrorKind::Shape, "per_k does not match k_values");
    for (std::size_t i = 0; i < per_k.size(); ++i) {
        const auto& r = per_k[i];
        if (r.k != k_values[i]) throw Error(ErrorKind::Shape, "per_k order does not match k_values");
        if (r.per_seed.size() != seeds.size()) throw Error(ErrorKind::Shape, "per-seed count != seed count");
        if (!(r.mean >= 0.0 && r.mean <= 1.0)) throw Error(ErrorKind::Shape, "recall mean outside [0, 1]");
        if (!(r.std_error >= 0.0)) throw Error(ErrorKind::Shape, "negative standard error");
    }
}

std::vector<std::size_t> sample_indices(std::size_t split_size, std::size_t sample_size, std::uint64_t seed)
{
    auto idx = shuffled_indices(split_size, seed);
    idx.resize(std::min(split_size, sample_size));
    std::sort(idx.begin(), idx.end());
    return idx;
}

RecallReport evaluate(std::span<const PairedSample> split, const ModelParams<float>& params, const EncoderConfig& cfg,
                      const LongTextConfig& ltc, const EvalConfig& eval, std::size_t threads)
{
    if (eval.k_values.empty()) throw Error(ErrorKind::InvalidConfig, "k_values: must not be empty");
    if (eval.seeds.empty()) throw Error(ErrorKind::InvalidConfig, "seeds: must not be empty");
    const std::size_t max_k = *std::max_element(eval.k_values.begin(), eval.k_values.end());
    if (std::find(eval.k_values.begin(), eval.k_values.end(), 0) != eval.k_values.end())
        throw Error(ErrorKind::InvalidK, "k must be >= 1");
    if (eval.sample_size < max_k)
        throw Error(ErrorKind::InvalidK, "sample_size " + std::to_string(eval.sample_size) + " < max k " +
                                             std::to_string(max_k));
    if (split.size() < max_k)
        throw Error(ErrorKind::DatasetTooSmall, "split of " + std::to_string(split.size()) + " pairs < max k " +
                                                    std::to_string(max_k));

    std::vector<std::vector<std::size_t>> draws;
    std::map<std::size_t, std::size_t> slot; // split index -> embedding slot
    for (auto seed : eval.seeds) {
        draws.push_back(sample_indices(split.size(), eval.sample_size, seed));
        for (auto i : draws.back()) slot.emplace(i, 0);
    }
    std::vector<std::size_t> needed;
    for (auto& [i, s] : slot) {
        s = needed.size();
        needed.push_back(i);
    }

    std::vector<Embedding> image_embs(needed.size()), text_embs(needed.size());
    parallel_for(needed.size(), threads, [&](std::size_t j) {
        const auto& item = split[needed[j]];
        image_embs[j] = normalize<float>(encode_image<float>(item.image, params, cfg));
        text_embs[j] = encode_long_text<float>(item.caption, params, cfg, ltc);
    });

    RecallReport report;
    report.dataset = eval.dataset_name;
    report.split = eval.split_name;
    report.model = eval.model_name;
    report.direction = eval.direction;
    report.sample_size = eval.sample_size;
    report.pool_size = std::min(split.size(), eval.sample_size);
    report.seeds = eval.seeds;
    report.k_values = eval.k_values;
    report.per_k.resize(eval.k_values.size());
    for (std::size_t q = 0; q < eval.k_values.size(); ++q) report.per_k[q].k = eval.k_values[q];

    for (const auto& draw : draws) {
        std::vector<Embedding> imgs, txts;
        for (auto i : draw) {
            imgs.push_back(image_embs[slot.at(i)]);
            txts.push_back(text_embs[slot.at(i)]);
        }
        const auto sim = similarity_matrix(imgs, txts, eval.direction);
        for (auto& r : report.per_k) r.per_seed.push_back(recall_at_k(sim, r.k));
    }
    for (auto& r : report.per_k) {
        const auto s = summarize(r.per_seed);
        r.mean = s.mean;
        r.std_error = s.std_error;
    }
    report.validate();
    return report;
}

} // namespace lcm
