#pragma once

#include "lcm/data/dataset.hpp"
#include "lcm/encoders/params.hpp"
#include "lcm/longcap/long_text.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lcm {

enum class Direction { ImageToText, TextToImage };

std::string_view to_string(Direction d) noexcept;
Direction parse_direction(std::string_view s);

/// Row i scores query i against every candidate j; the true match of row i
/// is column i.
struct SimilarityMatrix {
    Matrix<double> values;
    Direction direction = Direction::ImageToText;

    std::size_t size() const noexcept { return static_cast<std::size_t>(values.rows()); }
};

SimilarityMatrix similarity_matrix(std::span<const Embedding> images, std::span<const Embedding> texts,
                                   Direction direction);

// Zero-based rank of the true match in row `row`. Candidates with a higher
// score, or an equal score and a lower index, rank ahead of it.
std::size_t true_match_rank(const SimilarityMatrix& sim, std::size_t row);

double recall_at_k(const SimilarityMatrix& sim, std::size_t k);

struct SeedSummary {
    double mean = 0.0;
    // Sample standard deviation (n - 1 denominator) over sqrt(n); 0 for n == 1.
    double std_error = 0.0;
};

SeedSummary summarize(std::span<const double> per_seed);

struct RecallAtK {
    std::size_t k = 0;
    double mean = 0.0;
    double std_error = 0.0;
    std::vector<double> per_seed;

    bool operator==(const RecallAtK&) const = default;
};

struct RecallReport {
    std::string dataset;
    std::string split;
    std::string model = "lcm";
    Direction direction = Direction::ImageToText;
    std::size_t sample_size = 0; // requested
    std::size_t pool_size = 0;   // pairs actually ranked against each other
    std::vector<std::uint64_t> seeds;
    std::vector<std::size_t> k_values;
    std::vector<RecallAtK> per_k;

    void validate() const;
    bool operator==(const RecallReport&) const = default;
};

struct EvalConfig {
    std::size_t sample_size = 2000;
    std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
    std::vector<std::size_t> k_values{1, 5, 10, 20};
    Direction direction = Direction::ImageToText;
    std::string dataset_name = "dataset";
    std::string split_name = "test";
    std::string model_name = "lcm";
};

// Indices drawn without replacement for one seed, ascending.
std::vector<std::size_t> sample_indices(std::size_t split_size, std::size_t sample_size, std::uint64_t seed);

/// Per seed: sample min(sample_size, |split|) pairs, embed images and
/// sliding-window captions, rank within the sample, record Recall@K. The
/// report aggregates mean and standard error across seeds.
RecallReport evaluate(std::span<const PairedSample> split, const ModelParams<float>& params, const EncoderConfig& cfg,
                      const LongTextConfig& ltc, const EvalConfig& eval, std::size_t threads = 1);

} // namespace lcm
