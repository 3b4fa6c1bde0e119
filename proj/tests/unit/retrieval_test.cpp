#include "test_support.hpp"

#include "lcm/encoders/encoders.hpp"
#include "lcm/error.hpp"
#include "lcm/evaluation/retrieval.hpp"
#include "lcm/longcap/long_text.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

namespace lcm {
namespace {

SimilarityMatrix wrap(Matrix<double> m)
{
    SimilarityMatrix s;
    s.values = std::move(m);
    return s;
}

// Sort candidate indices by (score desc, index asc) and check the first k.
double oracle_recall(const Matrix<double>& m, std::size_t k)
{
    const auto n = m.rows();
    std::size_t hits = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return m(i, a) > m(i, b); });
        if (std::find(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), i) !=
            order.begin() + static_cast<std::ptrdiff_t>(k))
            ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(n);
}

std::vector<Embedding> random_units(std::size_t n, Eigen::Index d, Rng& rng)
{
    std::vector<Embedding> out;
    for (std::size_t i = 0; i < n; ++i) {
        Embedding e(d);
        for (auto& x : e) x = static_cast<float>(rng.normal(0, 1));
        out.push_back(e / e.norm());
    }
    return out;
}

TEST(Similarity, IdentityAndTranspose)
{
    Rng rng(1);
    const auto a = random_units(6, 8, rng), b = random_units(6, 8, rng);
    const auto self = similarity_matrix(a, a, Direction::ImageToText);
    for (Eigen::Index i = 0; i < 6; ++i) EXPECT_NEAR(self.values(i, i), 1.0, 1e-6);
    const auto i2t = similarity_matrix(a, b, Direction::ImageToText);
    const auto t2i = similarity_matrix(a, b, Direction::TextToImage);
    EXPECT_TRUE(i2t.values == Matrix<double>(t2i.values.transpose()));
    EXPECT_LE(i2t.values.cwiseAbs().maxCoeff(), 1.0 + 1e-6);

    std::vector<Embedding> basis;
    for (int i = 0; i < 4; ++i) basis.push_back(Embedding::Unit(4, i));
    EXPECT_TRUE(similarity_matrix(basis, basis, Direction::ImageToText).values.isIdentity(1e-6));
    EXPECT_THROW(similarity_matrix(a, random_units(5, 8, rng), Direction::ImageToText), Error);
}

TEST(Recall, IdentityMatrix)
{
    const auto s = wrap(Matrix<double>::Identity(7, 7));
    for (std::size_t k = 1; k <= 7; ++k) EXPECT_EQ(recall_at_k(s, k), 1.0);
}

TEST(Recall, ShiftedMaximum)
{
    Matrix<double> m = Matrix<double>::Zero(4, 4);
    for (Eigen::Index i = 0; i < 4; ++i) {
        m(i, (i + 1) % 4) = 0.9;
        m(i, i) = 0.5;
    }
    const auto s = wrap(m);
    EXPECT_EQ(recall_at_k(s, 1), 0.0);
    EXPECT_EQ(recall_at_k(s, 2), 1.0);
}

TEST(Recall, TiesGoToLowerIndex)
{
    const auto s = wrap(Matrix<double>::Constant(3, 3, 0.2));
    EXPECT_EQ(true_match_rank(s, 0), 0u);
    EXPECT_EQ(true_match_rank(s, 2), 2u);
    EXPECT_DOUBLE_EQ(recall_at_k(s, 1), 1.0 / 3.0);
}

TEST(Recall, MatchesFullSortOracle)
{
    Rng rng(2);
    for (int trial = 0; trial < 40; ++trial) {
        const auto n = static_cast<Eigen::Index>(rng.between(1, 50));
        Matrix<double> m(n, n);
        // coarse values so that ties actually happen
        for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<double>(rng.below(7)) / 7.0;
        const auto s = wrap(m);
        double prev = 0.0;
        for (std::size_t k = 1; k <= static_cast<std::size_t>(n); ++k) {
            const double r = recall_at_k(s, k);
            EXPECT_EQ(r, oracle_recall(m, k)) << "n=" << n << " k=" << k;
            EXPECT_GE(r, prev);
            prev = r;
        }
        EXPECT_EQ(prev, 1.0);
    }
}

TEST(Recall, InvariantToPositiveScaling)
{
    Rng rng(3);
    Matrix<double> m(20, 20);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal(0, 1);
    for (std::size_t k : {1, 5, 10}) EXPECT_EQ(recall_at_k(wrap(m), k), recall_at_k(wrap(m * 37.5), k));
}

TEST(Recall, KOutOfRange)
{
    const auto s = wrap(Matrix<double>::Identity(3, 3));
    for (std::size_t k : {0, 4}) {
        try {
            recall_at_k(s, k);
            ADD_FAILURE();
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::InvalidK);
        }
    }
}

TEST(Summary, SeedStatistics)
{
    const std::vector<double> v{0.070, 0.072, 0.068, 0.071, 0.069};
    const auto s = summarize(v);
    EXPECT_NEAR(s.mean, 0.070, 1e-12);
    // sample variance: (0 + 4 + 4 + 1 + 1)e-6 / 4 = 2.5e-6; / 5 → 5e-7
    EXPECT_NEAR(s.std_error, std::sqrt(5e-7), 1e-12);
    EXPECT_EQ(summarize(std::vector<double>{0.3}).std_error, 0.0);
    EXPECT_NEAR(summarize(std::vector<double>{0.4, 0.4, 0.4}).std_error, 0.0, 1e-15);
}

TEST(Direction, Names)
{
    EXPECT_EQ(to_string(Direction::ImageToText), "image-to-text");
    EXPECT_EQ(parse_direction("t2i"), Direction::TextToImage);
    EXPECT_EQ(parse_direction("text-to-image"), Direction::TextToImage);
    EXPECT_THROW(parse_direction("sideways"), Error);
}

TEST(Sampling, DeterministicSortedSubset)
{
    const auto a = sample_indices(100, 20, 4);
    EXPECT_EQ(a, sample_indices(100, 20, 4));
    EXPECT_NE(a, sample_indices(100, 20, 5));
    EXPECT_TRUE(std::is_sorted(a.begin(), a.end()));
    EXPECT_EQ(std::adjacent_find(a.begin(), a.end()), a.end());
    EXPECT_EQ(sample_indices(10, 2000, 0).size(), 10u);
}

struct Split {
    Vocabulary vocab = testing::letters_vocab();
    EncoderConfig cfg = testing::tiny_config(vocab.size(), 10);
    LongTextConfig ltc{cfg.context_len, 4, false};
    std::vector<PairedSample> items;
    ModelParams<float> params = init_params<float>(cfg, 2);

    explicit Split(std::size_t n)
    {
        Rng rng(5);
        for (std::size_t i = 0; i < n; ++i)
            items.push_back({std::to_string(i), testing::random_image(cfg.image_size, rng),
                             testing::random_sequence(vocab, 1 + rng.below(20), rng)});
    }
};

TEST(Evaluate, MatchesDirectComputationPerSeed)
{
    Split d(30);
    EvalConfig ec;
    ec.sample_size = 12;
    ec.seeds = {0, 1, 2};
    ec.k_values = {1, 5, 12};
    const auto report = evaluate(d.items, d.params, d.cfg, d.ltc, ec, 2);
    EXPECT_EQ(report.pool_size, 12u);
    ASSERT_EQ(report.per_k.size(), 3u);
    for (std::size_t s = 0; s < ec.seeds.size(); ++s) {
        std::vector<Embedding> imgs, txts;
        for (auto i : sample_indices(30, 12, ec.seeds[s])) {
            imgs.push_back(normalize<float>(encode_image<float>(d.items[i].image, d.params, d.cfg)));
            txts.push_back(encode_long_text<float>(d.items[i].caption, d.params, d.cfg, d.ltc));
        }
        const auto sim = similarity_matrix(imgs, txts, Direction::ImageToText);
        for (std::size_t q = 0; q < 3; ++q) EXPECT_EQ(report.per_k[q].per_seed[s], recall_at_k(sim, ec.k_values[q]));
    }
    EXPECT_EQ(report.per_k[2].mean, 1.0);
    EXPECT_EQ(report, evaluate(d.items, d.params, d.cfg, d.ltc, ec, 1));
}

TEST(Evaluate, SingleSeedHasZeroError)
{
    Split d(10);
    EvalConfig ec;
    ec.seeds = {7};
    ec.k_values = {1, 5};
    const auto r = evaluate(d.items, d.params, d.cfg, d.ltc, ec);
    for (const auto& e : r.per_k) EXPECT_EQ(e.std_error, 0.0);
    EXPECT_EQ(r.pool_size, 10u);
    EXPECT_EQ(r.sample_size, 2000u);
}

TEST(Evaluate, Errors)
{
    Split d(10);
    EvalConfig ec;
    ec.k_values = {1, 20};
    try {
        evaluate(d.items, d.params, d.cfg, d.ltc, ec);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::DatasetTooSmall);
    }
    ec.sample_size = 5;
    ec.k_values = {10};
    Split big(30);
    try {
        evaluate(big.items, big.params, big.cfg, big.ltc, ec);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidK);
    }
}

} // namespace
} // namespace lcm
