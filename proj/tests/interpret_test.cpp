#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "lstcn/influence.hpp"
#include "test_support.hpp"

namespace lstcn {
namespace {

using testing::gaussian_matrix;
using testing::random_matrix;

TEST(IndexSet, DivisibilityMode) {
    EXPECT_EQ(index_set(1, 4), (std::vector<std::size_t>{1, 2, 3, 4}));
    EXPECT_EQ(index_set(2, 4), (std::vector<std::size_t>{2, 4}));
    EXPECT_EQ(index_set(3, 10), (std::vector<std::size_t>{3, 6, 9}));
    EXPECT_TRUE(index_set(5, 4).empty());
    EXPECT_THROW(index_set(0, 4), DataError);
}

TEST(IndexSet, TemporalMode) {
    EXPECT_EQ(index_set(1, 6, IndexSetMode::temporal, 2), (std::vector<std::size_t>{1, 3, 5}));
    EXPECT_EQ(index_set(2, 6, IndexSetMode::temporal, 2), (std::vector<std::size_t>{2, 4, 6}));
    EXPECT_THROW(index_set(1, 5, IndexSetMode::temporal, 2), ShapeError);
    EXPECT_THROW(index_set(3, 6, IndexSetMode::temporal, 2), ShapeError);
}

TEST(IndexSet, TemporalSetsPartitionNeurons) {
    for (std::size_t n = 1; n <= 5; ++n) {
        for (std::size_t l = 1; l <= 4; ++l) {
            std::vector<int> hits(n * l, 0);
            for (std::size_t i = 1; i <= n; ++i)
                for (std::size_t p : index_set(i, n * l, IndexSetMode::temporal, n)) ++hits[p - 1];
            for (int h : hits) EXPECT_EQ(h, 1);
        }
    }
}

TEST(Influence, AllOnesDivisibility) {
    const InfluenceMatrix raw = influence(RealMatrix(4, 4, 1.0), 2, IndexSetMode::divisibility);
    EXPECT_EQ(raw.scores, (RealMatrix{{16, 8}, {8, 4}}));
    EXPECT_FALSE(raw.normalized);
    const InfluenceMatrix norm = normalize_influence(raw);
    EXPECT_TRUE(norm.normalized);
    EXPECT_NEAR(norm.scores(0, 0), 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(norm.scores(1, 0), 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(norm.scores(0, 1), 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(norm.scores(1, 1), 1.0 / 3.0, 1e-15);
}

TEST(Influence, AllOnesTemporal) {
    const InfluenceMatrix raw = influence(RealMatrix(4, 4, 1.0), 2, IndexSetMode::temporal);
    EXPECT_EQ(raw.scores, (RealMatrix{{4, 4}, {4, 4}}));
}

TEST(Influence, UsesAbsoluteValues) {
    const RealMatrix w{{-1, 2}, {3, -4}};
    EXPECT_EQ(influence(w, 2, IndexSetMode::temporal).scores, (RealMatrix{{1, 2}, {3, 4}}));
    EXPECT_EQ(influence(w, 1).scores, (RealMatrix{{10}}));
}

TEST(Influence, ZeroMatrixNormalizesToUniform) {
    const InfluenceMatrix raw = influence(RealMatrix(6, 6), 3);
    for (double v : raw.scores.values()) EXPECT_EQ(v, 0.0);
    for (double v : normalize_influence(raw).scores.values()) EXPECT_NEAR(v, 1.0 / 3.0, 1e-15);
}

TEST(Influence, RejectsBadShapes) {
    EXPECT_THROW(influence(RealMatrix(4, 3), 2), ShapeError);
    EXPECT_THROW(influence(RealMatrix(5, 5), 2), ShapeError);
    EXPECT_THROW(influence(RealMatrix(4, 4), 0), ShapeError);
}

TEST(InfluenceProperty, AbsoluteHomogeneityAndNormalizationInvariance) {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 1 + trial % 4;
        const std::size_t l = 1 + trial % 3;
        const RealMatrix w = gaussian_matrix(n * l, n * l, rng);
        const double a = trial % 2 == 0 ? -2.5 : 0.3;
        const auto mode = trial % 3 == 0 ? IndexSetMode::temporal : IndexSetMode::divisibility;
        const InfluenceMatrix base = influence(w, n, mode);
        const InfluenceMatrix scaled = influence(map(w, [a](double v) { return a * v; }), n, mode);
        for (std::size_t i = 0; i < base.scores.size(); ++i) {
            EXPECT_NEAR(scaled.scores.values()[i], std::abs(a) * base.scores.values()[i],
                        1e-12 * (1.0 + base.scores.values()[i]));
        }
        EXPECT_LE(max_abs_diff(normalize_influence(base).scores, normalize_influence(scaled).scores), 1e-12);
    }
}

TEST(InfluenceProperty, NormalizationIsIdempotentAndColumnsSumToOne) {
    std::mt19937_64 rng(32);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 1 + trial % 5;
        const std::size_t l = 1 + trial % 4;
        const InfluenceMatrix once = normalize_influence(influence(gaussian_matrix(n * l, n * l, rng), n));
        const InfluenceMatrix twice = normalize_influence(once);
        EXPECT_LE(max_abs_diff(once.scores, twice.scores), 1e-15);
        for (std::size_t j = 0; j < n; ++j) {
            double sum = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                EXPECT_GE(once.scores(i, j), 0.0);
                sum += once.scores(i, j);
            }
            EXPECT_NEAR(sum, 1.0, 1e-12);
        }
    }
}

TEST(InfluenceProperty, GrowingOneWeightNeverLowersRawScores) {
    std::mt19937_64 rng(33);
    std::uniform_int_distribution<std::size_t> pick(0, 5);
    for (int trial = 0; trial < 30; ++trial) {
        RealMatrix w = gaussian_matrix(6, 6, rng);
        const InfluenceMatrix before = influence(w, 3);
        const std::size_t r = pick(rng), c = pick(rng);
        w(r, c) = (w(r, c) >= 0 ? 1.0 : -1.0) * (std::abs(w(r, c)) + 0.5);
        const InfluenceMatrix after = influence(w, 3);
        for (std::size_t i = 0; i < 9; ++i) EXPECT_GE(after.scores.values()[i], before.scores.values()[i]);
    }
}

TEST(CombinedWeights, SelectsOrAverages) {
    const StcnWeights w{RealMatrix{{1, 3}}, RealMatrix{{0}}, RealMatrix{{3, -1}}, RealMatrix{{0}}};
    EXPECT_EQ(combined_weights(w, WeightSource::w1), (RealMatrix{{1, 3}}));
    EXPECT_EQ(combined_weights(w, WeightSource::w2), (RealMatrix{{3, -1}}));
    EXPECT_EQ(combined_weights(w, WeightSource::average), (RealMatrix{{2, 1}}));
}

TEST(CombinedWeights, ParsesNames) {
    EXPECT_EQ(parse_weight_source("w1"), WeightSource::w1);
    EXPECT_EQ(parse_weight_source("average"), WeightSource::average);
    EXPECT_FALSE(parse_weight_source("w3").has_value());
    EXPECT_EQ(parse_index_set_mode("temporal"), IndexSetMode::temporal);
    EXPECT_FALSE(parse_index_set_mode("other").has_value());
    EXPECT_EQ(to_string(WeightSource::w2), "w2");
}

TEST(Histogram, ConstantMatrixFillsOneBin) {
    const auto bins = weight_histogram(RealMatrix(3, 3, 0.7), 5);
    ASSERT_EQ(bins.size(), 5u);
    EXPECT_EQ(bins[0].count, 9u);
    for (std::size_t b = 1; b < 5; ++b) EXPECT_EQ(bins[b].count, 0u);
}

TEST(Histogram, CountsCoverEveryEntry) {
    std::mt19937_64 rng(34);
    for (std::size_t m : {1u, 4u, 9u, 20u}) {
        const auto bins = weight_histogram(gaussian_matrix(m, m, rng), 7);
        std::size_t total = 0;
        for (const auto& b : bins) total += b.count;
        EXPECT_EQ(total, m * m);
        EXPECT_LE(bins.front().lower, bins.back().upper);
    }
    EXPECT_THROW(weight_histogram(RealMatrix(2, 2), 0), DataError);
}

TEST(Histogram, SymmetricWeightsGiveRoughlySymmetricCounts) {
    std::mt19937_64 rng(35);
    const std::size_t m = 64;
    RealMatrix w = gaussian_matrix(m, m, rng);
    // Force the range to be symmetric so the middle bin edge sits at zero.
    w(0, 0) = 10.0;
    w(0, 1) = -10.0;
    const auto bins = weight_histogram(w, 20);
    std::size_t left = 0, right = 0;
    for (std::size_t b = 0; b < 10; ++b) left += bins[b].count;
    for (std::size_t b = 10; b < 20; ++b) right += bins[b].count;
    const double asym = std::abs(static_cast<double>(left) - static_cast<double>(right)) /
                        static_cast<double>(m * m);
    EXPECT_LT(asym, 0.05);
}

TEST(InfluenceCsv, WritesHeaderAndRows) {
    std::ostringstream out;
    write_influence_csv(out, influence(RealMatrix(4, 4, 1.0), 2), {"a", "b"});
    EXPECT_EQ(out.str(), "feature,a,b\na,16,8\nb,8,4\n");
    std::ostringstream hist;
    write_histogram_csv(hist, weight_histogram(RealMatrix{{0, 1}}, 2));
    EXPECT_EQ(hist.str(), "bin_lower,bin_upper,count\n0,0.5,1\n0.5,1,1\n");
}

} // namespace
} // namespace lstcn
