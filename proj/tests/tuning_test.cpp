#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "lstcn/tuning.hpp"
#include "test_support.hpp"

namespace lstcn {
namespace {

SeriesTable noisy_sine(std::size_t steps, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 0.05);
    SeriesTable s;
    s.feature_names = {"y"};
    s.values = RealMatrix(steps, 1);
    for (std::size_t t = 0; t < steps; ++t) {
        s.values(t, 0) = std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / 40.0) + noise(rng);
    }
    return normalize(std::move(s));
}

TuningOptions small_options() {
    TuningOptions o;
    o.window = 10;
    return o;
}

TEST(ValidationSplit, RoundsAndKeepsOnePair) {
    EXPECT_EQ(validation_split(10, 0.2).validation_pairs, 2u);
    EXPECT_EQ(validation_split(10, 0.2).fit_pairs, 8u);
    EXPECT_EQ(validation_split(2, 0.2).validation_pairs, 1u);
    EXPECT_EQ(validation_split(7, 0.5).validation_pairs, 4u);
    EXPECT_THROW(validation_split(10, 0.0), DataError);
    EXPECT_THROW(validation_split(10, 1.0), DataError);
}

TEST(Tune, SingleCellGridReturnsThatCell) {
    const SeriesTable s = noisy_sine(400, 1);
    TuningGrid grid;
    grid.patch_counts = {3};
    grid.lambdas = {0.01};
    const TuningResult r = tune(s, 5, grid, small_options());
    EXPECT_EQ(r.best_patches, 3u);
    EXPECT_EQ(r.best_lambda, 0.01);
    ASSERT_EQ(r.cells.size(), 1u);
    EXPECT_EQ(r.cells[0].status, CellStatus::ok);
    EXPECT_EQ(r.best_mae, r.cells[0].validation_mae);
}

TEST(Tune, BestMaeMatchesDirectEvaluation) {
    const SeriesTable s = noisy_sine(400, 2);
    TuningGrid grid;
    grid.patch_counts = {1, 2, 4};
    grid.lambdas = {1e-3, 1e-1, 10};
    const TuningResult r = tune(s, 5, grid, small_options());
    EXPECT_EQ(r.best_mae, evaluate_cell(s, 5, r.best_patches, r.best_lambda, grid, small_options()));
    for (const auto& c : r.cells) {
        if (c.status == CellStatus::ok) {
            EXPECT_LE(r.best_mae, c.validation_mae);
        }
    }
}

TEST(Tune, TiesPreferFewerPatchesThenLargerPenalty) {
    TuningCell a, b;
    a.validation_mae = b.validation_mae = 0.1;
    a.patches = 2;
    b.patches = 3;
    a.lambda = b.lambda = 1.0;
    EXPECT_TRUE(better_cell(a, b));
    EXPECT_FALSE(better_cell(b, a));
    b.patches = 2;
    b.lambda = 10.0;
    EXPECT_TRUE(better_cell(b, a));
    b.validation_mae = 0.2;
    EXPECT_TRUE(better_cell(a, b));
}

TEST(Tune, TieOnConstantSeriesPicksSmallestPatchCount) {
    // A constant series is forecast identically whatever T is.
    SeriesTable s;
    s.feature_names = {"c"};
    s.values = RealMatrix(200, 1, 0.3);
    s.scaling = {{"c", 0.0, 1.0}};
    TuningGrid grid;
    grid.patch_counts = {4, 2, 3};
    grid.lambdas = {0.1};
    TuningOptions o = small_options();
    o.sigma = 0.0;
    const TuningResult r = tune(s, 4, grid, o);
    for (const auto& c : r.cells) ASSERT_EQ(c.status, CellStatus::ok) << c.reason;
    if (r.cells[0].validation_mae == r.cells[1].validation_mae &&
        r.cells[1].validation_mae == r.cells[2].validation_mae) {
        EXPECT_EQ(r.best_patches, 2u);
    }
}

TEST(Tune, ReportsEveryCellAndFlagsInfeasibleOnes) {
    const SeriesTable s = noisy_sine(100, 3);
    TuningGrid grid;
    grid.patch_counts = {1, 2, 50};
    grid.lambdas = {0.01, 1.0};
    const TuningResult r = tune(s, 5, grid, small_options());
    ASSERT_EQ(r.cells.size(), 6u);
    EXPECT_EQ(r.cells[4].status, CellStatus::skipped);
    EXPECT_EQ(r.cells[5].status, CellStatus::skipped);
    EXPECT_FALSE(r.cells[4].reason.empty());
    EXPECT_NE(r.best_patches, 50u);

    std::ostringstream csv;
    write_tuning_csv(csv, r);
    const std::string text = csv.str();
    EXPECT_EQ(text.rfind("T,lambda,validation_mae,train_seconds,status\n", 0), 0u);
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 7);
    EXPECT_NE(text.find("50,0.01,,"), std::string::npos);
    EXPECT_NE(text.find(",skipped\n"), std::string::npos);
}

TEST(Tune, AllCellsSkippedIsAnError) {
    const SeriesTable s = noisy_sine(60, 4);
    TuningGrid grid;
    grid.patch_counts = {100};
    grid.lambdas = {0.1};
    EXPECT_THROW(tune(s, 5, grid, small_options()), DataError);
    grid.patch_counts.clear();
    EXPECT_THROW(tune(s, 5, grid, small_options()), DataError);
}

TEST(Tune, DeterministicAndIndependentOfJobCount) {
    const SeriesTable s = noisy_sine(300, 5);
    TuningGrid grid;
    grid.patch_counts = {1, 2, 3};
    grid.lambdas = {1e-2, 1.0};
    grid.seed = 9;
    TuningOptions serial = small_options();
    TuningOptions parallel = small_options();
    parallel.jobs = 4;
    const TuningResult a = tune(s, 5, grid, serial);
    const TuningResult b = tune(s, 5, grid, serial);
    const TuningResult c = tune(s, 5, grid, parallel);
    ASSERT_EQ(a.cells.size(), c.cells.size());
    for (std::size_t i = 0; i < a.cells.size(); ++i) {
        EXPECT_EQ(a.cells[i].validation_mae, b.cells[i].validation_mae);
        EXPECT_EQ(a.cells[i].validation_mae, c.cells[i].validation_mae);
    }
    EXPECT_EQ(a.best_patches, c.best_patches);
    EXPECT_EQ(a.best_lambda, c.best_lambda);
}

} // namespace
} // namespace lstcn
