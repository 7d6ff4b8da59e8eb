// Trains a network on a noisy sine wave and compares it with the
// persistence baseline on the held-out tail.

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "lstcn/lstcn.hpp"

int main() {
    using namespace lstcn;

    constexpr std::size_t steps = 10'000;
    constexpr std::size_t L = 50;
    std::mt19937_64 rng(7);
    std::normal_distribution<double> noise(0.0, 0.1);

    SeriesTable series;
    series.feature_names = {"signal"};
    series.values = RealMatrix(steps, 1);
    for (std::size_t i = 0; i < steps; ++i) {
        series.values(i, 0) = std::sin(2.0 * std::numbers::pi * static_cast<double>(i) / 200.0) + noise(rng);
    }

    auto [train_raw, test_raw] = split_by_time(series, 0.8);
    const SeriesTable train = trim_to_multiple(normalize(train_raw), L);
    const SeriesTable test = trim_to_multiple(normalize_with(test_raw, train.scaling), L);

    const TuningResult tuned = tune(train, L, TuningGrid{});
    std::printf("tuned: T=%zu lambda=%g (validation MAE %.4f)\n", tuned.best_patches, tuned.best_lambda,
                tuned.best_mae);

    FitSettings settings;
    settings.steps_ahead = L;
    settings.patches = tuned.best_patches;
    settings.lambda = tuned.best_lambda;
    const LstcnModel model = fit_series(train, settings);

    const Patch held_out = make_patches(test, L, 1).patches.front();
    std::printf("test MAE %.4f, persistence MAE %.4f\n", mae(forecast(model, held_out.inputs), held_out.targets),
                mae(persistence_forecast(held_out.inputs, 1), held_out.targets));
}
