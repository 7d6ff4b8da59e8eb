#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "lstcn/model.hpp"
#include "lstcn/patches.hpp"
#include "lstcn/series.hpp"
#include "lstcn/stcn.hpp"

namespace lstcn {

struct FitSettings {
    std::size_t steps_ahead = 1;  // L
    std::size_t patches = 1;      // T
    double lambda = 0.1;
    double sigma = kDefaultPriorSigma;
    std::size_t window = kDefaultSmoothingWindow;
    std::uint64_t seed = 0;
};

/// Builds the initial prior from the smoothed series: every window pair of
/// the moving-averaged series forms one block for a stateless fit.
inline LayerWeights prior_from_series(const SeriesTable& series, const FitSettings& s) {
    const SeriesTable smoothed = moving_average(series, s.window);
    const PatchedDataset all_pairs = make_patches(smoothed, s.steps_ahead, 1);
    return init_prior(all_pairs.patches.front(), s.lambda, s.sigma, s.seed);
}

/// Trains on a normalized series whose length is a multiple of L. When
/// `prior` is empty it is initialized from the smoothed series.
inline LstcnModel fit_series(const SeriesTable& series, const FitSettings& s,
                             const std::optional<LayerWeights>& prior = std::nullopt) {
    const PatchedDataset dataset = make_patches(series, s.steps_ahead, s.patches);
    LstcnModel model = train(dataset, prior ? *prior : prior_from_series(series, s), s.lambda);
    model.scaling = series.scaling;
    model.seed = s.seed;
    model.sigma = s.sigma;
    model.window = s.window;
    return model;
}

} // namespace lstcn
