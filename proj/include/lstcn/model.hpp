#pragma once

// The chained network: prior initialization from a smoothed series, the
// block-by-block training loop and forecasting with the last block.

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "lstcn/errors.hpp"
#include "lstcn/matrix.hpp"
#include "lstcn/metrics.hpp"
#include "lstcn/patches.hpp"
#include "lstcn/series.hpp"
#include "lstcn/stcn.hpp"

namespace lstcn {

inline constexpr double kDefaultPriorSigma = 0.05;
inline constexpr std::size_t kDefaultSmoothingWindow = 100;

struct LstcnModel {
    StcnWeights weights;  // the last block
    std::size_t n_features = 0;
    std::size_t steps_ahead = 0;
    double lambda = 0.0;
    std::size_t patches = 0;
    std::vector<FeatureScaling> scaling;
    std::uint64_t seed = 0;
    double sigma = kDefaultPriorSigma;
    std::size_t window = kDefaultSmoothingWindow;
    std::vector<double> per_patch_training_error;

    std::size_t width() const noexcept { return n_features * steps_ahead; }

    friend bool operator==(const LstcnModel&, const LstcnModel&) = default;
};

/// Initial knowledge matrix: a stateless block (H = X) fitted on smoothed
/// pairs, perturbed with N(0, sigma) noise drawn from `seed`.
inline LayerWeights init_prior(const Patch& smoothed, double lambda, double sigma,
                               std::uint64_t seed) {
    if (!(sigma >= 0.0)) throw DataError("init_prior: sigma must be non-negative");
    LayerWeights prior =
        fit_readout_standardized(smoothed.inputs, smoothed.targets, lambda).unscale();
    if (sigma > 0.0) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> noise(0.0, sigma);
        for (double& v : prior.weights.values()) v += noise(rng);
        for (double& v : prior.bias.values()) v += noise(rng);
    }
    return prior;
}

/// Trains one block per patch, passing tanh(max(W1, W2)) forward as the next
/// block's prior. The first block's prior is tanh of the supplied one.
inline LstcnModel train(const PatchedDataset& dataset, const LayerWeights& prior, double lambda) {
    if (dataset.patches.empty()) throw DataError("train: dataset has no patches");
    const std::size_t m = dataset.columns;
    if (prior.weights.rows() != m || prior.weights.cols() != m || prior.bias.rows() != 1 ||
        prior.bias.cols() != m) {
        throw ShapeError("train: prior " + prior.weights.shape() + " / " + prior.bias.shape() +
                         " does not match block width " + std::to_string(m));
    }

    LstcnModel model;
    model.n_features = dataset.features;
    model.steps_ahead = dataset.window_len;
    model.lambda = lambda;
    model.patches = dataset.patches.size();

    LayerWeights knowledge =
        aggregate_prior({prior.weights, prior.bias, prior.weights, prior.bias});
    for (std::size_t t = 0; t < dataset.patches.size(); ++t) {
        const Patch& patch = dataset.patches[t];
        LayerWeights learned =
            fit_block(patch.inputs, patch.targets, knowledge.weights, knowledge.bias, lambda);
        model.weights = {std::move(knowledge.weights), std::move(knowledge.bias),
                         std::move(learned.weights), std::move(learned.bias)};
        model.per_patch_training_error.push_back(
            mae(stcn_forward(model.weights, patch.inputs), patch.targets));
        if (t + 1 < dataset.patches.size()) knowledge = aggregate_prior(model.weights);
    }
    return model;
}

inline RealMatrix forecast(const LstcnModel& model, const RealMatrix& inputs) {
    if (inputs.cols() != model.width()) {
        throw ShapeError("forecast: input has " + std::to_string(inputs.cols()) +
                         " columns, model expects " + std::to_string(model.width()) + " (" +
                         std::to_string(model.n_features) + " features x " +
                         std::to_string(model.steps_ahead) + " steps)");
    }
    return stcn_forward(model.weights, inputs);
}

} // namespace lstcn
