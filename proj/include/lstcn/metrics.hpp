#pragma once

#include <cmath>
#include <cstddef>
#include <string>

#include "lstcn/errors.hpp"
#include "lstcn/matrix.hpp"

namespace lstcn {

/// Mean absolute error over every entry.
inline double mae(const RealMatrix& predicted, const RealMatrix& actual) {
    detail::require_same_shape(predicted, actual, "mae");
    if (predicted.empty()) throw DataError("mae: empty input");
    const auto p = predicted.values();
    const auto a = actual.values();
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) sum += std::abs(p[i] - a[i]);
    return sum / static_cast<double>(p.size());
}

/// Naive forecast: each window's last observed step, repeated for every lag.
inline RealMatrix persistence_forecast(const RealMatrix& inputs, std::size_t features) {
    if (features == 0 || inputs.cols() % features != 0) {
        throw ShapeError("persistence_forecast: " + std::to_string(inputs.cols()) +
                         " columns is not a multiple of " + std::to_string(features) +
                         " features");
    }
    const std::size_t lags = inputs.cols() / features;
    const std::size_t last = (lags - 1) * features;
    RealMatrix out(inputs.rows(), inputs.cols());
    for (std::size_t i = 0; i < inputs.rows(); ++i) {
        const auto src = inputs.row(i);
        auto dst = out.row(i);
        for (std::size_t lag = 0; lag < lags; ++lag)
            for (std::size_t f = 0; f < features; ++f) dst[lag * features + f] = src[last + f];
    }
    return out;
}

} // namespace lstcn
