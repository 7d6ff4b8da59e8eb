#pragma once

// A single short-term cognitive block:
//   H = f(X W1 + B1)      (prior knowledge, fixed during the block's fit)
//   Ŷ = f(H W2 + B2)      (learned by ridge regression on logit(Y))

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "lstcn/errors.hpp"
#include "lstcn/matrix.hpp"
#include "lstcn/ridge.hpp"

namespace lstcn {

/// A weight matrix together with its bias row.
struct LayerWeights {
    RealMatrix weights;  // M x M
    RealMatrix bias;     // 1 x M

    friend bool operator==(const LayerWeights&, const LayerWeights&) = default;
};

struct StcnWeights {
    RealMatrix w1;  // prior knowledge
    RealMatrix b1;
    RealMatrix w2;  // learned
    RealMatrix b2;

    std::size_t width() const noexcept { return w1.rows(); }

    friend bool operator==(const StcnWeights&, const StcnWeights&) = default;
};

namespace detail {

inline void check_layer(const RealMatrix& x, const RealMatrix& w, const RealMatrix& b,
                        const char* what) {
    if (w.rows() != w.cols() || x.cols() != w.rows() || b.rows() != 1 || b.cols() != w.cols()) {
        throw ShapeError(std::string(what) + ": incompatible shapes input " + x.shape() +
                         ", weights " + w.shape() + ", bias " + b.shape());
    }
}

inline RealMatrix affine_sigmoid(const RealMatrix& x, const RealMatrix& w, const RealMatrix& b) {
    RealMatrix z = matmul(x, w);
    add_row_inplace(z, b);
    for (double& v : z.values()) v = sigmoid(v);
    return z;
}

} // namespace detail

inline RealMatrix stcn_hidden(const RealMatrix& x, const RealMatrix& w1, const RealMatrix& b1) {
    detail::check_layer(x, w1, b1, "stcn_hidden");
    return detail::affine_sigmoid(x, w1, b1);
}

inline RealMatrix stcn_output(const RealMatrix& h, const RealMatrix& w2, const RealMatrix& b2) {
    detail::check_layer(h, w2, b2, "stcn_output");
    return detail::affine_sigmoid(h, w2, b2);
}

inline RealMatrix stcn_forward(const StcnWeights& w, const RealMatrix& x) {
    return stcn_output(stcn_hidden(x, w.w1, w.b1), w.w2, w.b2);
}

/// Prior knowledge for the next block: tanh(max(W1, W2)), tanh(max(B1, B2)).
inline LayerWeights aggregate_prior(const StcnWeights& prev) {
    auto g = [](double a, double b) { return std::tanh(std::max(a, b)); };
    return {zip(prev.w1, prev.w2, g, "aggregate_prior"), zip(prev.b1, prev.b2, g, "aggregate_prior")};
}

/// Columns whose standard deviation falls below this are left unscaled.
inline constexpr double kMinColumnStd = 1e-12;

/// Ridge solution on column-standardized activations, before mapping back
/// to the raw activation scale.
struct StandardizedFit {
    std::vector<double> means;      // per activation column
    std::vector<double> stds;       // 1.0 where the column is (near) constant
    std::vector<bool> active;       // false for constant columns, which carry no signal
    RealMatrix weights;             // M x M, rows of inactive columns are zero
    RealMatrix bias;                // 1 x M

    /// Returns the weights expressed on the raw activation scale.
    LayerWeights unscale() const {
        LayerWeights out{RealMatrix(weights.rows(), weights.cols()), bias};
        auto b = out.bias.row(0);
        for (std::size_t m = 0; m < weights.rows(); ++m) {
            const auto src = weights.row(m);
            auto dst = out.weights.row(m);
            for (std::size_t j = 0; j < src.size(); ++j) {
                dst[j] = src[j] / stds[m];
                b[j] -= means[m] * dst[j];
            }
        }
        return out;
    }

    RealMatrix standardize(const RealMatrix& activations) const {
        RealMatrix out = activations;
        for (std::size_t i = 0; i < out.rows(); ++i) {
            auto r = out.row(i);
            for (std::size_t m = 0; m < r.size(); ++m) r[m] = (r[m] - means[m]) / stds[m];
        }
        return out;
    }
};

/// Fits W, B so that sigmoid(A W + B) approximates `targets`, solving the
/// ridge problem on standardized columns of `activations` with an appended
/// ones column for the bias. Constant columns are excluded from the solve
/// (their weights are zero; their mean folds into the bias).
inline StandardizedFit fit_readout_standardized(const RealMatrix& activations,
                                                const RealMatrix& targets, double lambda,
                                                double epsilon = kDefaultLogitEpsilon) {
    if (activations.rows() != targets.rows() || activations.rows() == 0) {
        throw ShapeError("fit_readout: activations " + activations.shape() + " vs targets " +
                         targets.shape());
    }
    const std::size_t k = activations.rows();
    const std::size_t m = activations.cols();

    StandardizedFit fit;
    fit.means.assign(m, 0.0);
    fit.stds.assign(m, 1.0);
    fit.active.assign(m, false);
    for (std::size_t i = 0; i < k; ++i) {
        const auto r = activations.row(i);
        for (std::size_t c = 0; c < m; ++c) fit.means[c] += r[c];
    }
    for (double& mu : fit.means) mu /= static_cast<double>(k);
    std::vector<double> var(m, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        const auto r = activations.row(i);
        for (std::size_t c = 0; c < m; ++c) {
            const double d = r[c] - fit.means[c];
            var[c] += d * d;
        }
    }
    std::vector<std::size_t> used;
    for (std::size_t c = 0; c < m; ++c) {
        const double sd = std::sqrt(var[c] / static_cast<double>(k));
        if (sd >= kMinColumnStd) {
            fit.stds[c] = sd;
            fit.active[c] = true;
            used.push_back(c);
        }
    }

    // Φ = (standardized active columns | 1)
    RealMatrix phi(k, used.size() + 1);
    for (std::size_t i = 0; i < k; ++i) {
        const auto src = activations.row(i);
        auto dst = phi.row(i);
        for (std::size_t u = 0; u < used.size(); ++u) {
            const std::size_t c = used[u];
            dst[u] = (src[c] - fit.means[c]) / fit.stds[c];
        }
        dst[used.size()] = 1.0;
    }
    const RealMatrix gamma = ridge_solve(phi, logit(targets, epsilon), lambda);

    fit.weights = RealMatrix(m, targets.cols());
    for (std::size_t u = 0; u < used.size(); ++u) {
        const auto src = gamma.row(u);
        std::copy(src.begin(), src.end(), fit.weights.row(used[u]).begin());
    }
    fit.bias = slice_rows(gamma, used.size(), 1);
    return fit;
}

/// Learns (W2, B2) for one block given its fixed prior (W1, B1).
inline LayerWeights fit_block(const RealMatrix& x, const RealMatrix& y, const RealMatrix& w1,
                              const RealMatrix& b1, double lambda,
                              double epsilon = kDefaultLogitEpsilon) {
    if (!x.same_shape(y)) {
        throw ShapeError("fit_block: inputs " + x.shape() + " vs targets " + y.shape());
    }
    return fit_readout_standardized(stcn_hidden(x, w1, b1), y, lambda, epsilon).unscale();
}

} // namespace lstcn
