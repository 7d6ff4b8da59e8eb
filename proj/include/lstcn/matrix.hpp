#pragma once

// Dense row-major matrix of doubles plus the handful of kernels the
// network needs: products, Gram matrices, elementwise transfer functions.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lstcn/errors.hpp"

namespace lstcn {

class RealMatrix {
public:
    RealMatrix() = default;

    RealMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    RealMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        if (data_.size() != rows_ * cols_) {
            throw ShapeError("RealMatrix: " + std::to_string(data_.size()) +
                             " values do not fill a " + shape_string(rows_, cols_) +
                             " matrix");
        }
    }

    RealMatrix(std::initializer_list<std::initializer_list<double>> rows) {
        rows_ = rows.size();
        cols_ = rows_ == 0 ? 0 : rows.begin()->size();
        data_.reserve(rows_ * cols_);
        for (const auto& r : rows) {
            if (r.size() != cols_) throw ShapeError("RealMatrix: ragged initializer");
            data_.insert(data_.end(), r.begin(), r.end());
        }
    }

    static RealMatrix identity(std::size_t n) {
        RealMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const noexcept {
        return {data_.data() + r * cols_, cols_};
    }

    std::span<double> values() & noexcept { return data_; }
    std::span<const double> values() const& noexcept { return data_; }
    // Temporaries hand over their storage so range-for over them stays valid.
    std::vector<double> values() && noexcept { return std::move(data_); }

    std::string shape() const { return shape_string(rows_, cols_); }

    bool same_shape(const RealMatrix& other) const noexcept {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

    friend bool operator==(const RealMatrix&, const RealMatrix&) = default;

    static std::string shape_string(std::size_t r, std::size_t c) {
        return std::to_string(r) + "x" + std::to_string(c);
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

namespace detail {

inline void require_same_shape(const RealMatrix& a, const RealMatrix& b, const char* what) {
    if (!a.same_shape(b)) {
        throw ShapeError(std::string(what) + ": shape mismatch " + a.shape() + " vs " +
                         b.shape());
    }
}

} // namespace detail

/// a * b.
inline RealMatrix matmul(const RealMatrix& a, const RealMatrix& b) {
    if (a.cols() != b.rows()) {
        throw ShapeError("matmul: shape mismatch " + a.shape() + " times " + b.shape());
    }
    RealMatrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto dst = out.row(i);
        const auto src = a.row(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = src[k];
            if (aik == 0.0) continue;
            const auto bk = b.row(k);
            for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += aik * bk[j];
        }
    }
    return out;
}

inline RealMatrix transpose(const RealMatrix& a) {
    RealMatrix out(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
    return out;
}

/// aᵀ a, exploiting symmetry.
inline RealMatrix gram(const RealMatrix& a) {
    const std::size_t n = a.cols();
    RealMatrix g(n, n);
    for (std::size_t k = 0; k < a.rows(); ++k) {
        const auto r = a.row(k);
        for (std::size_t i = 0; i < n; ++i) {
            const double ri = r[i];
            if (ri == 0.0) continue;
            double* gi = &g(i, 0);
            for (std::size_t j = i; j < n; ++j) gi[j] += ri * r[j];
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) g(i, j) = g(j, i);
    return g;
}

/// aᵀ b without forming the transpose.
inline RealMatrix transpose_times(const RealMatrix& a, const RealMatrix& b) {
    if (a.rows() != b.rows()) {
        throw ShapeError("transpose_times: shape mismatch " + a.shape() + " vs " + b.shape());
    }
    RealMatrix out(a.cols(), b.cols());
    for (std::size_t k = 0; k < a.rows(); ++k) {
        const auto ar = a.row(k);
        const auto br = b.row(k);
        for (std::size_t i = 0; i < ar.size(); ++i) {
            const double aki = ar[i];
            if (aki == 0.0) continue;
            auto dst = out.row(i);
            for (std::size_t j = 0; j < br.size(); ++j) dst[j] += aki * br[j];
        }
    }
    return out;
}

/// Adds the single-row matrix `bias` to every row of `m` in place.
inline void add_row_inplace(RealMatrix& m, const RealMatrix& bias) {
    if (bias.rows() != 1 || bias.cols() != m.cols()) {
        throw ShapeError("add_row: bias " + bias.shape() + " does not broadcast over " +
                         m.shape());
    }
    const auto b = bias.row(0);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        auto r = m.row(i);
        for (std::size_t j = 0; j < r.size(); ++j) r[j] += b[j];
    }
}

template <typename F>
RealMatrix map(const RealMatrix& m, F&& f) {
    RealMatrix out = m;
    for (double& v : out.values()) v = f(v);
    return out;
}

template <typename F>
RealMatrix zip(const RealMatrix& a, const RealMatrix& b, F&& f, const char* what = "zip") {
    detail::require_same_shape(a, b, what);
    RealMatrix out = a;
    auto dst = out.values();
    const auto src = b.values();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = f(dst[i], src[i]);
    return out;
}

inline double sigmoid(double x) noexcept {
    // Both branches avoid overflow of exp for large |x|.
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

inline RealMatrix sigmoid(const RealMatrix& x) {
    return map(x, [](double v) { return sigmoid(v); });
}

inline constexpr double kDefaultLogitEpsilon = 1e-6;

inline double logit(double y, double epsilon = kDefaultLogitEpsilon) noexcept {
    // 1 - epsilon is rounded, so the clamp values are computed directly.
    if (y <= epsilon) return std::log(epsilon) - std::log1p(-epsilon);
    if (y >= 1.0 - epsilon) return std::log1p(-epsilon) - std::log(epsilon);
    return std::log(y / (1.0 - y));
}

/// Inverse sigmoid with targets clamped to [epsilon, 1 - epsilon].
inline RealMatrix logit(const RealMatrix& y, double epsilon = kDefaultLogitEpsilon) {
    if (!(epsilon > 0.0 && epsilon < 0.5)) throw DataError("logit: epsilon must lie in (0, 0.5)");
    return map(y, [epsilon](double v) { return logit(v, epsilon); });
}

inline double max_abs_diff(const RealMatrix& a, const RealMatrix& b) {
    detail::require_same_shape(a, b, "max_abs_diff");
    double worst = 0.0;
    const auto x = a.values();
    const auto y = b.values();
    for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::abs(x[i] - y[i]));
    return worst;
}

inline double max_abs(const RealMatrix& a) {
    double worst = 0.0;
    for (double v : a.values()) worst = std::max(worst, std::abs(v));
    return worst;
}

/// Rows [first, first + count) as a new matrix.
inline RealMatrix slice_rows(const RealMatrix& m, std::size_t first, std::size_t count) {
    if (first + count > m.rows()) {
        throw ShapeError("slice_rows: rows [" + std::to_string(first) + ", " +
                         std::to_string(first + count) + ") out of range for " + m.shape());
    }
    const auto src = m.values().subspan(first * m.cols(), count * m.cols());
    return RealMatrix(count, m.cols(), std::vector<double>(src.begin(), src.end()));
}

/// Stacks matrices with equal column counts on top of each other.
inline RealMatrix vstack(std::span<const RealMatrix> parts) {
    if (parts.empty()) return {};
    const std::size_t cols = parts.front().cols();
    std::size_t rows = 0;
    for (const auto& p : parts) {
        if (p.cols() != cols) throw ShapeError("vstack: column mismatch " + p.shape());
        rows += p.rows();
    }
    std::vector<double> data;
    data.reserve(rows * cols);
    for (const auto& p : parts) data.insert(data.end(), p.values().begin(), p.values().end());
    return RealMatrix(rows, cols, std::move(data));
}

} // namespace lstcn
