#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "lstcn/errors.hpp"
#include "lstcn/matrix.hpp"
#include "lstcn/series.hpp"

namespace lstcn {

/// Row k of `targets` is the window that follows row k of `inputs`.
struct Patch {
    RealMatrix inputs;
    RealMatrix targets;

    std::size_t rows() const noexcept { return inputs.rows(); }
};

struct PatchedDataset {
    std::vector<Patch> patches;
    std::size_t window_len = 0;  // L
    std::size_t features = 0;    // N
    std::size_t columns = 0;     // M = N * L

    std::size_t total_rows() const noexcept {
        std::size_t n = 0;
        for (const auto& p : patches) n += p.rows();
        return n;
    }
};

/// Cuts the series into consecutive non-overlapping windows of `window_len`
/// steps and flattens each one time-major: column (lag * N + feature).
/// Requires the step count to be a multiple of `window_len`.
inline RealMatrix flatten_windows(const RealMatrix& values, std::size_t window_len) {
    if (window_len == 0) throw DataError("window length must be positive");
    if (values.rows() % window_len != 0) {
        throw DataError("series length " + std::to_string(values.rows()) +
                        " is not a multiple of the window length " + std::to_string(window_len) +
                        "; trim it first");
    }
    // Row-major storage already places a window's steps back to back.
    const std::size_t width = values.cols() * window_len;
    return RealMatrix(values.rows() / window_len, width,
                      std::vector<double>(values.values().begin(), values.values().end()));
}

/// Sizes of `parts` contiguous chunks covering `total` rows; earlier chunks
/// take the remainder.
inline std::vector<std::size_t> split_sizes(std::size_t total, std::size_t parts) {
    std::vector<std::size_t> sizes(parts, total / parts);
    for (std::size_t i = 0; i < total % parts; ++i) ++sizes[i];
    return sizes;
}

/// Windows the series and splits the consecutive (w_k, w_k+1) pairs into
/// `patch_count` time-ordered patches of near-equal size.
inline PatchedDataset make_patches(const SeriesTable& series, std::size_t window_len,
                                   std::size_t patch_count) {
    if (patch_count == 0) throw DataError("patch count must be at least 1");
    const RealMatrix windows = flatten_windows(series.values, window_len);
    const std::size_t pairs = windows.rows() == 0 ? 0 : windows.rows() - 1;
    if (pairs < patch_count) {
        throw DataError("only " + std::to_string(pairs) + " window pairs available for " +
                        std::to_string(patch_count) +
                        " time patches; use fewer patches or a shorter window");
    }

    PatchedDataset out;
    out.window_len = window_len;
    out.features = series.features();
    out.columns = windows.cols();
    std::size_t first = 0;
    for (std::size_t size : split_sizes(pairs, patch_count)) {
        out.patches.push_back({slice_rows(windows, first, size), slice_rows(windows, first + 1, size)});
        first += size;
    }
    return out;
}

} // namespace lstcn
