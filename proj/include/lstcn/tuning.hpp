#pragma once

// Grid search over the patch count T and ridge penalty λ, scored on a
// time-ordered validation tail of the training windows.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "lstcn/errors.hpp"
#include "lstcn/fit.hpp"
#include "lstcn/io.hpp"
#include "lstcn/metrics.hpp"
#include "lstcn/model.hpp"
#include "lstcn/patches.hpp"
#include "lstcn/series.hpp"

namespace lstcn {

struct TuningGrid {
    std::vector<std::size_t> patch_counts{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    std::vector<double> lambdas{1e-3, 1e-2, 1e-1, 1e+1, 1e+2, 1e+3};
    std::uint64_t seed = 0;
    double validation_fraction = 0.2;
};

struct TuningOptions {
    double sigma = kDefaultPriorSigma;
    std::size_t window = kDefaultSmoothingWindow;
    unsigned jobs = 1;
};

enum class CellStatus { ok, skipped };

struct TuningCell {
    std::size_t patches = 0;
    double lambda = 0.0;
    double validation_mae = std::numeric_limits<double>::quiet_NaN();
    double train_seconds = 0.0;
    CellStatus status = CellStatus::skipped;
    std::string reason;
};

struct TuningResult {
    std::size_t best_patches = 0;
    double best_lambda = 0.0;
    double best_mae = 0.0;
    std::vector<TuningCell> cells;  // patch-major, in grid order
};

/// Window-pair bookkeeping for the fit/validation split of a trimmed series.
struct ValidationSplit {
    std::size_t fit_pairs = 0;
    std::size_t validation_pairs = 0;
};

inline ValidationSplit validation_split(std::size_t pairs, double validation_fraction) {
    if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
        throw DataError("validation fraction must lie in (0, 1)");
    }
    std::size_t val = static_cast<std::size_t>(
        std::llround(static_cast<double>(pairs) * validation_fraction));
    val = std::clamp<std::size_t>(val, 1, pairs);
    return {pairs - val, val};
}

/// Trains one grid cell on the leading pairs of `series` (normalized) and
/// returns the MAE on the held-out trailing pairs. Throws DataError when the
/// cell is infeasible.
inline double evaluate_cell(const SeriesTable& series, std::size_t steps_ahead,
                            std::size_t patches, double lambda, const TuningGrid& grid,
                            const TuningOptions& options) {
    const SeriesTable trimmed = trim_to_multiple(series, steps_ahead);
    const RealMatrix windows = flatten_windows(trimmed.values, steps_ahead);
    const ValidationSplit split = validation_split(windows.rows() - 1, grid.validation_fraction);
    if (split.fit_pairs < patches) {
        throw DataError("only " + std::to_string(split.fit_pairs) + " training pairs for " +
                        std::to_string(patches) + " patches");
    }
    const SeriesTable fit_part = slice_steps(trimmed, 0, (split.fit_pairs + 1) * steps_ahead);
    const FitSettings settings{steps_ahead, patches, lambda, options.sigma, options.window, grid.seed};
    const LstcnModel model = fit_series(fit_part, settings);

    const RealMatrix inputs = slice_rows(windows, split.fit_pairs, split.validation_pairs);
    const RealMatrix targets = slice_rows(windows, split.fit_pairs + 1, split.validation_pairs);
    return mae(forecast(model, inputs), targets);
}

/// Lower MAE wins; ties go to fewer patches, then to the larger penalty.
inline bool better_cell(const TuningCell& a, const TuningCell& b) {
    if (a.validation_mae != b.validation_mae) return a.validation_mae < b.validation_mae;
    if (a.patches != b.patches) return a.patches < b.patches;
    return a.lambda > b.lambda;
}

inline TuningResult tune(const SeriesTable& series, std::size_t steps_ahead, const TuningGrid& grid,
                         const TuningOptions& options = {}) {
    if (grid.patch_counts.empty() || grid.lambdas.empty()) throw DataError("tuning grid is empty");
    TuningResult result;
    for (std::size_t t : grid.patch_counts)
        for (double l : grid.lambdas) {
            TuningCell cell;
            cell.patches = t;
            cell.lambda = l;
            result.cells.push_back(cell);
        }

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < result.cells.size(); i = next++) {
            TuningCell& cell = result.cells[i];
            const auto start = std::chrono::steady_clock::now();
            try {
                cell.validation_mae =
                    evaluate_cell(series, steps_ahead, cell.patches, cell.lambda, grid, options);
                cell.status = std::isfinite(cell.validation_mae) ? CellStatus::ok : CellStatus::skipped;
                if (cell.status == CellStatus::skipped) cell.reason = "non-finite validation error";
            } catch (const DataError& e) {
                cell.reason = e.what();
            } catch (const SingularSystemError& e) {
                cell.reason = e.what();
            }
            cell.train_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        }
    };
    const unsigned jobs = std::max(1u, std::min<unsigned>(options.jobs, static_cast<unsigned>(result.cells.size())));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    }

    const TuningCell* best = nullptr;
    for (const auto& cell : result.cells) {
        if (cell.status != CellStatus::ok) continue;
        if (!best || better_cell(cell, *best)) best = &cell;
    }
    if (!best) {
        throw DataError("every tuning cell was skipped; first reason: " + result.cells.front().reason);
    }
    result.best_patches = best->patches;
    result.best_lambda = best->lambda;
    result.best_mae = best->validation_mae;
    return result;
}

inline void write_tuning_csv(std::ostream& out, const TuningResult& r) {
    out << "T,lambda,validation_mae,train_seconds,status\n";
    for (const auto& c : r.cells) {
        out << c.patches << ',' << format_double(c.lambda) << ',';
        if (c.status == CellStatus::ok) out << format_double(c.validation_mae);
        out << ',' << format_double(c.train_seconds) << ',' << (c.status == CellStatus::ok ? "ok" : "skipped") << '\n';
    }
}

} // namespace lstcn
