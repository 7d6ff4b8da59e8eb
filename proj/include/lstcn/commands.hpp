#pragma once

// End-to-end pipelines behind the command-line tool. Each one reports
// failures as StageError carrying the pipeline stage that failed.

#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "lstcn/errors.hpp"
#include "lstcn/fit.hpp"
#include "lstcn/influence.hpp"
#include "lstcn/io.hpp"
#include "lstcn/metrics.hpp"
#include "lstcn/model.hpp"
#include "lstcn/model_io.hpp"
#include "lstcn/patches.hpp"
#include "lstcn/series.hpp"
#include "lstcn/tuning.hpp"

namespace lstcn {

class StageError : public Error {
public:
    StageError(std::string stage, const std::string& message)
        : Error("[" + stage + "] " + message), stage_(std::move(stage)) {}

    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

struct DataSource {
    std::string path;
    std::vector<std::string> columns;  // empty: every non-timestamp column
    std::optional<std::string> timestamp_column;
    char delimiter = ',';
};

struct RunConfig {
    DataSource data;
    std::size_t steps_ahead = 1;
    std::size_t patches = 1;
    double lambda = 0.1;
    std::uint64_t seed = 0;
    double sigma = kDefaultPriorSigma;
    std::size_t window = kDefaultSmoothingWindow;
    double train_fraction = 0.8;
    std::string model_path;
    std::optional<std::string> prior_path;

    void validate() const {
        if (steps_ahead < 1) throw DataError("--steps-ahead must be at least 1");
        if (patches < 1) throw DataError("--patches must be at least 1");
        if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DataError("--lambda must be >= 0");
        if (!(sigma >= 0.0)) throw DataError("--sigma must be >= 0");
        if (window < 1) throw DataError("--window must be at least 1");
        if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
            throw DataError("--train-fraction must lie in (0, 1)");
        }
    }

    FitSettings fit_settings() const {
        return {steps_ahead, patches, lambda, sigma, window, seed};
    }
};

namespace detail {

template <typename F>
auto stage(const char* name, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(name, e.what());
    }
}

inline SeriesTable load_and_impute(const DataSource& src) {
    SeriesTable raw = stage("load", [&] {
        return load_csv(src.path, src.columns, {src.delimiter, src.timestamp_column});
    });
    return stage("impute", [&] { return impute(std::move(raw)); });
}

inline double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

} // namespace detail

/// Training and test segments, both scaled with the training segment's
/// min/max.
struct PreparedSplit {
    SeriesTable train;
    SeriesTable test;
};

inline PreparedSplit prepare_split(const RunConfig& cfg) {
    SeriesTable series = detail::load_and_impute(cfg.data);
    auto [train, test] = detail::stage("split", [&] { return split_by_time(series, cfg.train_fraction); });
    return detail::stage("normalize", [&] {
        SeriesTable train_n = normalize(std::move(train));
        SeriesTable test_n = normalize_with(std::move(test), train_n.scaling);
        return PreparedSplit{std::move(train_n), std::move(test_n)};
    });
}

// ----------------------------------------------------------------------------
// train

struct TrainSummary {
    LstcnModel model;
    double train_seconds = 0.0;
    std::size_t train_steps = 0;  // after trimming
    std::size_t test_steps = 0;
};

inline TrainSummary run_train(const RunConfig& cfg) {
    detail::stage("config", [&] { cfg.validate(); });
    PreparedSplit data = prepare_split(cfg);
    const SeriesTable train =
        detail::stage("trim", [&] { return trim_to_multiple(data.train, cfg.steps_ahead); });

    std::optional<LayerWeights> prior;
    if (cfg.prior_path) {
        prior = detail::stage("prior", [&] {
            return load_prior(*cfg.prior_path, train.features() * cfg.steps_ahead);
        });
    }

    const auto start = std::chrono::steady_clock::now();
    TrainSummary summary;
    summary.model = detail::stage("train", [&] { return fit_series(train, cfg.fit_settings(), prior); });
    summary.train_seconds = detail::seconds_since(start);
    summary.train_steps = train.steps();
    summary.test_steps = data.test.steps();

    detail::stage("save", [&] { save_model(summary.model, cfg.model_path); });
    return summary;
}

// ----------------------------------------------------------------------------
// tune

inline TuningResult run_tune(const RunConfig& cfg, const TuningGrid& grid,
                             const TuningOptions& options, const std::string& report_path) {
    detail::stage("config", [&] { cfg.validate(); });
    PreparedSplit data = prepare_split(cfg);
    TuningResult result =
        detail::stage("tune", [&] { return tune(data.train, cfg.steps_ahead, grid, options); });
    if (!report_path.empty()) {
        detail::stage("save", [&] {
            write_file_atomically(report_path, [&](std::ostream& out) { write_tuning_csv(out, result); });
        });
    }
    return result;
}

// ----------------------------------------------------------------------------
// forecast / eval share model-driven loading

namespace detail {

/// Loads the model's features from `src` and scales them with the model's
/// stored min/max.
inline SeriesTable load_for_model(const DataSource& src, const LstcnModel& model) {
    DataSource s = src;
    std::vector<std::string> expected;
    for (const auto& f : model.scaling) expected.push_back(f.name);
    if (s.columns.empty()) {
        s.columns = expected;
    } else if (s.columns.size() != model.n_features) {
        throw StageError("load", "model expects " + std::to_string(model.n_features) +
                                     " feature columns, got " + std::to_string(s.columns.size()));
    }
    SeriesTable series = load_and_impute(s);
    return series;
}

inline void require_matching_scaling(const std::vector<std::string>& columns, const LstcnModel& model) {
    if (columns.empty()) return;
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i] != model.scaling[i].name) {
            throw StageError("load", "data column '" + columns[i] +
                                         "' does not match model feature '" + model.scaling[i].name +
                                         "' recorded in the scaling metadata");
        }
    }
}

} // namespace detail

struct ForecastRequest {
    std::string model_path;
    DataSource data;
    std::string out_path;
    std::optional<std::string> normalized_out_path;
};

struct ForecastResult {
    RealMatrix normalized;  // one row per input window
    RealMatrix original;
    std::vector<std::string> stamps;
};

/// Forecasts the L steps that follow every complete window of the data.
inline ForecastResult run_forecast(const ForecastRequest& req) {
    const LstcnModel model = detail::stage("model", [&] { return load_model(req.model_path); });
    SeriesTable series = detail::load_for_model(req.data, model);
    series = detail::stage("normalize", [&] { return normalize_with(std::move(series), model.scaling); });

    const std::size_t L = model.steps_ahead;
    const RealMatrix windows = detail::stage("window", [&] {
        if (series.steps() < L) {
            throw DataError("need at least " + std::to_string(L) + " steps to form a window, got " +
                            std::to_string(series.steps()));
        }
        const std::size_t drop = series.steps() % L;
        return flatten_windows(slice_steps(series, drop, series.steps() - drop).values, L);
    });

    ForecastResult result;
    result.normalized = detail::stage("forecast", [&] { return forecast(model, windows); });
    result.original = denormalize(result.normalized, model.scaling);
    if (!series.timestamps.empty()) {
        const std::size_t drop = series.steps() % L;
        for (std::size_t w = 0; w < windows.rows(); ++w) {
            result.stamps.push_back(series.timestamps[drop + (w + 1) * L - 1]);
        }
    }

    auto write = [&](const std::string& path, const RealMatrix& values) {
        write_file_atomically(path, [&](std::ostream& out) {
            if (!result.stamps.empty()) out << "window_end,";
            for (std::size_t lag = 1; lag <= L; ++lag) {
                for (std::size_t f = 0; f < model.n_features; ++f) {
                    if (lag > 1 || f > 0) out << ',';
                    out << "lag" << lag << '_' << model.scaling[f].name;
                }
            }
            out << '\n';
            for (std::size_t i = 0; i < values.rows(); ++i) {
                if (!result.stamps.empty()) out << result.stamps[i] << ',';
                const auto r = values.row(i);
                for (std::size_t c = 0; c < r.size(); ++c) out << (c ? "," : "") << format_double(r[c]);
                out << '\n';
            }
        });
    };
    detail::stage("save", [&] {
        write(req.out_path, result.original);
        if (req.normalized_out_path) write(*req.normalized_out_path, result.normalized);
    });
    return result;
}

struct EvalRequest {
    std::string model_path;
    DataSource data;
    double train_fraction = 0.8;
    bool original_units = false;
};

struct EvalReport {
    double train_mae = 0.0;            // every training window pair
    double last_patch_mae = 0.0;       // pairs of the final patch only
    double train_persistence_mae = 0.0;
    std::optional<double> test_mae;    // absent when the test segment is shorter than 2L
    std::optional<double> test_persistence_mae;
    std::size_t train_pairs = 0;
    std::size_t test_pairs = 0;
};

inline EvalReport run_eval(const EvalRequest& req) {
    const LstcnModel model = detail::stage("model", [&] { return load_model(req.model_path); });
    detail::require_matching_scaling(req.data.columns, model);
    const SeriesTable series = detail::load_for_model(req.data, model);
    auto [train, test] = detail::stage("split", [&] { return split_by_time(series, req.train_fraction); });
    detail::stage("normalize", [&] {
        train = normalize_with(std::move(train), model.scaling);
        test = normalize_with(std::move(test), model.scaling);
    });

    const std::size_t L = model.steps_ahead;
    auto score = [&](const RealMatrix& predicted, const RealMatrix& actual) {
        if (!req.original_units) return mae(predicted, actual);
        return mae(denormalize(predicted, model.scaling), denormalize(actual, model.scaling));
    };

    EvalReport report;
    detail::stage("evaluate", [&] {
        const SeriesTable trimmed = trim_to_multiple(train, L);
        const PatchedDataset ds = make_patches(trimmed, L, model.patches);
        const Patch& last = ds.patches.back();
        report.last_patch_mae = score(forecast(model, last.inputs), last.targets);

        const Patch all = make_patches(trimmed, L, 1).patches.front();
        report.train_pairs = all.rows();
        report.train_mae = score(forecast(model, all.inputs), all.targets);
        report.train_persistence_mae = score(persistence_forecast(all.inputs, model.n_features), all.targets);

        if (test.steps() >= 2 * L) {
            const Patch t = make_patches(trim_to_multiple(test, L), L, 1).patches.front();
            report.test_pairs = t.rows();
            report.test_mae = score(forecast(model, t.inputs), t.targets);
            report.test_persistence_mae = score(persistence_forecast(t.inputs, model.n_features), t.targets);
        }
    });
    return report;
}

// ----------------------------------------------------------------------------
// explain

struct ExplainRequest {
    std::string model_path;
    WeightSource source = WeightSource::average;
    IndexSetMode mode = IndexSetMode::divisibility;
    std::size_t bins = 20;
    std::string output_prefix;
};

struct ExplainResult {
    InfluenceMatrix raw;
    InfluenceMatrix normalized;
    std::vector<HistogramBin> w1_histogram;
    std::vector<HistogramBin> w2_histogram;
    std::vector<std::string> written;
};

inline ExplainResult run_explain(const ExplainRequest& req) {
    const LstcnModel model = detail::stage("model", [&] { return load_model(req.model_path); });
    ExplainResult r;
    detail::stage("influence", [&] {
        r.raw = influence(combined_weights(model, req.source), model.n_features, req.mode, req.source);
        r.normalized = normalize_influence(r.raw);
        r.w1_histogram = weight_histogram(model.weights.w1, req.bins);
        r.w2_histogram = weight_histogram(model.weights.w2, req.bins);
    });
    std::vector<std::string> names;
    for (const auto& s : model.scaling) names.push_back(s.name);
    detail::stage("save", [&] {
        const std::string p = req.output_prefix;
        auto emit = [&](const std::string& path, auto&& body) {
            write_file_atomically(path, body);
            r.written.push_back(path);
        };
        emit(p + "influence_raw.csv", [&](std::ostream& o) { write_influence_csv(o, r.raw, names); });
        emit(p + "influence_normalized.csv",
             [&](std::ostream& o) { write_influence_csv(o, r.normalized, names); });
        emit(p + "histogram_w1.csv", [&](std::ostream& o) { write_histogram_csv(o, r.w1_histogram); });
        emit(p + "histogram_w2.csv", [&](std::ostream& o) { write_histogram_csv(o, r.w2_histogram); });
    });
    return r;
}

} // namespace lstcn
