#pragma once

// Multivariate series ingestion and the transformations applied before
// windowing: nearest-neighbour imputation, min-max scaling, trimming and
// causal smoothing.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "lstcn/errors.hpp"
#include "lstcn/matrix.hpp"

namespace lstcn {

struct FeatureScaling {
    std::string name;
    double min = 0.0;
    double max = 1.0;

    friend bool operator==(const FeatureScaling&, const FeatureScaling&) = default;
};

/// Rows are time steps, columns are features. Missing cells hold NaN until
/// impute() runs.
struct SeriesTable {
    RealMatrix values;
    std::vector<std::string> feature_names;
    std::vector<FeatureScaling> scaling;  // empty until normalize()
    std::vector<std::string> timestamps;  // empty when no timestamp column was named

    std::size_t steps() const noexcept { return values.rows(); }
    std::size_t features() const noexcept { return values.cols(); }
    bool normalized() const noexcept { return !scaling.empty(); }
};

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(double v) noexcept { return std::isnan(v); }

struct CsvOptions {
    char delimiter = ',';
    std::optional<std::string> timestamp_column;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

// Splits one CSV record. Double-quoted fields may contain the delimiter;
// a doubled quote inside them is a literal quote.
inline std::vector<std::string> split_record(std::string_view line, char delimiter) {
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                current.push_back('"');
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                current.push_back(ch);
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == delimiter) {
            fields.emplace_back(trim(current));
            current.clear();
        } else {
            current.push_back(ch);
        }
    }
    fields.emplace_back(trim(current));
    return fields;
}

inline double parse_cell(std::string_view cell) {
    cell = trim(cell);
    if (cell.empty()) return kMissing;
    if (cell.front() == '+') cell.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
        return kMissing;
    }
    return v;
}

} // namespace detail

/// Reads the named columns of a delimited text file with a header row.
/// An empty `feature_columns` selects every column except the timestamp.
/// Unparsable or empty cells become missing values; rows are kept.
inline SeriesTable load_csv(const std::string& path, const std::vector<std::string>& feature_columns,
                            const CsvOptions& options = {}) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open data file '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw DataError("data file '" + path + "' is empty");
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    const auto header = detail::split_record(line, options.delimiter);

    auto find_column = [&](const std::string& name) -> std::size_t {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) {
            throw DataError("column '" + name + "' not found in header of '" + path + "'");
        }
        return static_cast<std::size_t>(it - header.begin());
    };

    std::optional<std::size_t> ts_index;
    if (options.timestamp_column) ts_index = find_column(*options.timestamp_column);

    std::vector<std::string> names = feature_columns;
    if (names.empty()) {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (!ts_index || i != *ts_index) names.push_back(header[i]);
    }
    std::vector<std::size_t> indices;
    indices.reserve(names.size());
    for (const auto& n : names) indices.push_back(find_column(n));
    if (indices.empty()) throw DataError("no feature columns selected in '" + path + "'");

    std::vector<double> data;
    std::vector<std::string> stamps;
    std::size_t steps = 0;
    while (std::getline(in, line)) {
        if (detail::trim(line).empty()) continue;
        const auto fields = detail::split_record(line, options.delimiter);
        for (std::size_t idx : indices) {
            data.push_back(idx < fields.size() ? detail::parse_cell(fields[idx]) : kMissing);
        }
        if (ts_index) stamps.push_back(*ts_index < fields.size() ? fields[*ts_index] : "");
        ++steps;
    }
    if (steps == 0) throw DataError("data file '" + path + "' has no data rows");

    SeriesTable table;
    table.values = RealMatrix(steps, indices.size(), std::move(data));
    table.feature_names = std::move(names);
    table.timestamps = std::move(stamps);
    return table;
}

/// Replaces every missing value with the temporally nearest observed value of
/// the same feature; equidistant neighbours resolve to the earlier one.
inline SeriesTable impute(SeriesTable series) {
    const std::size_t steps = series.steps();
    auto& v = series.values;
    std::vector<std::ptrdiff_t> prev(steps), next(steps);
    for (std::size_t f = 0; f < series.features(); ++f) {
        std::ptrdiff_t last = -1;
        for (std::size_t i = 0; i < steps; ++i) {
            if (!is_missing(v(i, f))) last = static_cast<std::ptrdiff_t>(i);
            prev[i] = last;
        }
        if (last < 0) {
            const std::string name =
                f < series.feature_names.size() ? series.feature_names[f] : std::to_string(f);
            throw DataError("feature '" + name + "' has no observed values to impute from");
        }
        std::ptrdiff_t upcoming = -1;
        for (std::size_t i = steps; i-- > 0;) {
            if (!is_missing(v(i, f))) upcoming = static_cast<std::ptrdiff_t>(i);
            next[i] = upcoming;
        }
        for (std::size_t i = 0; i < steps; ++i) {
            if (!is_missing(v(i, f))) continue;
            const auto here = static_cast<std::ptrdiff_t>(i);
            std::ptrdiff_t source;
            if (prev[i] < 0) {
                source = next[i];
            } else if (next[i] < 0) {
                source = prev[i];
            } else {
                source = (here - prev[i] <= next[i] - here) ? prev[i] : next[i];
            }
            v(i, f) = v(static_cast<std::size_t>(source), f);
        }
    }
    return series;
}

inline double scale_value(double v, const FeatureScaling& s) noexcept {
    const double range = s.max - s.min;
    return range > 0.0 ? (v - s.min) / range : 0.5;
}

inline double unscale_value(double v, const FeatureScaling& s) noexcept {
    return v * (s.max - s.min) + s.min;
}

/// Min-max scaling with externally supplied bounds. Values outside the
/// bounds map outside [0, 1].
inline SeriesTable normalize_with(SeriesTable series, const std::vector<FeatureScaling>& scaling) {
    if (scaling.size() != series.features()) {
        throw ShapeError("normalize_with: " + std::to_string(scaling.size()) +
                         " scaling entries for " + std::to_string(series.features()) +
                         " features");
    }
    for (std::size_t i = 0; i < series.steps(); ++i) {
        auto r = series.values.row(i);
        for (std::size_t f = 0; f < r.size(); ++f) r[f] = scale_value(r[f], scaling[f]);
    }
    series.scaling = scaling;
    return series;
}

/// Per-feature min-max scaling into [0, 1]; constant features map to 0.5.
inline SeriesTable normalize(SeriesTable series) {
    if (series.steps() == 0) throw DataError("normalize: empty series");
    std::vector<FeatureScaling> scaling(series.features());
    for (std::size_t f = 0; f < series.features(); ++f) {
        scaling[f].name = f < series.feature_names.size() ? series.feature_names[f] : "";
        scaling[f].min = std::numeric_limits<double>::infinity();
        scaling[f].max = -std::numeric_limits<double>::infinity();
    }
    for (std::size_t i = 0; i < series.steps(); ++i) {
        const auto r = series.values.row(i);
        for (std::size_t f = 0; f < r.size(); ++f) {
            if (is_missing(r[f])) throw DataError("normalize: series still has missing values");
            scaling[f].min = std::min(scaling[f].min, r[f]);
            scaling[f].max = std::max(scaling[f].max, r[f]);
        }
    }
    return normalize_with(std::move(series), scaling);
}

/// Maps normalized values back to original units. Column c is treated as
/// feature c mod N, matching the flattened window layout.
inline RealMatrix denormalize(RealMatrix m, const std::vector<FeatureScaling>& scaling) {
    if (scaling.empty()) throw DataError("denormalize: no scaling metadata");
    const std::size_t n = scaling.size();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        auto r = m.row(i);
        for (std::size_t c = 0; c < r.size(); ++c) r[c] = unscale_value(r[c], scaling[c % n]);
    }
    return m;
}

inline SeriesTable denormalize(SeriesTable series) {
    if (!series.normalized()) throw DataError("denormalize: series carries no scaling metadata");
    series.values = denormalize(std::move(series.values), series.scaling);
    series.scaling.clear();
    return series;
}

/// Rows [first, first + count).
inline SeriesTable slice_steps(const SeriesTable& series, std::size_t first, std::size_t count) {
    SeriesTable out;
    out.values = slice_rows(series.values, first, count);
    out.feature_names = series.feature_names;
    out.scaling = series.scaling;
    if (!series.timestamps.empty()) {
        out.timestamps.assign(series.timestamps.begin() + static_cast<std::ptrdiff_t>(first),
                              series.timestamps.begin() +
                                  static_cast<std::ptrdiff_t>(first + count));
    }
    return out;
}

/// Drops the earliest steps so the length becomes a multiple of `window`.
inline SeriesTable trim_to_multiple(const SeriesTable& series, std::size_t window) {
    if (window == 0) throw DataError("trim_to_multiple: window length must be positive");
    if (series.steps() < 2 * window) {
        throw DataError("series has " + std::to_string(series.steps()) +
                        " steps; at least " + std::to_string(2 * window) +
                        " are needed to form one input/output window pair of length " +
                        std::to_string(window));
    }
    const std::size_t drop = series.steps() % window;
    return slice_steps(series, drop, series.steps() - drop);
}

/// Chronological split: the first floor(steps * fraction) steps train.
inline std::pair<SeriesTable, SeriesTable> split_by_time(const SeriesTable& series,
                                                         double train_fraction) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw DataError("train fraction must lie in (0, 1)");
    }
    const auto cut = static_cast<std::size_t>(
        std::floor(static_cast<double>(series.steps()) * train_fraction));
    return {slice_steps(series, 0, cut), slice_steps(series, cut, series.steps() - cut)};
}

/// Trailing moving average; the first w - 1 steps average over the shorter
/// available history. A window longer than the series is a cumulative mean.
inline SeriesTable moving_average(const SeriesTable& series, std::size_t window) {
    if (window == 0) throw DataError("moving_average: window must be at least 1");
    SeriesTable out = series;
    for (std::size_t i = 0; i < series.steps(); ++i) {
        const std::size_t first = i + 1 >= window ? i + 1 - window : 0;
        const double count = static_cast<double>(i + 1 - first);
        auto dst = out.values.row(i);
        for (std::size_t f = 0; f < series.features(); ++f) {
            double sum = 0.0;
            for (std::size_t k = first; k <= i; ++k) sum += series.values(k, f);
            dst[f] = sum / count;
        }
    }
    return out;
}

} // namespace lstcn
