#pragma once

// Feature influence scores computed from the block's weight matrices, and
// weight histograms.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "lstcn/errors.hpp"
#include "lstcn/io.hpp"
#include "lstcn/matrix.hpp"
#include "lstcn/model.hpp"

namespace lstcn {

enum class WeightSource { w1, w2, average };

/// How the neuron positions belonging to a feature are selected.
///   divisibility: {p <= M : p mod i == 0}, 1-based.
///   temporal:     {(l - 1) * N + i : l = 1..L}, one neuron per lag block.
enum class IndexSetMode { divisibility, temporal };

inline std::string_view to_string(WeightSource s) {
    switch (s) {
        case WeightSource::w1: return "w1";
        case WeightSource::w2: return "w2";
        case WeightSource::average: return "average";
    }
    return "?";
}

inline std::optional<WeightSource> parse_weight_source(std::string_view s) {
    if (s == "w1") return WeightSource::w1;
    if (s == "w2") return WeightSource::w2;
    if (s == "average") return WeightSource::average;
    return std::nullopt;
}

inline std::string_view to_string(IndexSetMode m) {
    return m == IndexSetMode::divisibility ? "divisibility" : "temporal";
}

inline std::optional<IndexSetMode> parse_index_set_mode(std::string_view s) {
    if (s == "divisibility") return IndexSetMode::divisibility;
    if (s == "temporal") return IndexSetMode::temporal;
    return std::nullopt;
}

struct InfluenceMatrix {
    RealMatrix scores;  // N x N, entry (i, j): influence of feature i on feature j
    WeightSource source = WeightSource::average;
    bool normalized = false;
};

/// 1-based neuron positions attributed to 1-based feature `feature`.
inline std::vector<std::size_t> index_set(std::size_t feature, std::size_t width,
                                          IndexSetMode mode = IndexSetMode::divisibility,
                                          std::size_t features = 0) {
    if (feature == 0) throw DataError("index_set: features are numbered from 1");
    std::vector<std::size_t> out;
    if (mode == IndexSetMode::divisibility) {
        for (std::size_t p = feature; p <= width; p += feature) out.push_back(p);
    } else {
        if (features == 0 || width % features != 0 || feature > features) {
            throw ShapeError("index_set: temporal mode needs width to be a multiple of the "
                             "feature count and 1 <= feature <= N");
        }
        for (std::size_t p = feature; p <= width; p += features) out.push_back(p);
    }
    return out;
}

/// Raw scores: sum of |w| over rows P(i) and columns P(j).
inline InfluenceMatrix influence(const RealMatrix& weights, std::size_t features,
                                 IndexSetMode mode = IndexSetMode::divisibility,
                                 WeightSource source = WeightSource::average) {
    const std::size_t width = weights.rows();
    if (weights.cols() != width || features == 0 || width % features != 0) {
        throw ShapeError("influence: weights " + weights.shape() + " are not M x M with M = " +
                         std::to_string(features) + " x L");
    }
    std::vector<std::vector<std::size_t>> sets;
    for (std::size_t i = 1; i <= features; ++i) sets.push_back(index_set(i, width, mode, features));

    InfluenceMatrix out{RealMatrix(features, features), source, false};
    for (std::size_t i = 0; i < features; ++i) {
        for (std::size_t j = 0; j < features; ++j) {
            double sum = 0.0;
            for (std::size_t p : sets[i])
                for (std::size_t q : sets[j]) sum += std::abs(weights(p - 1, q - 1));
            out.scores(i, j) = sum;
        }
    }
    return out;
}

/// Column-normalizes so each target feature's scores sum to one. An all-zero
/// column becomes uniform.
inline InfluenceMatrix normalize_influence(InfluenceMatrix raw) {
    const std::size_t n = raw.scores.rows();
    for (std::size_t j = 0; j < raw.scores.cols(); ++j) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) total += raw.scores(i, j);
        for (std::size_t i = 0; i < n; ++i) {
            raw.scores(i, j) = total > 0.0 ? raw.scores(i, j) / total : 1.0 / static_cast<double>(n);
        }
    }
    raw.normalized = true;
    return raw;
}

inline RealMatrix combined_weights(const StcnWeights& w, WeightSource source) {
    switch (source) {
        case WeightSource::w1: return w.w1;
        case WeightSource::w2: return w.w2;
        case WeightSource::average:
            return zip(w.w1, w.w2, [](double a, double b) { return 0.5 * (a + b); },
                       "combined_weights");
    }
    throw DataError("combined_weights: unknown source");
}

inline RealMatrix combined_weights(const LstcnModel& model, WeightSource source) {
    return combined_weights(model.weights, source);
}

struct HistogramBin {
    double lower = 0.0;
    double upper = 0.0;
    std::size_t count = 0;
};

/// Equal-width bins spanning [min, max] of the entries; the last bin is
/// closed on the right.
inline std::vector<HistogramBin> weight_histogram(const RealMatrix& m, std::size_t bins) {
    if (bins == 0) throw DataError("weight_histogram: need at least one bin");
    if (m.empty()) throw DataError("weight_histogram: empty matrix");
    const auto [lo_it, hi_it] = std::minmax_element(m.values().begin(), m.values().end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    const double width = (hi - lo) / static_cast<double>(bins);

    std::vector<HistogramBin> out(bins);
    for (std::size_t b = 0; b < bins; ++b) {
        out[b].lower = lo + width * static_cast<double>(b);
        out[b].upper = b + 1 == bins ? hi : lo + width * static_cast<double>(b + 1);
    }
    for (double v : m.values()) {
        std::size_t b = 0;
        if (width > 0.0) {
            b = static_cast<std::size_t>((v - lo) / width);
            b = std::min(b, bins - 1);
        }
        ++out[b].count;
    }
    return out;
}

inline void write_influence_csv(std::ostream& out, const InfluenceMatrix& inf,
                                const std::vector<std::string>& names) {
    const std::size_t n = inf.scores.rows();
    auto name = [&](std::size_t i) { return i < names.size() ? names[i] : "f" + std::to_string(i + 1); };
    out << "feature";
    for (std::size_t j = 0; j < n; ++j) out << ',' << name(j);
    out << '\n';
    for (std::size_t i = 0; i < n; ++i) {
        out << name(i);
        for (std::size_t j = 0; j < n; ++j) out << ',' << format_double(inf.scores(i, j));
        out << '\n';
    }
}

inline void write_histogram_csv(std::ostream& out, const std::vector<HistogramBin>& bins) {
    out << "bin_lower,bin_upper,count\n";
    for (const auto& b : bins) out << format_double(b.lower) << ',' << format_double(b.upper) << ',' << b.count << '\n';
}

} // namespace lstcn
