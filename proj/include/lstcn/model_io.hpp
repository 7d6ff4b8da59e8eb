#pragma once

// JSON persistence for trained models and user-supplied prior knowledge.
// Matrices are stored as {"rows", "cols", "data"} with row-major data;
// doubles use the shortest representation that parses back bit-exactly.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lstcn/errors.hpp"
#include "lstcn/io.hpp"
#include "lstcn/matrix.hpp"
#include "lstcn/model.hpp"
#include "lstcn/stcn.hpp"

namespace lstcn {

inline constexpr int kModelFormatVersion = 1;

namespace detail {

using json = nlohmann::json;

inline json matrix_to_json(const RealMatrix& m) {
    return json{{"rows", m.rows()},
                {"cols", m.cols()},
                {"data", std::vector<double>(m.values().begin(), m.values().end())}};
}

inline RealMatrix matrix_from_json(const json& j, const std::string& field) {
    try {
        const auto rows = j.at("rows").get<std::size_t>();
        const auto cols = j.at("cols").get<std::size_t>();
        auto data = j.at("data").get<std::vector<double>>();
        if (data.size() != rows * cols) {
            throw FormatError("field '" + field + "' declares " +
                              RealMatrix::shape_string(rows, cols) + " but holds " +
                              std::to_string(data.size()) + " values");
        }
        return RealMatrix(rows, cols, std::move(data));
    } catch (const json::exception& e) {
        throw FormatError("field '" + field + "': " + e.what());
    }
}

inline void expect_shape(const RealMatrix& m, std::size_t rows, std::size_t cols,
                         const std::string& field) {
    if (m.rows() != rows || m.cols() != cols) {
        throw FormatError("field '" + field + "' has shape " + m.shape() + ", expected " +
                          RealMatrix::shape_string(rows, cols));
    }
}

inline json parse_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open '" + path.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw FormatError("'" + path.string() + "' is not valid JSON: " + e.what());
    }
}

} // namespace detail

inline nlohmann::json model_to_json(const LstcnModel& model) {
    using detail::matrix_to_json;
    nlohmann::json scaling = nlohmann::json::array();
    for (const auto& s : model.scaling) scaling.push_back({{"name", s.name}, {"min", s.min}, {"max", s.max}});
    return {
        {"version", kModelFormatVersion},
        {"n_features", model.n_features},
        {"steps_ahead", model.steps_ahead},
        {"lambda", model.lambda},
        {"patches", model.patches},
        {"seed", model.seed},
        {"sigma", model.sigma},
        {"window", model.window},
        {"scaling", scaling},
        {"w1", matrix_to_json(model.weights.w1)},
        {"b1", matrix_to_json(model.weights.b1)},
        {"w2", matrix_to_json(model.weights.w2)},
        {"b2", matrix_to_json(model.weights.b2)},
        {"per_patch_training_error", model.per_patch_training_error},
    };
}

inline LstcnModel model_from_json(const nlohmann::json& j) {
    using detail::expect_shape;
    using detail::matrix_from_json;
    LstcnModel m;
    try {
        const int version = j.at("version").get<int>();
        if (version != kModelFormatVersion) {
            throw FormatError("unsupported model format version " + std::to_string(version) +
                              " (expected " + std::to_string(kModelFormatVersion) + ")");
        }
        m.n_features = j.at("n_features").get<std::size_t>();
        m.steps_ahead = j.at("steps_ahead").get<std::size_t>();
        m.lambda = j.at("lambda").get<double>();
        m.patches = j.at("patches").get<std::size_t>();
        m.seed = j.at("seed").get<std::uint64_t>();
        m.sigma = j.at("sigma").get<double>();
        m.window = j.at("window").get<std::size_t>();
        for (const auto& s : j.at("scaling")) {
            m.scaling.push_back(
                {s.at("name").get<std::string>(), s.at("min").get<double>(), s.at("max").get<double>()});
        }
        m.per_patch_training_error = j.at("per_patch_training_error").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("malformed model: ") + e.what());
    }
    if (!j.contains("w1") || !j.contains("b1") || !j.contains("w2") || !j.contains("b2")) {
        throw FormatError("malformed model: missing weight matrices");
    }
    m.weights = {matrix_from_json(j["w1"], "w1"), matrix_from_json(j["b1"], "b1"),
                 matrix_from_json(j["w2"], "w2"), matrix_from_json(j["b2"], "b2")};

    const std::size_t width = m.width();
    if (width == 0) throw FormatError("malformed model: n_features and steps_ahead must be positive");
    expect_shape(m.weights.w1, width, width, "w1");
    expect_shape(m.weights.w2, width, width, "w2");
    expect_shape(m.weights.b1, 1, width, "b1");
    expect_shape(m.weights.b2, 1, width, "b2");
    if (m.scaling.size() != m.n_features) {
        throw FormatError("malformed model: " + std::to_string(m.scaling.size()) +
                          " scaling entries for " + std::to_string(m.n_features) + " features");
    }
    if (m.per_patch_training_error.size() != m.patches) {
        throw FormatError("malformed model: per_patch_training_error length does not match patches");
    }
    return m;
}

inline void save_model(const LstcnModel& model, const std::filesystem::path& path) {
    const std::string text = model_to_json(model).dump(2) + "\n";
    write_file_atomically(path, [&](std::ostream& out) { out << text; });
}

inline LstcnModel load_model(const std::filesystem::path& path) {
    return model_from_json(detail::parse_json_file(path));
}

/// Prior knowledge file: {"w2": matrix, "b2": matrix}, the initial learned
/// weights the first block's prior is derived from.
inline LayerWeights load_prior(const std::filesystem::path& path, std::size_t width) {
    const auto j = detail::parse_json_file(path);
    if (!j.is_object() || !j.contains("w2") || !j.contains("b2")) {
        throw FormatError("prior file '" + path.string() + "' must contain 'w2' and 'b2'");
    }
    LayerWeights prior{detail::matrix_from_json(j["w2"], "w2"), detail::matrix_from_json(j["b2"], "b2")};
    detail::expect_shape(prior.weights, width, width, "w2");
    detail::expect_shape(prior.bias, 1, width, "b2");
    return prior;
}

inline void save_prior(const LayerWeights& prior, const std::filesystem::path& path) {
    const nlohmann::json j{{"w2", detail::matrix_to_json(prior.weights)},
                           {"b2", detail::matrix_to_json(prior.bias)}};
    const std::string text = j.dump(2) + "\n";
    write_file_atomically(path, [&](std::ostream& out) { out << text; });
}

} // namespace lstcn
