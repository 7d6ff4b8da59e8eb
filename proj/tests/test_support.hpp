#pragma once

// Shared generators and independent oracles for the test suites.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "lstcn/matrix.hpp"

namespace lstcn::testing {

inline RealMatrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng,
                                double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    RealMatrix m(rows, cols);
    for (double& v : m.values()) v = dist(rng);
    return m;
}

inline RealMatrix gaussian_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng,
                                  double sd = 1.0) {
    std::normal_distribution<double> dist(0.0, sd);
    RealMatrix m(rows, cols);
    for (double& v : m.values()) v = dist(rng);
    return m;
}

inline Eigen::MatrixXd to_eigen(const RealMatrix& m) {
    Eigen::MatrixXd out(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
    return out;
}

inline RealMatrix from_eigen(const Eigen::MatrixXd& m) {
    RealMatrix out(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
    return out;
}

/// Brute-force ridge: explicitly forms (ΦᵀΦ + λ diag(ΦᵀΦ)) and inverts it.
inline RealMatrix ridge_oracle(const RealMatrix& phi, const RealMatrix& z, double lambda) {
    const Eigen::MatrixXd p = to_eigen(phi);
    const Eigen::MatrixXd g = p.transpose() * p;
    const Eigen::MatrixXd a = g + lambda * Eigen::MatrixXd(g.diagonal().asDiagonal());
    return from_eigen(a.inverse() * p.transpose() * to_eigen(z));
}

/// Fresh, empty scratch directory under the build tree.
inline std::filesystem::path scratch_dir(const std::string& name) {
    const std::filesystem::path dir = std::filesystem::path(LSTCN_TEST_TMPDIR) / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream(path, std::ios::binary) << text;
}

inline std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace lstcn::testing
