#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "binco/ggm.hpp"

namespace binco::test {

// Independent standard normal entries.
inline Eigen::MatrixXd gaussian_matrix(int n, int p, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd x(n, p);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < p; ++c) x(r, c) = normal(gen);
    return x;
}

// Correlated columns: each column mixes in its left neighbour.
inline DataMatrix chain_data(int n, int p, std::uint64_t seed, double mix = 0.6) {
    Eigen::MatrixXd x = gaussian_matrix(n, p, seed);
    for (int c = 1; c < p; ++c) x.col(c) += mix * x.col(c - 1);
    return standardize(x);
}

// Fresh empty directory under the system temp path.
inline std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("binco_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace binco::test
