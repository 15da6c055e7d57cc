#pragma once

// Shared helpers for the test binaries: paths, a seeded value generator for
// property tests, and small file utilities.

#include "pcboost/dataset.hpp"
#include "pcboost/matrix.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace testing {

inline std::filesystem::path data_dir() { return PCBOOST_TEST_DATA_DIR; }

inline const pcboost::Dataset& bundled() {
    static const pcboost::Dataset ds = pcboost::load_csv(data_dir() / "pervious.csv");
    return ds;
}

/// Fresh per-binary scratch directory.
inline std::filesystem::path scratch(const std::string& leaf) {
    const std::filesystem::path dir = std::filesystem::path(PCBOOST_TEST_TMP_DIR) / leaf;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void spit(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

/// Deterministic generator for property tests. Independent of pcboost::Rng.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : eng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }
    bool coin() { return integer(0, 1) == 1; }

    /// k/16 for k in [lo*16, hi*16]; sums of these are exact in binary.
    double dyadic(int lo, int hi) { return integer(lo * 16, hi * 16) / 16.0; }

    std::vector<double> vec(std::size_t n, double lo, double hi) {
        std::vector<double> v(n);
        for (auto& x : v) x = uniform(lo, hi);
        return v;
    }

    pcboost::Matrix matrix(std::size_t rows, std::size_t cols, double lo, double hi) {
        pcboost::Matrix m(rows, cols);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) m(i, j) = uniform(lo, hi);
        return m;
    }

    /// Values from a small integer lattice so duplicates and ties are common.
    pcboost::Matrix lattice(std::size_t rows, std::size_t cols, int levels) {
        pcboost::Matrix m(rows, cols);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) m(i, j) = integer(0, levels - 1);
        return m;
    }

    std::mt19937_64& engine() { return eng_; }

private:
    std::mt19937_64 eng_;
};

inline std::vector<std::size_t> iota(std::size_t n) {
    std::vector<std::size_t> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = i;
    return v;
}

inline double rel_diff(double a, double b) {
    const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
    return std::abs(a - b) / scale;
}

} // namespace testing
