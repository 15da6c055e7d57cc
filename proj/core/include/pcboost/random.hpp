#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace pcboost {

/// Seeded generator with platform-independent helpers.
///
/// std::uniform_int_distribution and std::shuffle are implementation-defined,
/// so index draws go through rejection sampling on the raw 64-bit engine
/// output. Identical seeds give identical draws on every standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform integer in [0, bound). `bound` must be positive.
    std::size_t index(std::size_t bound);

    /// Uniform double in [0, 1).
    double uniform();

    /// Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& values) {
        for (std::size_t i = values.size(); i > 1; --i) {
            std::swap(values[i - 1], values[index(i)]);
        }
    }

    /// `count` distinct values from [0, n), returned sorted ascending.
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t count);

private:
    std::mt19937_64 engine_;
};

} // namespace pcboost
