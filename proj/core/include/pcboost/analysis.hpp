#pragma once

#include "pcboost/dataset.hpp"
#include "pcboost/gbrt.hpp"

#include <array>
#include <optional>
#include <span>
#include <vector>

namespace pcboost::analysis {

/// Signed product-moment correlation. Throws DataError for n < 2, length
/// mismatch, or a constant argument.
double pearson(std::span<const double> x, std::span<const double> y);

/// Correlation of each input (rows) with each measured property (columns).
/// Entries are empty where a column is constant.
struct SensitivityTable {
    std::array<std::array<std::optional<double>, kTargetCount>, kFeatureCount> cc{};

    [[nodiscard]] std::optional<double> at(Column input, Column output) const;
};

SensitivityTable sensitivity_table(const Dataset& ds);

/// Gain, weight and cover importance with per-method ranks (1 = most important).
struct ImportanceReport {
    std::vector<std::string> features;
    std::vector<double> gain;   // mean recorded split gain
    std::vector<double> weight; // split count
    std::vector<double> cover;  // mean samples reaching the split
    std::vector<int> rank_gain;
    std::vector<int> rank_weight;
    std::vector<int> rank_cover;
    std::vector<double> mean_rank;
    bool degenerate = false; // no splits anywhere in the ensemble
};

/// Ranks scores descending; ties go to the lower index.
std::vector<int> rank_descending(std::span<const double> scores);

ImportanceReport importance(const gbrt::TreeEnsemble& m);

} // namespace pcboost::analysis
