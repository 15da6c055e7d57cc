#include "pcboost/analysis.hpp"

#include "pcboost/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace pcboost::analysis {

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DataError("pearson: length mismatch");
    if (x.size() < 2) throw DataError("pearson: need at least two samples");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        throw DataError("pearson: correlation undefined for a constant vector");
    }
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::optional<double> SensitivityTable::at(Column input, Column output) const {
    const auto fi = std::find(kFeatureColumns.begin(), kFeatureColumns.end(), input);
    const auto ti = std::find(kTargetColumns.begin(), kTargetColumns.end(), output);
    if (fi == kFeatureColumns.end() || ti == kTargetColumns.end()) {
        throw DataError("sensitivity lookup needs an input and an output column");
    }
    return cc[static_cast<std::size_t>(fi - kFeatureColumns.begin())]
             [static_cast<std::size_t>(ti - kTargetColumns.begin())];
}

SensitivityTable sensitivity_table(const Dataset& ds) {
    if (ds.size() < 2) throw DataError("sensitivity analysis needs at least two records");
    SensitivityTable t;
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
        const auto x = ds.column(kFeatureColumns[i]);
        for (std::size_t j = 0; j < kTargetCount; ++j) {
            const auto y = ds.column(kTargetColumns[j]);
            try {
                t.cc[i][j] = pearson(x, y);
            } catch (const DataError&) {
                t.cc[i][j].reset();
            }
        }
    }
    return t;
}

std::vector<int> rank_descending(std::span<const double> scores) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    std::vector<int> rank(scores.size());
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        rank[order[pos]] = static_cast<int>(pos + 1);
    }
    return rank;
}

ImportanceReport importance(const gbrt::TreeEnsemble& m) {
    const std::size_t d = m.n_features;
    ImportanceReport r;
    r.features = m.feature_names;
    if (r.features.size() != d) {
        r.features.clear();
        for (std::size_t f = 0; f < d; ++f) r.features.push_back("f" + std::to_string(f));
    }

    std::vector<double> gain_sum(d, 0.0);
    std::vector<double> cover_sum(d, 0.0);
    r.weight.assign(d, 0.0);
    for (const auto& tree : m.trees) {
        for (const auto& node : tree.nodes) {
            if (node.is_leaf()) continue;
            const auto f = static_cast<std::size_t>(node.feature);
            gain_sum[f] += node.gain;
            cover_sum[f] += node.cover;
            r.weight[f] += 1.0;
        }
    }
    r.gain.assign(d, 0.0);
    r.cover.assign(d, 0.0);
    for (std::size_t f = 0; f < d; ++f) {
        if (r.weight[f] > 0.0) {
            r.gain[f] = gain_sum[f] / r.weight[f];
            r.cover[f] = cover_sum[f] / r.weight[f];
        }
    }
    r.degenerate = std::all_of(r.weight.begin(), r.weight.end(), [](double w) { return w == 0.0; });

    r.rank_gain = rank_descending(r.gain);
    r.rank_weight = rank_descending(r.weight);
    r.rank_cover = rank_descending(r.cover);
    r.mean_rank.resize(d);
    for (std::size_t f = 0; f < d; ++f) {
        r.mean_rank[f] = (r.rank_gain[f] + r.rank_weight[f] + r.rank_cover[f]) / 3.0;
    }
    return r;
}

} // namespace pcboost::analysis
