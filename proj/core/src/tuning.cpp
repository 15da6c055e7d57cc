#include "pcboost/tuning.hpp"

#include "pcboost/error.hpp"
#include "pcboost/metrics.hpp"
#include "pcboost/random.hpp"
#include "pcboost/text.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <set>
#include <thread>

namespace pcboost::tuning {

// -- grid -------------------------------------------------------------------

void HyperGrid::validate() const {
    std::set<std::string> seen;
    for (const auto& [name, values] : axes) {
        if (values.empty()) throw ConfigError("grid axis '" + name + "' has no values");
        if (!seen.insert(name).second) throw ConfigError("duplicate grid axis '" + name + "'");
    }
}

std::size_t HyperGrid::combination_count() const {
    std::size_t n = 1;
    for (const auto& axis : axes) n *= axis.second.size();
    return n;
}

ParamSet HyperGrid::combination(std::size_t idx) const {
    ParamSet out(axes.size());
    for (std::size_t a = axes.size(); a-- > 0;) {
        const auto& values = axes[a].second;
        out[a] = {axes[a].first, values[idx % values.size()]};
        idx /= values.size();
    }
    return out;
}

HyperGrid HyperGrid::from_config(const Config& cfg, Family family) {
    const auto name = family_name(family);
    const auto* section = cfg.section(name);
    if (!section) {
        throw ConfigError(cfg.source() + ": no [" + std::string(name) + "] section");
    }
    HyperGrid grid;
    grid.family = family;
    for (const auto& e : section->entries) {
        auto values = split_fields(e.value, ',');
        std::erase_if(values, [](const std::string& v) { return v.empty(); });
        grid.axes.emplace_back(e.key, std::move(values));
    }
    grid.validate();
    return grid;
}

HyperGrid default_grid(Family family) {
    HyperGrid g;
    g.family = family;
    if (family == Family::Gbrt) {
        g.axes = {
            {"n_estimators", {"18", "25", "83", "100"}},
            {"max_depth", {"5"}},
            {"eta", {"0.28", "0.3", "0.34", "0.95"}},
            {"gamma", {"0.001", "0.002", "0.005", "0.01"}},
            {"reg_lambda", {"0.81", "0.92", "1.65", "1.69"}},
            {"reg_alpha", {"0.02", "0.11", "1.1"}},
            {"subsample", {"0.7", "1"}},
            {"colsample_bytree", {"0.7", "1"}},
        };
    } else {
        g.axes = {
            {"C", {"1", "3", "10", "29", "39", "100", "200"}},
            {"gamma",
             {"0.001", "0.01", "0.02", "0.05", "0.11", "0.117", "0.16687", "0.3", "0.5", "1"}},
            {"epsilon",
             {"0.001", "0.005", "0.01", "0.02", "0.05", "0.1", "0.15", "0.24", "0.3", "0.5"}},
            {"kernel", {"linear", "poly", "rbf", "sigmoid"}},
        };
    }
    return g;
}

// -- folds ------------------------------------------------------------------

std::vector<std::vector<std::size_t>> kfold_indices(std::size_t n, std::size_t k,
                                                    std::uint64_t seed) {
    if (k < 2) throw ConfigError("k-fold needs at least 2 folds");
    if (k > n) {
        throw ConfigError("cannot cut " + std::to_string(n) + " samples into " +
                          std::to_string(k) + " folds");
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    rng.shuffle(order);

    std::vector<std::vector<std::size_t>> folds(k);
    std::size_t pos = 0;
    for (std::size_t f = 0; f < k; ++f) {
        const std::size_t size = n / k + (f < n % k ? 1 : 0);
        folds[f].assign(order.begin() + static_cast<std::ptrdiff_t>(pos),
                        order.begin() + static_cast<std::ptrdiff_t>(pos + size));
        pos += size;
    }
    return folds;
}

// -- sources ----------------------------------------------------------------

IndexedSource::IndexedSource(const Matrix& X, std::span<const double> y,
                             std::vector<std::size_t> rows)
    : X_(X), y_(y), rows_(std::move(rows)) {
    if (X.rows() != y.size()) throw DataError("IndexedSource: row/target count mismatch");
    for (auto r : rows_) {
        if (r >= X.rows()) throw DataError("IndexedSource: row index out of range");
    }
}

double IndexedSource::read(std::size_t i, std::span<double> x) const {
    const auto r = rows_.at(i);
    if (counts_) counts_[r].fetch_add(1, std::memory_order_relaxed);
    const auto src = X_.row(r);
    std::copy(src.begin(), src.end(), x.begin());
    return y_[r];
}

void IndexedSource::enable_access_log() {
    counts_ = std::make_unique<std::atomic<std::size_t>[]>(X_.rows());
    for (std::size_t r = 0; r < X_.rows(); ++r) counts_[r] = 0;
}

std::size_t IndexedSource::reads(std::size_t r) const {
    return counts_ ? counts_[r].load(std::memory_order_relaxed) : 0;
}

std::pair<Matrix, std::vector<double>> materialize(const SampleSource& src) {
    Matrix X(src.size(), src.feature_count());
    std::vector<double> y(src.size());
    for (std::size_t i = 0; i < src.size(); ++i) y[i] = src.read(i, X.row(i));
    return {std::move(X), std::move(y)};
}

// -- search -----------------------------------------------------------------

namespace {

CvResult cross_validate(const Matrix& X, std::span<const double> y,
                        const std::vector<std::vector<std::size_t>>& folds, Family family,
                        ParamSet params) {
    CvResult r;
    r.params = std::move(params);
    try {
        for (std::size_t f = 0; f < folds.size(); ++f) {
            std::vector<std::size_t> fit_rows;
            for (std::size_t g = 0; g < folds.size(); ++g) {
                if (g != f) fit_rows.insert(fit_rows.end(), folds[g].begin(), folds[g].end());
            }
            std::sort(fit_rows.begin(), fit_rows.end());
            auto held_out = folds[f];
            std::sort(held_out.begin(), held_out.end());

            const auto model = fit_model(family, r.params, X.select_rows(fit_rows),
                                         select(y, fit_rows));
            const auto pred = predict(model, X.select_rows(held_out));
            r.fold_mse.push_back(metrics::mse(select(y, held_out), pred));
        }
        r.mean_mse = std::accumulate(r.fold_mse.begin(), r.fold_mse.end(), 0.0) /
                     static_cast<double>(r.fold_mse.size());
    } catch (const std::exception& e) {
        r.error = e.what();
        r.fold_mse.clear();
        r.mean_mse = std::numeric_limits<double>::infinity();
    }
    return r;
}

} // namespace

SearchResult grid_search(const SampleSource& train, const HyperGrid& grid,
                         const SearchOptions& options) {
    grid.validate();
    if (train.size() == 0) throw DataError("grid_search: empty training data");

    const auto data = materialize(train);
    const Matrix& X = data.first;
    const std::vector<double>& y = data.second;
    const auto folds = kfold_indices(X.rows(), options.folds, options.seed);
    const std::size_t total = grid.combination_count();

    SearchResult out;
    out.folds = options.folds;
    out.seed = options.seed;
    out.table.resize(total);

    auto evaluate = [&](std::size_t idx) {
        out.table[idx] =
            cross_validate(X, y, folds, grid.family, merge(options.fixed, grid.combination(idx)));
    };

    const unsigned workers = std::max(1u, std::min<unsigned>(options.threads,
                                                             static_cast<unsigned>(total)));
    if (workers == 1) {
        for (std::size_t idx = 0; idx < total; ++idx) evaluate(idx);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t idx = next++; idx < total; idx = next++) evaluate(idx);
            });
        }
    }

    std::vector<std::size_t> order(total);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return out.table[a].mean_mse < out.table[b].mean_mse;
    });
    for (std::size_t pos = 0; pos < total; ++pos) {
        out.table[order[pos]].rank = static_cast<int>(pos + 1);
    }
    out.best_index = order.front();
    if (out.table[out.best_index].error) {
        throw Error("grid_search: every combination failed; first error: " +
                    *out.table[out.best_index].error);
    }
    out.best = out.table[out.best_index].params;
    return out;
}

Model refit_best(const SampleSource& train, Family family, const ParamSet& best,
                 std::vector<std::string> feature_names) {
    const auto [X, y] = materialize(train);
    return fit_model(family, best, X, y, std::move(feature_names));
}

void write_cv_csv(const SearchResult& result, const HyperGrid& grid, std::ostream& out) {
    for (const auto& axis : grid.axes) out << axis.first << ',';
    for (std::size_t f = 0; f < result.folds; ++f) out << "fold_" << f + 1 << ',';
    out << "mean_mse,rank,error\n";
    for (const auto& row : result.table) {
        for (const auto& axis : grid.axes) {
            for (const auto& [key, value] : row.params) {
                if (key == axis.first) out << value;
            }
            out << ',';
        }
        for (std::size_t f = 0; f < result.folds; ++f) {
            if (f < row.fold_mse.size()) out << format_number(row.fold_mse[f]);
            out << ',';
        }
        if (!row.error) out << format_number(row.mean_mse);
        out << ',' << row.rank << ',';
        if (row.error) {
            std::string msg = *row.error;
            std::replace(msg.begin(), msg.end(), ',', ';');
            std::replace(msg.begin(), msg.end(), '\n', ' ');
            out << msg;
        }
        out << '\n';
    }
}

} // namespace pcboost::tuning
