#pragma once

#include "pcboost/config.hpp"
#include "pcboost/matrix.hpp"
#include "pcboost/model.hpp"

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace pcboost::tuning {

/// Named axes of candidate values, searched exhaustively.
struct HyperGrid {
    Family family = Family::Gbrt;
    std::vector<std::pair<std::string, std::vector<std::string>>> axes;

    /// Throws ConfigError on an empty axis or duplicate axis name.
    void validate() const;
    [[nodiscard]] std::size_t combination_count() const;
    /// The idx-th combination; the first axis varies slowest.
    [[nodiscard]] ParamSet combination(std::size_t idx) const;

    /// Reads section [gbrt] or [svr]: key = comma-separated values.
    static HyperGrid from_config(const Config& cfg, Family family);
};

/// Default grid for each family. The published optimum of every target is
/// one of the grid points.
HyperGrid default_grid(Family family);

struct CvResult {
    ParamSet params;
    std::vector<double> fold_mse;
    double mean_mse = 0.0;
    int rank = 0;
    std::optional<std::string> error;
};

struct SearchResult {
    std::size_t best_index = 0;
    ParamSet best;
    std::vector<CvResult> table;
    std::size_t folds = 0;
    std::uint64_t seed = 0;
};

/// Seeded shuffle of 0..n-1 cut into k contiguous folds; the first n % k
/// folds hold one extra index. Throws ConfigError unless 2 <= k <= n.
std::vector<std::vector<std::size_t>> kfold_indices(std::size_t n, std::size_t k,
                                                    std::uint64_t seed);

/// Read-only access to training samples. grid_search reads samples only
/// through this interface.
class SampleSource {
public:
    virtual ~SampleSource() = default;
    [[nodiscard]] virtual std::size_t size() const = 0;
    [[nodiscard]] virtual std::size_t feature_count() const = 0;
    /// Copies sample i's features into `x` and returns its target.
    virtual double read(std::size_t i, std::span<double> x) const = 0;
};

/// Rows `rows` of (X, y), optionally counting reads of each underlying row.
class IndexedSource final : public SampleSource {
public:
    IndexedSource(const Matrix& X, std::span<const double> y, std::vector<std::size_t> rows);

    [[nodiscard]] std::size_t size() const override { return rows_.size(); }
    [[nodiscard]] std::size_t feature_count() const override { return X_.cols(); }
    double read(std::size_t i, std::span<double> x) const override;

    /// Starts counting reads per underlying row of X.
    void enable_access_log();
    /// Reads of underlying row r so far (0 when logging is off).
    [[nodiscard]] std::size_t reads(std::size_t r) const;

private:
    const Matrix& X_;
    std::span<const double> y_;
    std::vector<std::size_t> rows_;
    std::unique_ptr<std::atomic<std::size_t>[]> counts_;
};

/// Copies every sample of `src` into a matrix and target vector.
std::pair<Matrix, std::vector<double>> materialize(const SampleSource& src);

struct SearchOptions {
    std::size_t folds = 5;
    std::uint64_t seed = 42;
    /// Applied under every combination (grid values win on collision).
    ParamSet fixed;
    /// Worker threads; results do not depend on this.
    unsigned threads = 1;
};

/// k-fold CV over every grid combination, scored by mean held-out MSE in
/// the space the samples are given in. Lowest mean wins; ties go to the
/// earlier combination. A combination whose fit throws is kept with its
/// error and ranked last.
SearchResult grid_search(const SampleSource& train, const HyperGrid& grid,
                         const SearchOptions& options = {});

/// Fits `best` on every sample of `train`.
Model refit_best(const SampleSource& train, Family family, const ParamSet& best,
                 std::vector<std::string> feature_names = {});

/// CvResult table: one column per axis, fold_1..fold_k, mean_mse, rank, error.
void write_cv_csv(const SearchResult& result, const HyperGrid& grid, std::ostream& out);

} // namespace pcboost::tuning
