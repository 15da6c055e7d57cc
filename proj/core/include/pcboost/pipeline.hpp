#pragma once

// End-to-end experiment: normalize, hold out the published test mixtures,
// fit one GBRT and one SVR per property with the reference hyperparameters,
// and score both phases in physical units against the reference table.

#include "pcboost/analysis.hpp"
#include "pcboost/config.hpp"
#include "pcboost/dataset.hpp"
#include "pcboost/metrics.hpp"
#include "pcboost/model.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace pcboost::pipeline {

/// Where the scaler's min/max come from.
enum class ScalerMode { Full, Train };

std::string_view scaler_mode_name(ScalerMode m);
/// "full" or "train"; throws ConfigError otherwise.
ScalerMode parse_scaler_mode(std::string_view name);

/// Normalized train/test arrays for one target.
struct PreparedTask {
    Column target = Column::Density;
    SplitResult split;
    Scaler scaler;
    Matrix X_train;
    Matrix X_test;
    std::vector<double> y_train; // normalized
    std::vector<double> y_test;  // normalized

    [[nodiscard]] std::vector<double> to_physical(std::span<const double> normalized) const;
};

PreparedTask prepare_task(const Dataset& ds, const SplitSpec& spec, Column target,
                          ScalerMode mode);

// -- reference constants ----------------------------------------------------

struct MetricRef {
    double r2 = 0.0;
    double rmse = 0.0;
    double mae = 0.0;
    double mape = 0.0;
};

struct ReferenceModel {
    std::string label; // e.g. XGBoost2, SVR2
    Family family = Family::Gbrt;
    Column target = Column::Density;
    ParamSet params;
    MetricRef train;
    MetricRef test;
};

struct Bands {
    double test_rmse_factor = 2.0;
    double train_r2_min = 0.90;
    std::vector<Column> train_r2_targets;
};

struct ReferenceValues {
    int format_version = 0;
    /// Per target in Column order: gbrt then svr.
    std::vector<ReferenceModel> models;
    Bands bands;

    [[nodiscard]] const ReferenceModel& find(Family family, Column target) const;
};

inline constexpr int kReferenceFormatVersion = 1;

ReferenceValues parse_reference(const Config& cfg);
ReferenceValues load_reference(const std::filesystem::path& path);

// -- reproduction -----------------------------------------------------------

struct ModelOutcome {
    ReferenceModel reference;
    Model model;
    std::vector<std::string> train_ids;
    std::vector<std::string> test_ids;
    std::vector<double> train_true; // physical units
    std::vector<double> train_pred;
    std::vector<double> test_true;
    std::vector<double> test_pred;
    metrics::EvalReport train;
    metrics::EvalReport test;
    bool band_pass = true;
    std::vector<std::string> band_failures;
};

struct HeadlineChecks {
    int gbrt_beats_svr = 0;       // targets where GBRT test RMSE < SVR test RMSE
    int cement_best_mean_rank = 0; // GBRT models where cement has the best mean rank
    int cement_gain_rank_one = 0;  // GBRT models where cement ranks first by gain
    static constexpr int kRequired = 3;

    [[nodiscard]] bool pass() const {
        return gbrt_beats_svr >= kRequired && cement_best_mean_rank >= kRequired &&
               cement_gain_rank_one >= kRequired;
    }
};

struct ReproOptions {
    ScalerMode scaler = ScalerMode::Full;
    std::uint64_t seed = 42;
};

struct ReproReport {
    ReproOptions options;
    std::vector<ModelOutcome> rows; // 8 rows, reference order
    std::array<analysis::ImportanceReport, kTargetCount> importance;
    analysis::SensitivityTable sensitivity;
    HeadlineChecks headline;

    [[nodiscard]] bool all_bands_pass() const;
    [[nodiscard]] const ModelOutcome& row(Family family, Column target) const;
};

ReproReport reproduce(const Dataset& ds, const ReferenceValues& ref,
                      const ReproOptions& options = {});

} // namespace pcboost::pipeline
