#pragma once

// CSV and text renderings of the library's result types. Every number in a
// CSV is printed at 17 significant digits so it parses back exactly.

#include "pcboost/analysis.hpp"
#include "pcboost/dataset.hpp"
#include "pcboost/metrics.hpp"
#include "pcboost/pipeline.hpp"

#include <array>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pcboost::report {

/// Aligned table with three decimals, one column per dataset column.
void print_stats(const std::array<ColumnStats, kColumnCount>& stats, std::ostream& out);
void write_stats_csv(const std::array<ColumnStats, kColumnCount>& stats, std::ostream& out);

void print_sensitivity(const analysis::SensitivityTable& t, std::ostream& out);
/// Rows: inputs; columns: input, density, compressive, tensile, porosity.
void write_sensitivity_csv(const analysis::SensitivityTable& t, std::ostream& out);

/// feature, gain, weight, cover, rank_gain, rank_weight, rank_cover, mean_rank
void write_importance_csv(const analysis::ImportanceReport& r, std::ostream& out);
void print_importance(const analysis::ImportanceReport& r, std::ostream& out);

/// Plot-ready rows: mixture_id, experimental, predicted, phase.
void write_predictions_header(std::ostream& out);
void write_predictions_rows(std::span<const std::string> ids, std::span<const double> experimental,
                            std::span<const double> predicted, std::string_view phase,
                            std::ostream& out);

/// phase, n, r2, rmse, mae, mape (r2 blank when undefined).
void write_eval_csv(const metrics::EvalReport& train, const metrics::EvalReport* test,
                    std::ostream& out);
void print_eval(std::string_view title, const metrics::EvalReport& r, std::ostream& out);

/// One row per model with measured, reference and deviation columns.
void write_repro_csv(const pipeline::ReproReport& r, std::ostream& out);
void print_repro(const pipeline::ReproReport& r, std::ostream& out);

void write_params(std::span<const std::pair<std::string, std::string>> params, std::ostream& out);

/// Minimal reader for the CSVs above (no quoting).
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    [[nodiscard]] std::size_t column(std::string_view name) const;
};
CsvTable read_csv_table(std::istream& in);

} // namespace pcboost::report
