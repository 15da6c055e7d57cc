#pragma once

#include "pcboost/matrix.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pcboost {

/// Numeric columns of the mixture table. The first four are model inputs,
/// the last four are the measured properties.
enum class Column : std::size_t {
    AggregateSize = 0, // mm
    Cement,            // kg
    WaterCement,       // dimensionless ratio
    Aggregate,         // kg
    Density,           // kg/m3
    Compressive,       // MPa
    Tensile,           // MPa
    Porosity,          // percent
};

inline constexpr std::size_t kColumnCount = 8;
inline constexpr std::size_t kFeatureCount = 4;
inline constexpr std::size_t kTargetCount = 4;

inline constexpr std::array<Column, kFeatureCount> kFeatureColumns{
    Column::AggregateSize, Column::Cement, Column::WaterCement, Column::Aggregate};
inline constexpr std::array<Column, kTargetCount> kTargetColumns{
    Column::Density, Column::Compressive, Column::Tensile, Column::Porosity};

constexpr std::size_t index_of(Column c) noexcept { return static_cast<std::size_t>(c); }

/// CSV header name, e.g. "cement_kg".
std::string_view column_name(Column c);
/// Human-readable label with unit, e.g. "Cement (kg)".
std::string_view column_label(Column c);

/// Short target names used on the command line: density, compressive, tensile, porosity.
std::string_view target_name(Column target);
/// Inverse of target_name; throws ConfigError for anything else.
Column parse_target(std::string_view name);

/// One pervious-concrete mixture: four inputs and four measured properties.
struct MixtureRecord {
    std::string id;
    std::array<double, kColumnCount> values{};

    [[nodiscard]] double operator[](Column c) const { return values[index_of(c)]; }
    double& operator[](Column c) { return values[index_of(c)]; }

    friend bool operator==(const MixtureRecord&, const MixtureRecord&) = default;
};

/// Ordered, immutable table of mixtures with unique ids.
class Dataset {
public:
    Dataset() = default;
    /// Validates record invariants and id uniqueness; throws DataError.
    explicit Dataset(std::vector<MixtureRecord> records);

    [[nodiscard]] std::size_t size() const noexcept { return records_.size(); }
    [[nodiscard]] bool empty() const noexcept { return records_.empty(); }
    [[nodiscard]] const std::vector<MixtureRecord>& records() const noexcept { return records_; }
    [[nodiscard]] const MixtureRecord& operator[](std::size_t i) const { return records_[i]; }

    [[nodiscard]] std::optional<std::size_t> find(std::string_view id) const;
    [[nodiscard]] std::vector<std::string> ids() const;

    [[nodiscard]] std::vector<double> column(Column c) const;
    /// n x 4 matrix of the input columns in original units.
    [[nodiscard]] Matrix features() const;

    static std::vector<std::string> feature_names();
    static std::vector<std::string> target_names();

    friend bool operator==(const Dataset&, const Dataset&) = default;

private:
    std::vector<MixtureRecord> records_;
};

Dataset load_csv(const std::filesystem::path& path);
/// Parses CSV text; `source` names the input in diagnostics.
Dataset parse_csv(std::istream& in, std::string_view source = "<stream>");
void write_csv(const Dataset& ds, std::ostream& out);

// -- descriptive statistics -------------------------------------------------

struct ColumnStats {
    std::size_t count = 0;
    double mean = 0.0;
    double std = 0.0; // sample (n - 1) convention; 0 when count < 2
    double min = 0.0;
    double q25 = 0.0;
    double q50 = 0.0;
    double q75 = 0.0;
    double max = 0.0;
    bool constant = false; // max == min, or too few values for a spread
};

/// Quantile by linear interpolation at position p * (n - 1) of the sorted values.
double quantile(std::span<const double> values, double p);

ColumnStats describe_column(std::span<const double> values);
/// Statistics for all eight columns, in Column order. Throws DataError when empty.
std::array<ColumnStats, kColumnCount> describe(const Dataset& ds);

// -- min-max normalization --------------------------------------------------

class Scaler {
public:
    struct Range {
        double min = 0.0;
        double max = 0.0;
        bool fitted = false;
        [[nodiscard]] bool constant() const noexcept { return fitted && max == min; }
    };

    Scaler() = default;

    /// Captures min/max of `columns` over `ds`.
    static Scaler fit(const Dataset& ds, std::span<const Column> columns);
    /// Fits all eight columns.
    static Scaler fit(const Dataset& ds);

    [[nodiscard]] bool fitted(Column c) const noexcept { return ranges_[index_of(c)].fitted; }
    [[nodiscard]] const Range& range(Column c) const noexcept { return ranges_[index_of(c)]; }

    /// (v - min) / (max - min); constant columns map to 0. No clamping.
    [[nodiscard]] double transform(double value, Column c) const;
    [[nodiscard]] double inverse_transform(double value, Column c) const;

    [[nodiscard]] std::vector<double> transform(std::span<const double> values, Column c) const;
    [[nodiscard]] std::vector<double> inverse_transform(std::span<const double> values,
                                                        Column c) const;
    /// Normalized n x 4 input matrix.
    [[nodiscard]] Matrix transform_features(const Dataset& ds) const;

private:
    const Range& checked(Column c) const;

    std::array<Range, kColumnCount> ranges_{};
};

inline Scaler fit_scaler(const Dataset& ds, std::span<const Column> columns) {
    return Scaler::fit(ds, columns);
}

// -- train/test split -------------------------------------------------------

struct SplitSpec {
    std::set<std::string> train_ids;
    std::set<std::string> test_ids;

    /// Train on everything except `test_ids`.
    static SplitSpec holdout(const Dataset& ds, std::set<std::string> test_ids);
    /// Seeded random 80/20 holdout (test size rounded to nearest).
    static SplitSpec random(const Dataset& ds, std::uint64_t seed, double test_fraction = 0.2);
};

/// The published holdout: C11, C12, C15, C21 and C23 are test mixtures.
inline const std::set<std::string>& published_test_ids() {
    static const std::set<std::string> ids{"C11", "C12", "C15", "C21", "C23"};
    return ids;
}
SplitSpec published_split(const Dataset& ds);

struct SplitResult {
    Dataset train;
    Dataset test;
    /// Row positions in the source dataset, file order.
    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> test_rows;
    /// Set when one side is empty.
    std::optional<std::string> warning;
};

/// Partitions `ds` per `spec`. Throws DataError for unknown ids, overlapping
/// sets, or ids in neither set.
SplitResult split(const Dataset& ds, const SplitSpec& spec);

} // namespace pcboost
