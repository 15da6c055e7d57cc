#include "pcboost/dataset.hpp"

#include "pcboost/error.hpp"
#include "pcboost/random.hpp"
#include "pcboost/text.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <unordered_set>

namespace pcboost {

namespace {

struct ColumnInfo {
    std::string_view csv;
    std::string_view label;
};

constexpr std::array<ColumnInfo, kColumnCount> kColumns{{
    {"aggregate_size_mm", "Coarse aggregate size (mm)"},
    {"cement_kg", "Cement (kg)"},
    {"w_c", "W/C"},
    {"aggregate_kg", "Coarse aggregate (kg)"},
    {"density_kgm3", "Density (kg/m3)"},
    {"compressive_mpa", "Compressive strength (MPa)"},
    {"tensile_mpa", "Tensile strength (MPa)"},
    {"porosity_pct", "Porosity (%)"},
}};

constexpr std::array<std::string_view, kTargetCount> kTargetNames{"density", "compressive",
                                                                  "tensile", "porosity"};

std::string location(std::string_view source, std::size_t line) {
    return std::string(source) + ":" + std::to_string(line);
}

void validate(const MixtureRecord& r, const std::string& where) {
    if (r.id.empty()) throw DataError(where + ": empty mixture id");
    for (std::size_t c = 0; c < kColumnCount; ++c) {
        const double v = r.values[c];
        if (!std::isfinite(v) || v <= 0.0) {
            throw DataError(where + ": column '" + std::string(kColumns[c].csv) +
                            "' must be strictly positive, got " + format_number(v));
        }
    }
    if (r[Column::Porosity] >= 100.0) {
        throw DataError(where + ": column 'porosity_pct' must be below 100, got " +
                        format_number(r[Column::Porosity]));
    }
    if (r[Column::WaterCement] >= 1.0) {
        throw DataError(where + ": column 'w_c' must be below 1, got " +
                        format_number(r[Column::WaterCement]));
    }
}

} // namespace

std::string_view column_name(Column c) { return kColumns[index_of(c)].csv; }
std::string_view column_label(Column c) { return kColumns[index_of(c)].label; }

std::string_view target_name(Column target) {
    const auto it = std::find(kTargetColumns.begin(), kTargetColumns.end(), target);
    if (it == kTargetColumns.end()) throw ConfigError("not a target column");
    return kTargetNames[static_cast<std::size_t>(it - kTargetColumns.begin())];
}

Column parse_target(std::string_view name) {
    for (std::size_t i = 0; i < kTargetCount; ++i) {
        if (kTargetNames[i] == name) return kTargetColumns[i];
    }
    throw ConfigError("unknown target '" + std::string(name) +
                      "' (expected density, compressive, tensile or porosity)");
}

// -- Dataset ----------------------------------------------------------------

Dataset::Dataset(std::vector<MixtureRecord> records) : records_(std::move(records)) {
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < records_.size(); ++i) {
        const auto where = "record " + std::to_string(i + 1) + " ('" + records_[i].id + "')";
        validate(records_[i], where);
        if (!seen.insert(records_[i].id).second) {
            throw DataError(where + ": duplicate id '" + records_[i].id + "'");
        }
    }
}

std::optional<std::size_t> Dataset::find(std::string_view id) const {
    for (std::size_t i = 0; i < records_.size(); ++i) {
        if (records_[i].id == id) return i;
    }
    return std::nullopt;
}

std::vector<std::string> Dataset::ids() const {
    std::vector<std::string> out;
    out.reserve(records_.size());
    for (const auto& r : records_) out.push_back(r.id);
    return out;
}

std::vector<double> Dataset::column(Column c) const {
    std::vector<double> out;
    out.reserve(records_.size());
    for (const auto& r : records_) out.push_back(r[c]);
    return out;
}

Matrix Dataset::features() const {
    Matrix m(records_.size(), kFeatureCount);
    for (std::size_t i = 0; i < records_.size(); ++i) {
        for (std::size_t j = 0; j < kFeatureCount; ++j) m(i, j) = records_[i][kFeatureColumns[j]];
    }
    return m;
}

std::vector<std::string> Dataset::feature_names() {
    std::vector<std::string> out;
    for (auto c : kFeatureColumns) out.emplace_back(column_name(c));
    return out;
}

std::vector<std::string> Dataset::target_names() {
    std::vector<std::string> out;
    for (auto c : kTargetColumns) out.emplace_back(column_name(c));
    return out;
}

// -- CSV --------------------------------------------------------------------

Dataset load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open data file '" + path.string() + "'");
    return parse_csv(in, path.string());
}

Dataset parse_csv(std::istream& in, std::string_view source) {
    std::string line;
    std::size_t line_no = 0;

    // Header: the first non-blank line.
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
        if (!trim(line).empty()) {
            header = split_fields(line, ',');
            break;
        }
    }
    if (header.empty()) throw DataError(std::string(source) + ": empty file");

    // Position of each expected column in the header.
    std::size_t id_pos = header.size();
    std::array<std::size_t, kColumnCount> pos{};
    pos.fill(header.size());
    for (std::size_t h = 0; h < header.size(); ++h) {
        auto claim = [&](std::size_t& slot) {
            if (slot != header.size()) {
                throw DataError(location(source, line_no) + ": duplicate column '" + header[h] +
                                "'");
            }
            slot = h;
        };
        if (header[h] == "id") {
            claim(id_pos);
            continue;
        }
        for (std::size_t c = 0; c < kColumnCount; ++c) {
            if (header[h] == kColumns[c].csv) claim(pos[c]);
        }
    }
    if (id_pos == header.size()) {
        throw DataError(location(source, line_no) + ": missing column 'id'");
    }
    for (std::size_t c = 0; c < kColumnCount; ++c) {
        if (pos[c] == header.size()) {
            throw DataError(location(source, line_no) + ": missing column '" +
                            std::string(kColumns[c].csv) + "'");
        }
    }

    std::vector<MixtureRecord> records;
    std::unordered_set<std::string> seen;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = split_fields(line, ',');
        const auto where = location(source, line_no);
        if (cells.size() != header.size()) {
            throw DataError(where + ": expected " + std::to_string(header.size()) + " cells, got " +
                            std::to_string(cells.size()));
        }
        MixtureRecord r;
        r.id = cells[id_pos];
        for (std::size_t c = 0; c < kColumnCount; ++c) {
            const auto value = parse_number(cells[pos[c]]);
            if (!value) {
                throw DataError(where + ": column '" + std::string(kColumns[c].csv) +
                                "': cannot parse '" + cells[pos[c]] + "' as a number");
            }
            r.values[c] = *value;
        }
        validate(r, where);
        if (!seen.insert(r.id).second) {
            throw DataError(where + ": column 'id': duplicate id '" + r.id + "'");
        }
        records.push_back(std::move(r));
    }
    if (records.empty()) throw DataError(std::string(source) + ": empty dataset");
    return Dataset(std::move(records));
}

void write_csv(const Dataset& ds, std::ostream& out) {
    out << "id";
    for (const auto& c : kColumns) out << ',' << c.csv;
    out << '\n';
    for (const auto& r : ds.records()) {
        out << r.id;
        for (double v : r.values) out << ',' << format_number(v);
        out << '\n';
    }
}

// -- statistics -------------------------------------------------------------

double quantile(std::span<const double> values, double p) {
    if (values.empty()) throw DataError("quantile of an empty column");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

ColumnStats describe_column(std::span<const double> values) {
    if (values.empty()) throw DataError("empty dataset");
    ColumnStats s;
    s.count = values.size();
    const double n = static_cast<double>(s.count);
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    if (s.count > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.std = std::sqrt(ss / (n - 1.0));
    }
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    s.min = *lo;
    s.max = *hi;
    s.q25 = quantile(values, 0.25);
    s.q50 = quantile(values, 0.50);
    s.q75 = quantile(values, 0.75);
    s.constant = s.count < 2 || s.max == s.min;
    return s;
}

std::array<ColumnStats, kColumnCount> describe(const Dataset& ds) {
    if (ds.empty()) throw DataError("empty dataset");
    std::array<ColumnStats, kColumnCount> out{};
    for (std::size_t c = 0; c < kColumnCount; ++c) {
        out[c] = describe_column(ds.column(static_cast<Column>(c)));
    }
    return out;
}

// -- Scaler -----------------------------------------------------------------

Scaler Scaler::fit(const Dataset& ds, std::span<const Column> columns) {
    if (ds.empty()) throw DataError("cannot fit a scaler on an empty dataset");
    Scaler s;
    for (auto c : columns) {
        const auto values = ds.column(c);
        const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
        s.ranges_[index_of(c)] = Range{*lo, *hi, true};
    }
    return s;
}

Scaler Scaler::fit(const Dataset& ds) {
    std::array<Column, kColumnCount> all{};
    for (std::size_t c = 0; c < kColumnCount; ++c) all[c] = static_cast<Column>(c);
    return fit(ds, all);
}

const Scaler::Range& Scaler::checked(Column c) const {
    const auto& r = ranges_[index_of(c)];
    if (!r.fitted) {
        throw DataError("scaler not fitted for column '" + std::string(column_name(c)) + "'");
    }
    return r;
}

double Scaler::transform(double value, Column c) const {
    const auto& r = checked(c);
    if (r.constant()) return 0.0;
    return (value - r.min) / (r.max - r.min);
}

double Scaler::inverse_transform(double value, Column c) const {
    const auto& r = checked(c);
    if (r.constant()) return r.min;
    return r.min + value * (r.max - r.min);
}

std::vector<double> Scaler::transform(std::span<const double> values, Column c) const {
    std::vector<double> out;
    out.reserve(values.size());
    for (double v : values) out.push_back(transform(v, c));
    return out;
}

std::vector<double> Scaler::inverse_transform(std::span<const double> values, Column c) const {
    std::vector<double> out;
    out.reserve(values.size());
    for (double v : values) out.push_back(inverse_transform(v, c));
    return out;
}

Matrix Scaler::transform_features(const Dataset& ds) const {
    Matrix m(ds.size(), kFeatureCount);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        for (std::size_t j = 0; j < kFeatureCount; ++j) {
            m(i, j) = transform(ds[i][kFeatureColumns[j]], kFeatureColumns[j]);
        }
    }
    return m;
}

// -- split ------------------------------------------------------------------

SplitSpec SplitSpec::holdout(const Dataset& ds, std::set<std::string> test_ids) {
    SplitSpec spec;
    for (const auto& r : ds.records()) {
        if (!test_ids.contains(r.id)) spec.train_ids.insert(r.id);
    }
    spec.test_ids = std::move(test_ids);
    return spec;
}

SplitSpec SplitSpec::random(const Dataset& ds, std::uint64_t seed, double test_fraction) {
    if (!(test_fraction >= 0.0 && test_fraction < 1.0)) {
        throw ConfigError("test fraction must lie in [0, 1)");
    }
    auto order = ds.ids();
    Rng rng(seed);
    rng.shuffle(order);
    const auto n_test =
        static_cast<std::size_t>(std::lround(test_fraction * static_cast<double>(ds.size())));
    return holdout(ds, std::set<std::string>(order.begin(), order.begin() + n_test));
}

SplitSpec published_split(const Dataset& ds) { return SplitSpec::holdout(ds, published_test_ids()); }

SplitResult split(const Dataset& ds, const SplitSpec& spec) {
    for (const auto& id : spec.train_ids) {
        if (!ds.find(id)) throw DataError("split names unknown id '" + id + "'");
        if (spec.test_ids.contains(id)) {
            throw DataError("id '" + id + "' appears in both train and test sets");
        }
    }
    for (const auto& id : spec.test_ids) {
        if (!ds.find(id)) throw DataError("split names unknown id '" + id + "'");
    }

    SplitResult out;
    std::vector<MixtureRecord> train;
    std::vector<MixtureRecord> test;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto& r = ds[i];
        if (spec.train_ids.contains(r.id)) {
            train.push_back(r);
            out.train_rows.push_back(i);
        } else if (spec.test_ids.contains(r.id)) {
            test.push_back(r);
            out.test_rows.push_back(i);
        } else {
            throw DataError("id '" + r.id + "' is in neither the train nor the test set");
        }
    }
    if (test.empty()) out.warning = "test set is empty";
    if (train.empty()) out.warning = "training set is empty";
    out.train = Dataset(std::move(train));
    out.test = Dataset(std::move(test));
    return out;
}

} // namespace pcboost
