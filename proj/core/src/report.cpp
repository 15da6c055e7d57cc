#include "pcboost/report.hpp"

#include "pcboost/error.hpp"
#include "pcboost/text.hpp"

#include <cmath>
#include <iomanip>

namespace pcboost::report {

namespace {

std::string opt(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

std::string pad(std::string_view text, std::size_t width) {
    std::string s(text);
    if (s.size() < width) s.insert(0, width - s.size(), ' ');
    return s;
}

struct StatRow {
    std::string_view name;
    double ColumnStats::*field;
};

constexpr std::array<StatRow, 7> kStatRows{{
    {"mean", &ColumnStats::mean},
    {"std", &ColumnStats::std},
    {"min", &ColumnStats::min},
    {"25%", &ColumnStats::q25},
    {"50%", &ColumnStats::q50},
    {"75%", &ColumnStats::q75},
    {"max", &ColumnStats::max},
}};

} // namespace

void print_stats(const std::array<ColumnStats, kColumnCount>& stats, std::ostream& out) {
    constexpr std::size_t w = 18;
    out << pad("", 8);
    for (std::size_t c = 0; c < kColumnCount; ++c) out << pad(column_name(static_cast<Column>(c)), w);
    out << '\n' << pad("count", 8);
    for (const auto& s : stats) out << pad(std::to_string(s.count), w);
    out << '\n';
    for (const auto& row : kStatRows) {
        out << pad(row.name, 8);
        for (const auto& s : stats) out << pad(format_fixed(s.*row.field, 3), w);
        out << '\n';
    }
}

void write_stats_csv(const std::array<ColumnStats, kColumnCount>& stats, std::ostream& out) {
    out << "statistic";
    for (std::size_t c = 0; c < kColumnCount; ++c) out << ',' << column_name(static_cast<Column>(c));
    out << "\ncount";
    for (const auto& s : stats) out << ',' << s.count;
    out << '\n';
    for (const auto& row : kStatRows) {
        out << row.name;
        for (const auto& s : stats) out << ',' << format_number(s.*row.field);
        out << '\n';
    }
}

void print_sensitivity(const analysis::SensitivityTable& t, std::ostream& out) {
    out << pad("", 20);
    for (auto c : kTargetColumns) out << pad(target_name(c), 14);
    out << '\n';
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
        out << pad(column_name(kFeatureColumns[i]), 20);
        for (std::size_t j = 0; j < kTargetCount; ++j) {
            out << pad(t.cc[i][j] ? format_fixed(*t.cc[i][j], 4) : "undefined", 14);
        }
        out << '\n';
    }
}

void write_sensitivity_csv(const analysis::SensitivityTable& t, std::ostream& out) {
    out << "input";
    for (auto c : kTargetColumns) out << ',' << target_name(c);
    out << '\n';
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
        out << column_name(kFeatureColumns[i]);
        for (std::size_t j = 0; j < kTargetCount; ++j) out << ',' << opt(t.cc[i][j]);
        out << '\n';
    }
}

void write_importance_csv(const analysis::ImportanceReport& r, std::ostream& out) {
    out << "feature,gain,weight,cover,rank_gain,rank_weight,rank_cover,mean_rank\n";
    for (std::size_t f = 0; f < r.features.size(); ++f) {
        out << r.features[f] << ',' << format_number(r.gain[f]) << ','
            << format_number(r.weight[f]) << ',' << format_number(r.cover[f]) << ','
            << r.rank_gain[f] << ',' << r.rank_weight[f] << ',' << r.rank_cover[f] << ','
            << format_number(r.mean_rank[f]) << '\n';
    }
}

void print_importance(const analysis::ImportanceReport& r, std::ostream& out) {
    out << pad("feature", 20) << pad("gain", 12) << pad("weight", 8) << pad("cover", 10)
        << pad("rank_gain", 11) << pad("rank_weight", 13) << pad("rank_cover", 12)
        << pad("mean_rank", 11) << '\n';
    for (std::size_t f = 0; f < r.features.size(); ++f) {
        out << pad(r.features[f], 20) << pad(format_fixed(r.gain[f], 5), 12)
            << pad(format_fixed(r.weight[f], 0), 8) << pad(format_fixed(r.cover[f], 2), 10)
            << pad(std::to_string(r.rank_gain[f]), 11) << pad(std::to_string(r.rank_weight[f]), 13)
            << pad(std::to_string(r.rank_cover[f]), 12) << pad(format_fixed(r.mean_rank[f], 2), 11)
            << '\n';
    }
    if (r.degenerate) out << "(ensemble has no splits; ranking is degenerate)\n";
}

void write_predictions_header(std::ostream& out) {
    out << "mixture_id,experimental,predicted,phase\n";
}

void write_predictions_rows(std::span<const std::string> ids, std::span<const double> experimental,
                            std::span<const double> predicted, std::string_view phase,
                            std::ostream& out) {
    for (std::size_t i = 0; i < ids.size(); ++i) {
        out << ids[i] << ',' << format_number(experimental[i]) << ',' << format_number(predicted[i])
            << ',' << phase << '\n';
    }
}

void write_eval_csv(const metrics::EvalReport& train, const metrics::EvalReport* test,
                    std::ostream& out) {
    out << "phase,n,r2,rmse,mae,mape\n";
    auto row = [&](std::string_view phase, const metrics::EvalReport& r) {
        out << phase << ',' << r.n << ',' << opt(r.r2) << ',' << format_number(r.rmse) << ','
            << format_number(r.mae) << ',' << format_number(r.mape) << '\n';
    };
    row("train", train);
    if (test) row("test", *test);
}

void print_eval(std::string_view title, const metrics::EvalReport& r, std::ostream& out) {
    out << title << ": n=" << r.n << "  R2=" << (r.r2 ? format_fixed(*r.r2, 4) : "undefined")
        << "  RMSE=" << format_fixed(r.rmse, 4) << "  MAE=" << format_fixed(r.mae, 4)
        << "  MAPE=" << format_fixed(r.mape, 4) << '\n';
}

namespace {

struct MetricField {
    std::string_view name;
    double pipeline::MetricRef::*ref;
};

constexpr std::array<MetricField, 4> kMetricFields{{
    {"r2", &pipeline::MetricRef::r2},
    {"rmse", &pipeline::MetricRef::rmse},
    {"mae", &pipeline::MetricRef::mae},
    {"mape", &pipeline::MetricRef::mape},
}};

std::optional<double> measured(const metrics::EvalReport& r, std::string_view name) {
    if (name == "r2") return r.r2;
    if (name == "rmse") return r.rmse;
    if (name == "mae") return r.mae;
    return r.mape;
}

} // namespace

void write_repro_csv(const pipeline::ReproReport& r, std::ostream& out) {
    out << "model,family,target";
    for (std::string_view phase : {"train", "test"}) {
        for (const auto& m : kMetricFields) {
            out << ',' << phase << '_' << m.name << ",ref_" << phase << '_' << m.name << ",abs_dev_"
                << phase << '_' << m.name << ",rel_dev_" << phase << '_' << m.name;
        }
    }
    out << ",band_pass,band_failures\n";
    for (const auto& row : r.rows) {
        out << row.reference.label << ',' << family_name(row.reference.family) << ','
            << target_name(row.reference.target);
        for (std::string_view phase : {"train", "test"}) {
            const auto& got = phase == "train" ? row.train : row.test;
            const auto& ref = phase == "train" ? row.reference.train : row.reference.test;
            for (const auto& m : kMetricFields) {
                const auto value = measured(got, m.name);
                const double expected = ref.*m.ref;
                out << ',' << opt(value) << ',' << format_number(expected) << ',';
                if (value) {
                    const double dev = *value - expected;
                    out << format_number(std::abs(dev)) << ','
                        << format_number(expected != 0.0 ? dev / expected : 0.0);
                } else {
                    out << ',';
                }
            }
        }
        std::string notes;
        for (const auto& f : row.band_failures) notes += (notes.empty() ? "" : "; ") + f;
        out << ',' << (row.band_pass ? "true" : "false") << ',' << notes << '\n';
    }
}

void print_repro(const pipeline::ReproReport& r, std::ostream& out) {
    out << "scaler=" << pipeline::scaler_mode_name(r.options.scaler) << " seed=" << r.options.seed
        << " split=C11,C12,C15,C21,C23 held out\n\n";
    out << pad("model", 10) << pad("target", 13) << pad("train R2", 10) << pad("train RMSE", 12)
        << pad("test R2", 10) << pad("test RMSE", 12) << pad("ref RMSE", 12) << pad("band", 6)
        << '\n';
    for (const auto& row : r.rows) {
        out << pad(row.reference.label, 10) << pad(target_name(row.reference.target), 13)
            << pad(row.train.r2 ? format_fixed(*row.train.r2, 4) : "-", 10)
            << pad(format_fixed(row.train.rmse, 4), 12)
            << pad(row.test.r2 ? format_fixed(*row.test.r2, 4) : "-", 10)
            << pad(format_fixed(row.test.rmse, 4), 12)
            << pad(format_fixed(row.reference.test.rmse, 4), 12)
            << pad(row.band_pass ? "ok" : "FAIL", 6) << '\n';
    }
    const auto& h = r.headline;
    out << "\nGBRT test RMSE below SVR: " << h.gbrt_beats_svr << "/4\n"
        << "cement best mean importance rank: " << h.cement_best_mean_rank << "/4\n"
        << "cement first by gain: " << h.cement_gain_rank_one << "/4\n";
}

void write_params(std::span<const std::pair<std::string, std::string>> params, std::ostream& out) {
    for (const auto& [key, value] : params) out << key << " = " << value << '\n';
}

std::size_t CsvTable::column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw DataError("CSV has no column '" + std::string(name) + "'");
}

CsvTable read_csv_table(std::istream& in) {
    CsvTable t;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        auto fields = split_fields(line, ',');
        if (t.header.empty()) {
            t.header = std::move(fields);
            continue;
        }
        if (fields.size() != t.header.size()) {
            throw DataError("CSV row has " + std::to_string(fields.size()) + " fields, header has " +
                            std::to_string(t.header.size()));
        }
        t.rows.push_back(std::move(fields));
    }
    return t;
}

} // namespace pcboost::report
