#include "pcboost/pipeline.hpp"

#include "pcboost/error.hpp"
#include "pcboost/text.hpp"

#include <algorithm>
#include <cmath>

namespace pcboost::pipeline {

std::string_view scaler_mode_name(ScalerMode m) { return m == ScalerMode::Full ? "full" : "train"; }

ScalerMode parse_scaler_mode(std::string_view name) {
    if (name == "full") return ScalerMode::Full;
    if (name == "train") return ScalerMode::Train;
    throw ConfigError("unknown scaler mode '" + std::string(name) + "' (expected full or train)");
}

std::vector<double> PreparedTask::to_physical(std::span<const double> normalized) const {
    return scaler.inverse_transform(normalized, target);
}

PreparedTask prepare_task(const Dataset& ds, const SplitSpec& spec, Column target,
                          ScalerMode mode) {
    PreparedTask t;
    t.target = target;
    t.split = split(ds, spec);
    if (t.split.train.empty()) throw DataError("training split is empty");
    t.scaler = Scaler::fit(mode == ScalerMode::Full ? ds : t.split.train);
    t.X_train = t.scaler.transform_features(t.split.train);
    t.y_train = t.scaler.transform(t.split.train.column(target), target);
    if (!t.split.test.empty()) {
        t.X_test = t.scaler.transform_features(t.split.test);
        t.y_test = t.scaler.transform(t.split.test.column(target), target);
    } else {
        t.X_test = Matrix(0, kFeatureCount);
    }
    return t;
}

// -- reference --------------------------------------------------------------

const ReferenceModel& ReferenceValues::find(Family family, Column target) const {
    for (const auto& m : models) {
        if (m.family == family && m.target == target) return m;
    }
    throw ConfigError("reference values have no " + std::string(family_name(family)) +
                      " entry for " + std::string(target_name(target)));
}

namespace {

MetricRef read_metrics(const Config& cfg, const std::string& section, std::string_view phase) {
    const std::string p(phase);
    return MetricRef{cfg.number(section, p + "_r2"), cfg.number(section, p + "_rmse"),
                     cfg.number(section, p + "_mae"), cfg.number(section, p + "_mape")};
}

} // namespace

ReferenceValues parse_reference(const Config& cfg) {
    ReferenceValues ref;
    ref.format_version = static_cast<int>(cfg.number("", "format_version"));
    if (ref.format_version != kReferenceFormatVersion) {
        throw ConfigError(cfg.source() + ": reference format_version " +
                          std::to_string(ref.format_version) + " is not supported");
    }

    ref.bands.test_rmse_factor = cfg.number("bands", "test_rmse_factor");
    ref.bands.train_r2_min = cfg.number("bands", "train_r2_min");
    if (const auto targets = cfg.get("bands", "train_r2_targets")) {
        for (const auto& name : split_fields(*targets, ',')) {
            if (!name.empty()) ref.bands.train_r2_targets.push_back(parse_target(name));
        }
    }

    for (auto target : kTargetColumns) {
        for (auto family : {Family::Gbrt, Family::Svr}) {
            const auto tag = std::string(family_name(family)) + "." + std::string(target_name(target));
            const auto* params = cfg.section(tag);
            if (!params) throw ConfigError(cfg.source() + ": missing section [" + tag + "]");
            ReferenceModel m;
            m.family = family;
            m.target = target;
            for (const auto& e : params->entries) {
                if (e.key == "label") m.label = e.value;
                else m.params.emplace_back(e.key, e.value);
            }
            if (m.label.empty()) m.label = tag;
            // Validate early so a typo fails at load time, not mid-run.
            if (family == Family::Gbrt) (void)gbrt_params(m.params);
            else (void)svr_params(m.params);
            m.train = read_metrics(cfg, "table." + tag, "train");
            m.test = read_metrics(cfg, "table." + tag, "test");
            ref.models.push_back(std::move(m));
        }
    }
    return ref;
}

ReferenceValues load_reference(const std::filesystem::path& path) {
    return parse_reference(Config::load(path));
}

// -- reproduction -----------------------------------------------------------

bool ReproReport::all_bands_pass() const {
    return std::all_of(rows.begin(), rows.end(), [](const ModelOutcome& o) { return o.band_pass; });
}

const ModelOutcome& ReproReport::row(Family family, Column target) const {
    for (const auto& o : rows) {
        if (o.reference.family == family && o.reference.target == target) return o;
    }
    throw Error("no reproduction row for " + std::string(family_name(family)) + " " +
                std::string(target_name(target)));
}

namespace {

void check_bands(ModelOutcome& o, const Bands& bands) {
    const double limit = bands.test_rmse_factor * o.reference.test.rmse;
    if (!(o.test.rmse <= limit)) {
        o.band_failures.push_back("test RMSE " + format_fixed(o.test.rmse, 4) + " > " +
                                  format_fixed(limit, 4));
    }
    const bool r2_checked =
        o.reference.family == Family::Gbrt &&
        std::find(bands.train_r2_targets.begin(), bands.train_r2_targets.end(),
                  o.reference.target) != bands.train_r2_targets.end();
    if (r2_checked && !(o.train.r2.value_or(0.0) >= bands.train_r2_min)) {
        o.band_failures.push_back("train R2 " + format_fixed(o.train.r2.value_or(0.0), 4) +
                                  " < " + format_fixed(bands.train_r2_min, 2));
    }
    o.band_pass = o.band_failures.empty();
}

ModelOutcome run_model(const PreparedTask& task, const ReferenceModel& ref, std::uint64_t seed) {
    ModelOutcome o;
    o.reference = ref;
    auto params = ref.params;
    if (ref.family == Family::Gbrt) params = merge(params, {{"seed", std::to_string(seed)}});
    o.model = fit_model(ref.family, params, task.X_train, task.y_train, Dataset::feature_names());

    o.train_ids = task.split.train.ids();
    o.test_ids = task.split.test.ids();
    o.train_true = task.split.train.column(task.target);
    o.test_true = task.split.test.column(task.target);
    o.train_pred = task.to_physical(predict(o.model, task.X_train));
    o.test_pred = task.to_physical(predict(o.model, task.X_test));
    o.train = metrics::evaluate_all(o.train_true, o.train_pred);
    if (!o.test_true.empty()) o.test = metrics::evaluate_all(o.test_true, o.test_pred);
    return o;
}

} // namespace

ReproReport reproduce(const Dataset& ds, const ReferenceValues& ref, const ReproOptions& options) {
    ReproReport report;
    report.options = options;
    report.sensitivity = analysis::sensitivity_table(ds);
    const auto spec = published_split(ds);

    for (std::size_t t = 0; t < kTargetCount; ++t) {
        const auto target = kTargetColumns[t];
        const auto task = prepare_task(ds, spec, target, options.scaler);
        for (auto family : {Family::Gbrt, Family::Svr}) {
            auto outcome = run_model(task, ref.find(family, target), options.seed);
            check_bands(outcome, ref.bands);
            if (family == Family::Gbrt) {
                report.importance[t] =
                    analysis::importance(std::get<gbrt::TreeEnsemble>(outcome.model));
            }
            report.rows.push_back(std::move(outcome));
        }

        const auto& gb = report.row(Family::Gbrt, target);
        const auto& sv = report.row(Family::Svr, target);
        if (gb.test.rmse < sv.test.rmse) ++report.headline.gbrt_beats_svr;

        const auto& imp = report.importance[t];
        const auto cement = index_of(Column::Cement);
        const double best = *std::min_element(imp.mean_rank.begin(), imp.mean_rank.end());
        if (imp.mean_rank[cement] <= best) ++report.headline.cement_best_mean_rank;
        if (imp.rank_gain[cement] == 1) ++report.headline.cement_gain_rank_one;
    }
    return report;
}

} // namespace pcboost::pipeline
