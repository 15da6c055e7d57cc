#include "cli.hpp"

#include "pcboost/analysis.hpp"
#include "pcboost/config.hpp"
#include "pcboost/dataset.hpp"
#include "pcboost/error.hpp"
#include "pcboost/metrics.hpp"
#include "pcboost/model.hpp"
#include "pcboost/pipeline.hpp"
#include "pcboost/report.hpp"
#include "pcboost/text.hpp"
#include "pcboost/tuning.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <thread>

#ifndef PCBOOST_DEFAULT_DATA_DIR
#define PCBOOST_DEFAULT_DATA_DIR "data"
#endif

namespace fs = std::filesystem;

namespace pcboost::cli {

namespace {

struct UsageError : Error {
    using Error::Error;
};

struct Options {
    std::string data;
    std::string target;
    std::string model = "gbrt";
    std::string split = "paper";
    std::string scaler = "full";
    std::uint64_t seed = 42;
    std::string grid;
    std::string params;
    std::string out;
    std::string reference;
    std::string model_file;
    unsigned threads = 0;
    bool strict = false;
};

fs::path default_data_dir() { return fs::path(PCBOOST_DEFAULT_DATA_DIR); }

Dataset load_data(const Options& o) {
    const fs::path path = o.data.empty() ? default_data_dir() / "pervious.csv" : fs::path(o.data);
    return load_csv(path);
}

Column target_of(const Options& o) {
    if (o.target.empty()) throw UsageError("--target is required (density|compressive|tensile|porosity)");
    try {
        return parse_target(o.target);
    } catch (const Error& e) {
        throw UsageError(std::string("--target: ") + e.what());
    }
}

Family family_of_flag(const Options& o) {
    try {
        return parse_family(o.model);
    } catch (const Error& e) {
        throw UsageError(std::string("--model: ") + e.what());
    }
}

pipeline::ScalerMode scaler_of(const Options& o) {
    try {
        return pipeline::parse_scaler_mode(o.scaler);
    } catch (const Error& e) {
        throw UsageError(std::string("--scaler: ") + e.what());
    }
}

std::set<std::string> read_id_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open split file '" + path.string() + "'");
    std::set<std::string> ids;
    std::string line;
    while (std::getline(in, line)) {
        const auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        for (auto& id : split_fields(t, ',')) {
            if (!id.empty()) ids.insert(id);
        }
    }
    return ids;
}

// paper | random:<seed> | ids:<file listing test ids>
SplitSpec split_of(const Options& o, const Dataset& ds) {
    const std::string_view s = o.split;
    if (s == "paper") return published_split(ds);
    if (s.starts_with("random:")) {
        const auto seed = parse_number(s.substr(7));
        if (!seed || *seed < 0 || *seed != static_cast<double>(static_cast<std::uint64_t>(*seed))) {
            throw UsageError("--split: '" + o.split + "' needs a non-negative integer seed");
        }
        return SplitSpec::random(ds, static_cast<std::uint64_t>(*seed));
    }
    if (s.starts_with("ids:") && s.size() > 4) {
        return SplitSpec::holdout(ds, read_id_file(fs::path(s.substr(4))));
    }
    throw UsageError("--split: '" + o.split + "' is not paper, random:<seed> or ids:<file>");
}

pipeline::PreparedTask prepare(const Options& o, const Dataset& ds, Column target) {
    auto task = pipeline::prepare_task(ds, split_of(o, ds), target, scaler_of(o));
    return task;
}

pipeline::ReferenceValues load_reference(const Options& o) {
    const fs::path path = o.reference.empty() ? default_data_dir() / "reference_results.cfg"
                                              : fs::path(o.reference);
    return pipeline::load_reference(path);
}

// Reference parameters for (family, target), overridden by --params and --seed.
ParamSet params_for(const Options& o, Family family, Column target) {
    ParamSet params = load_reference(o).find(family, target).params;
    if (!o.params.empty()) {
        const auto cfg = Config::load(o.params);
        const auto* section = cfg.section(family_name(family));
        if (!section) section = cfg.section("");
        if (section) {
            ParamSet extra;
            for (const auto& e : section->entries) extra.emplace_back(e.key, e.value);
            params = merge(params, extra);
        }
    }
    if (family == Family::Gbrt) params = merge(params, {{"seed", std::to_string(o.seed)}});
    return params;
}

fs::path out_dir(const Options& o, std::string_view fallback) {
    fs::path dir = o.out.empty() ? fs::path(fallback) : fs::path(o.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DataError("cannot create output directory '" + dir.string() + "': " + ec.message());
    return dir;
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot write '" + path.string() + "'");
    body(f);
    if (!f) throw DataError("failed writing '" + path.string() + "'");
}

std::string tag(Family family, Column target) {
    return std::string(family_name(family)) + "_" + std::string(target_name(target));
}

Model model_for(const Options& o, const pipeline::PreparedTask& task, Family family) {
    if (!o.model_file.empty()) return load_model(o.model_file);
    return fit_model(family, params_for(o, family, task.target), task.X_train, task.y_train,
                     Dataset::feature_names());
}

void write_predictions(const fs::path& path, const pipeline::PreparedTask& task, const Model& m) {
    const auto train_pred = task.to_physical(predict(m, task.X_train));
    const auto test_pred = task.to_physical(predict(m, task.X_test));
    const auto train_ids = task.split.train.ids();
    const auto test_ids = task.split.test.ids();
    const auto train_true = task.split.train.column(task.target);
    const auto test_true = task.split.test.column(task.target);
    write_file(path, [&](std::ostream& f) {
        report::write_predictions_header(f);
        report::write_predictions_rows(train_ids, train_true, train_pred, "train", f);
        report::write_predictions_rows(test_ids, test_true, test_pred, "test", f);
    });
}

// -- subcommands ------------------------------------------------------------

int cmd_stats(const Options& o, std::ostream& out) {
    const auto ds = load_data(o);
    const auto stats = describe(ds);
    report::print_stats(stats, out);
    if (!o.out.empty()) {
        write_file(out_dir(o, ".") / "stats.csv", [&](std::ostream& f) { report::write_stats_csv(stats, f); });
    }
    return kOk;
}

int cmd_sensitivity(const Options& o, std::ostream& out) {
    const auto ds = load_data(o);
    const auto table = analysis::sensitivity_table(ds);
    report::write_sensitivity_csv(table, out);
    if (!o.out.empty()) {
        write_file(out_dir(o, ".") / "sensitivity.csv",
                   [&](std::ostream& f) { report::write_sensitivity_csv(table, f); });
    }
    return kOk;
}

int cmd_tune(const Options& o, std::ostream& out) {
    const auto target = target_of(o);
    const auto family = family_of_flag(o);
    const auto ds = load_data(o);
    const auto task = prepare(o, ds, target);

    const auto grid = o.grid.empty() ? tuning::default_grid(family)
                                     : tuning::HyperGrid::from_config(Config::load(o.grid), family);
    tuning::SearchOptions so;
    so.seed = o.seed;
    so.threads = o.threads ? o.threads : std::max(1u, std::thread::hardware_concurrency());
    if (family == Family::Gbrt) so.fixed = {{"seed", std::to_string(o.seed)}};

    std::vector<std::size_t> rows(task.y_train.size());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    const tuning::IndexedSource source(task.X_train, task.y_train, rows);
    const auto result = tuning::grid_search(source, grid, so);

    const auto dir = out_dir(o, "out");
    const auto name = tag(family, target);
    write_file(dir / ("cv_" + name + ".csv"),
               [&](std::ostream& f) { tuning::write_cv_csv(result, grid, f); });
    write_file(dir / ("best_" + name + ".cfg"), [&](std::ostream& f) {
        f << "[" << family_name(family) << "]\n";
        report::write_params(result.best, f);
    });

    const auto& best = result.table[result.best_index];
    out << grid.combination_count() << " combinations, " << result.folds << "-fold CV, seed "
        << result.seed << '\n'
        << "best: " << describe(result.best) << '\n'
        << "mean CV MSE (normalized): " << format_number(best.mean_mse) << '\n';
    return kOk;
}

int cmd_train(const Options& o, std::ostream& out) {
    const auto target = target_of(o);
    const auto family = family_of_flag(o);
    const auto ds = load_data(o);
    const auto task = prepare(o, ds, target);
    const auto params = params_for(o, family, target);
    const auto model = fit_model(family, params, task.X_train, task.y_train, Dataset::feature_names());

    const fs::path path = o.model_file.empty() ? out_dir(o, "out") / (tag(family, target) + ".json")
                                               : fs::path(o.model_file);
    save_model(model, path);

    out << family_name(family) << " " << target_name(target) << ": " << describe(params) << '\n';
    const auto pred = task.to_physical(predict(model, task.X_train));
    report::print_eval("train", metrics::evaluate_all(task.split.train.column(target), pred), out);
    out << "model written to " << path.string() << '\n';
    return kOk;
}

int cmd_evaluate(const Options& o, std::ostream& out) {
    const auto target = target_of(o);
    const auto ds = load_data(o);
    const auto task = prepare(o, ds, target);
    const auto model = model_for(o, task, family_of_flag(o));
    const auto family = family_of(model);

    const auto train_true = task.split.train.column(target);
    const auto test_true = task.split.test.column(target);
    const auto train = metrics::evaluate_all(train_true, task.to_physical(predict(model, task.X_train)));
    std::optional<metrics::EvalReport> test;
    if (!test_true.empty()) {
        test = metrics::evaluate_all(test_true, task.to_physical(predict(model, task.X_test)));
    }

    report::print_eval("train", train, out);
    if (test) report::print_eval("test", *test, out);
    if (task.split.warning) out << "note: " << *task.split.warning << '\n';

    const auto dir = out_dir(o, "out");
    const auto name = tag(family, target);
    write_file(dir / ("eval_" + name + ".csv"),
               [&](std::ostream& f) { report::write_eval_csv(train, test ? &*test : nullptr, f); });
    write_predictions(dir / ("predictions_" + name + ".csv"), task, model);
    return kOk;
}

int cmd_importance(const Options& o, std::ostream& out) {
    const auto target = target_of(o);
    const auto ds = load_data(o);
    const auto task = prepare(o, ds, target);
    const auto model = model_for(o, task, Family::Gbrt);
    const auto* ensemble = std::get_if<gbrt::TreeEnsemble>(&model);
    if (!ensemble) throw ModelError("importance needs a gbrt model");

    const auto rep = analysis::importance(*ensemble);
    report::write_importance_csv(rep, out);
    if (!o.out.empty()) {
        write_file(out_dir(o, ".") / ("importance_" + std::string(target_name(target)) + ".csv"),
                   [&](std::ostream& f) { report::write_importance_csv(rep, f); });
    }
    return kOk;
}

int cmd_reproduce(const Options& o, std::ostream& out) {
    const auto ds = load_data(o);
    const auto ref = load_reference(o);
    if (o.split != "paper") throw UsageError("reproduce always uses the published split");
    pipeline::ReproOptions ro;
    ro.scaler = scaler_of(o);
    ro.seed = o.seed;
    const auto rep = pipeline::reproduce(ds, ref, ro);

    const auto dir = out_dir(o, "out");
    write_file(dir / "repro_report.csv", [&](std::ostream& f) { report::write_repro_csv(rep, f); });
    write_file(dir / "sensitivity.csv",
               [&](std::ostream& f) { report::write_sensitivity_csv(rep.sensitivity, f); });
    fs::create_directories(dir / "models");
    for (const auto& row : rep.rows) {
        const auto name = tag(row.reference.family, row.reference.target);
        write_file(dir / ("predictions_" + name + ".csv"), [&](std::ostream& f) {
            report::write_predictions_header(f);
            report::write_predictions_rows(row.train_ids, row.train_true, row.train_pred, "train", f);
            report::write_predictions_rows(row.test_ids, row.test_true, row.test_pred, "test", f);
        });
        save_model(row.model, dir / "models" / (name + ".json"));
    }
    for (std::size_t t = 0; t < kTargetCount; ++t) {
        write_file(dir / ("importance_" + std::string(target_name(kTargetColumns[t])) + ".csv"),
                   [&](std::ostream& f) { report::write_importance_csv(rep.importance[t], f); });
    }

    report::print_repro(rep, out);
    out << "reports written to " << dir.string() << '\n';

    const bool ok = rep.all_bands_pass() && rep.headline.pass();
    if (o.strict && !ok) {
        out << "strict: acceptance bands not met\n";
        return kStrictFailure;
    }
    return kOk;
}

// -- option wiring ----------------------------------------------------------

void add_data(CLI::App* sub, Options& o) {
    sub->add_option("--data", o.data, "Mixture CSV (default: bundled dataset)");
    sub->add_option("data_file", o.data, "Mixture CSV")->excludes(sub->get_option("--data"));
}

void add_task(CLI::App* sub, Options& o) {
    sub->add_option("--target", o.target, "density|compressive|tensile|porosity");
    sub->add_option("--split", o.split, "paper | random:<seed> | ids:<file>");
    sub->add_option("--scaler", o.scaler, "full | train");
    sub->add_option("--seed", o.seed, "Random seed");
}

void add_model(CLI::App* sub, Options& o) {
    sub->add_option("--model", o.model, "gbrt | svr");
    sub->add_option("--params", o.params, "key = value parameter file");
    sub->add_option("--reference", o.reference, "Reference parameter/result file");
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Gradient boosting and support vector regression for pervious concrete mixtures",
                 "pcboost"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    auto* stats = app.add_subcommand("stats", "Descriptive statistics of every column");
    add_data(stats, o);
    stats->add_option("--out", o.out, "Also write stats.csv here");

    auto* sens = app.add_subcommand("sensitivity", "Pearson correlation of inputs vs outputs");
    add_data(sens, o);
    sens->add_option("--out", o.out, "Also write sensitivity.csv here");

    auto* tune = app.add_subcommand("tune", "Grid search with k-fold CV on the training rows");
    add_data(tune, o);
    add_task(tune, o);
    tune->add_option("--model", o.model, "gbrt | svr");
    tune->add_option("--grid", o.grid, "Grid file (default: built-in grid)");
    tune->add_option("--out", o.out, "Output directory (default: out)");
    tune->add_option("--threads", o.threads, "Worker threads (0: all cores)");

    auto* train = app.add_subcommand("train", "Fit one model and save it");
    add_data(train, o);
    add_task(train, o);
    add_model(train, o);
    train->add_option("--out", o.out, "Output directory (default: out)");
    train->add_option("--model-file", o.model_file, "Model file to write");

    auto* eval = app.add_subcommand("evaluate", "Metrics and prediction CSVs for one model");
    add_data(eval, o);
    add_task(eval, o);
    add_model(eval, o);
    eval->add_option("--model-file", o.model_file, "Saved model (default: fit one)");
    eval->add_option("--out", o.out, "Output directory (default: out)");

    auto* imp = app.add_subcommand("importance", "Gain/weight/cover importance of a GBRT model");
    add_data(imp, o);
    add_task(imp, o);
    imp->add_option("--params", o.params, "key = value parameter file");
    imp->add_option("--reference", o.reference, "Reference parameter/result file");
    imp->add_option("--model-file", o.model_file, "Saved gbrt model (default: fit one)");
    imp->add_option("--out", o.out, "Also write importance_<target>.csv here");

    auto* repro = app.add_subcommand("reproduce", "Fit all eight reference models and report");
    add_data(repro, o);
    repro->add_option("--split", o.split, "Must be paper");
    repro->add_option("--scaler", o.scaler, "full | train");
    repro->add_option("--seed", o.seed, "Random seed for GBRT subsampling");
    repro->add_option("--reference", o.reference, "Reference parameter/result file");
    repro->add_option("--out", o.out, "Output directory (default: out)");
    repro->add_flag("--strict", o.strict, "Exit 3 when a band or headline check fails");

    if (argc > 1 && argv[1][0] != '-') {
        const std::string name = argv[1];
        const auto subs = app.get_subcommands([](const CLI::App*) { return true; });
        const bool known = std::any_of(subs.begin(), subs.end(),
                                       [&](const CLI::App* s) { return s->get_name() == name; });
        if (!known) {
            err << "pcboost: usage error: unknown subcommand '" << name << "'\n";
            return kUsage;
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        std::string msg = e.what();
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        err << "pcboost: usage error: " << msg << '\n';
        return kUsage;
    }

    try {
        const auto* sub = app.get_subcommands().front();
        const auto name = sub->get_name();
        if (name == "stats") return cmd_stats(o, out);
        if (name == "sensitivity") return cmd_sensitivity(o, out);
        if (name == "tune") return cmd_tune(o, out);
        if (name == "train") return cmd_train(o, out);
        if (name == "evaluate") return cmd_evaluate(o, out);
        if (name == "importance") return cmd_importance(o, out);
        return cmd_reproduce(o, out);
    } catch (const UsageError& e) {
        err << "pcboost: usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "pcboost: error: " << e.what() << '\n';
        return kDataOrModel;
    }
}

} // namespace pcboost::cli
