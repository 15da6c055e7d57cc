#include "pcboost/model.hpp"

#include "pcboost/error.hpp"
#include "pcboost/text.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>
#include <type_traits>

namespace pcboost {

std::string_view family_name(Family f) { return f == Family::Gbrt ? "gbrt" : "svr"; }

Family parse_family(std::string_view name) {
    if (name == "gbrt" || name == "xgboost") return Family::Gbrt;
    if (name == "svr") return Family::Svr;
    throw ConfigError("unknown model family '" + std::string(name) + "' (expected gbrt or svr)");
}

namespace {

double as_number(const std::string& key, const std::string& value) {
    const auto v = parse_number(value);
    if (!v || !std::isfinite(*v)) {
        throw ConfigError("parameter '" + key + "': '" + value + "' is not a finite number");
    }
    return *v;
}

long as_integer(const std::string& key, const std::string& value) {
    const double v = as_number(key, value);
    if (v != std::floor(v)) {
        throw ConfigError("parameter '" + key + "': '" + value + "' is not an integer");
    }
    return static_cast<long>(v);
}

} // namespace

gbrt::HyperParams gbrt_params(const ParamSet& params, gbrt::HyperParams p) {
    for (const auto& [key, value] : params) {
        if (key == "n_estimators") p.n_estimators = static_cast<int>(as_integer(key, value));
        else if (key == "max_depth") p.max_depth = static_cast<int>(as_integer(key, value));
        else if (key == "eta" || key == "learning_rate") p.eta = as_number(key, value);
        else if (key == "gamma") p.gamma = as_number(key, value);
        else if (key == "reg_lambda") p.reg_lambda = as_number(key, value);
        else if (key == "reg_alpha") p.reg_alpha = as_number(key, value);
        else if (key == "subsample") p.subsample = as_number(key, value);
        else if (key == "colsample_bytree") p.colsample_bytree = as_number(key, value);
        else if (key == "base_score") p.base_score = as_number(key, value);
        else if (key == "seed") p.seed = static_cast<std::uint64_t>(as_integer(key, value));
        else throw ConfigError("unknown gbrt parameter '" + key + "'");
    }
    p.validate();
    return p;
}

svr::HyperParams svr_params(const ParamSet& params, svr::HyperParams p) {
    for (const auto& [key, value] : params) {
        if (key == "C") p.C = as_number(key, value);
        else if (key == "epsilon") p.epsilon = as_number(key, value);
        else if (key == "kernel") p.kernel.type = svr::parse_kernel(value);
        else if (key == "gamma") p.kernel.gamma = as_number(key, value);
        else if (key == "degree") p.kernel.degree = static_cast<int>(as_integer(key, value));
        else if (key == "coef0") p.kernel.coef0 = as_number(key, value);
        else if (key == "tol") p.tol = as_number(key, value);
        else if (key == "max_passes") p.max_passes = as_integer(key, value);
        // Seeds are shared across families on the command line; the solver is deterministic.
        else if (key == "seed") continue;
        else throw ConfigError("unknown svr parameter '" + key + "'");
    }
    p.validate();
    return p;
}

ParamSet to_param_set(const gbrt::HyperParams& p) {
    return {{"n_estimators", std::to_string(p.n_estimators)},
            {"max_depth", std::to_string(p.max_depth)},
            {"eta", format_number(p.eta)},
            {"gamma", format_number(p.gamma)},
            {"reg_lambda", format_number(p.reg_lambda)},
            {"reg_alpha", format_number(p.reg_alpha)},
            {"subsample", format_number(p.subsample)},
            {"colsample_bytree", format_number(p.colsample_bytree)},
            {"base_score", format_number(p.base_score)},
            {"seed", std::to_string(p.seed)}};
}

ParamSet to_param_set(const svr::HyperParams& p) {
    return {{"C", format_number(p.C)},
            {"epsilon", format_number(p.epsilon)},
            {"kernel", std::string(svr::kernel_name(p.kernel.type))},
            {"gamma", format_number(p.kernel.gamma)},
            {"degree", std::to_string(p.kernel.degree)},
            {"coef0", format_number(p.kernel.coef0)},
            {"tol", format_number(p.tol)},
            {"max_passes", std::to_string(p.max_passes)}};
}

ParamSet merge(const ParamSet& base, const ParamSet& overrides) {
    ParamSet out = base;
    for (const auto& [key, value] : overrides) {
        bool replaced = false;
        for (auto& entry : out) {
            if (entry.first == key) {
                entry.second = value;
                replaced = true;
            }
        }
        if (!replaced) out.emplace_back(key, value);
    }
    return out;
}

std::string describe(const ParamSet& params) {
    std::string out;
    for (const auto& [key, value] : params) {
        if (!out.empty()) out += ' ';
        out += key + "=" + value;
    }
    return out;
}

Family family_of(const Model& m) {
    return std::holds_alternative<gbrt::TreeEnsemble>(m) ? Family::Gbrt : Family::Svr;
}

Model fit_model(Family family, const ParamSet& params, const Matrix& X, std::span<const double> y,
                std::vector<std::string> feature_names) {
    if (family == Family::Gbrt) return gbrt::fit(X, y, gbrt_params(params), std::move(feature_names));
    return svr::fit(X, y, svr_params(params));
}

std::vector<double> predict(const Model& m, const Matrix& X) {
    return std::visit(
        [&](const auto& model) {
            using T = std::decay_t<decltype(model)>;
            if constexpr (std::is_same_v<T, gbrt::TreeEnsemble>) return gbrt::predict(model, X);
            else return svr::predict(model, X);
        },
        m);
}

std::string to_json(const Model& m) {
    return std::visit(
        [](const auto& model) {
            using T = std::decay_t<decltype(model)>;
            if constexpr (std::is_same_v<T, gbrt::TreeEnsemble>) return gbrt::to_json(model);
            else return svr::to_json(model);
        },
        m);
}

void save_model(const Model& m, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ModelError("cannot write model file '" + path.string() + "'");
    out << to_json(m);
    if (!out) throw ModelError("failed writing model file '" + path.string() + "'");
}

Model load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ModelError("cannot open model file '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    const auto text = ss.str();
    std::string kind;
    try {
        const auto j = nlohmann::json::parse(text);
        kind = j.at("model").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw ModelError("corrupt model file '" + path.string() + "': " + e.what());
    }
    if (kind == "gbrt") return gbrt::from_json(text);
    if (kind == "svr") return svr::from_json(text);
    throw ModelError("model file '" + path.string() + "' has unknown model kind '" + kind + "'");
}

} // namespace pcboost
