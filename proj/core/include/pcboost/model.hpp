#pragma once

// Family-agnostic front end over the two regressors, keyed by string
// parameter sets as they appear in config files and search grids.

#include "pcboost/gbrt.hpp"
#include "pcboost/matrix.hpp"
#include "pcboost/svr.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace pcboost {

enum class Family { Gbrt, Svr };

std::string_view family_name(Family f);
/// "gbrt" or "svr" (also "xgboost" for gbrt). Throws ConfigError.
Family parse_family(std::string_view name);

/// Ordered key/value assignment, e.g. {{"eta", "0.3"}, {"max_depth", "5"}}.
using ParamSet = std::vector<std::pair<std::string, std::string>>;

/// Overlays `params` on `base`. Unknown keys and bad values throw ConfigError.
gbrt::HyperParams gbrt_params(const ParamSet& params, gbrt::HyperParams base = {});
svr::HyperParams svr_params(const ParamSet& params, svr::HyperParams base = {});

ParamSet to_param_set(const gbrt::HyperParams& p);
ParamSet to_param_set(const svr::HyperParams& p);

/// Later entries win on key collisions.
ParamSet merge(const ParamSet& base, const ParamSet& overrides);
std::string describe(const ParamSet& params);

using Model = std::variant<gbrt::TreeEnsemble, svr::SvrModel>;

Family family_of(const Model& m);
Model fit_model(Family family, const ParamSet& params, const Matrix& X, std::span<const double> y,
                std::vector<std::string> feature_names = {});
std::vector<double> predict(const Model& m, const Matrix& X);

std::string to_json(const Model& m);
void save_model(const Model& m, const std::filesystem::path& path);
/// Dispatches on the file's "model" field.
Model load_model(const std::filesystem::path& path);

} // namespace pcboost
