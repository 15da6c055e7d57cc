#include "pcboost/metrics.hpp"

#include "pcboost/analysis.hpp"
#include "pcboost/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pcboost::metrics {

namespace {

void check_pair(std::span<const double> y, std::span<const double> y_hat, const char* what) {
    if (y.size() != y_hat.size()) {
        throw DataError(std::string(what) + ": length mismatch (" + std::to_string(y.size()) +
                        " vs " + std::to_string(y_hat.size()) + ")");
    }
    if (y.empty()) throw DataError(std::string(what) + ": empty input");
}

} // namespace

double r_squared(std::span<const double> y, std::span<const double> y_hat) {
    const double r = analysis::pearson(y, y_hat);
    return r * r;
}

double mse(std::span<const double> y, std::span<const double> y_hat) {
    check_pair(y, y_hat, "mse");
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += (y[i] - y_hat[i]) * (y[i] - y_hat[i]);
    return s / static_cast<double>(y.size());
}

double rmse(std::span<const double> y, std::span<const double> y_hat) {
    check_pair(y, y_hat, "rmse");
    return std::sqrt(mse(y, y_hat));
}

double mae(std::span<const double> y, std::span<const double> y_hat) {
    check_pair(y, y_hat, "mae");
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += std::abs(y[i] - y_hat[i]);
    return s / static_cast<double>(y.size());
}

double mape(std::span<const double> y, std::span<const double> y_hat) {
    check_pair(y, y_hat, "mape");
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        s += std::abs(y[i] - y_hat[i]) / std::max(kMapeGuard, std::abs(y[i]));
    }
    return s / static_cast<double>(y.size());
}

EvalReport evaluate_all(std::span<const double> y, std::span<const double> y_hat) {
    EvalReport r;
    r.n = y.size();
    r.rmse = rmse(y, y_hat);
    r.mae = mae(y, y_hat);
    r.mape = mape(y, y_hat);
    try {
        r.r2 = r_squared(y, y_hat);
    } catch (const DataError&) {
        r.r2.reset();
    }
    return r;
}

} // namespace pcboost::metrics
