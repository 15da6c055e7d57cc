#pragma once

#include <cstddef>
#include <optional>
#include <span>

namespace pcboost::metrics {

/// Denominator floor for MAPE.
inline constexpr double kMapeGuard = 1e-12;

/// Squared Pearson correlation between y and y_hat (not 1 - SSres/SStot).
/// Throws DataError when either vector is constant or n < 2.
double r_squared(std::span<const double> y, std::span<const double> y_hat);
double rmse(std::span<const double> y, std::span<const double> y_hat);
double mse(std::span<const double> y, std::span<const double> y_hat);
double mae(std::span<const double> y, std::span<const double> y_hat);
/// Mean of |y - y_hat| / max(guard, |y|), as a fraction.
double mape(std::span<const double> y, std::span<const double> y_hat);

struct EvalReport {
    std::optional<double> r2; // empty when the correlation is undefined
    double rmse = 0.0;
    double mae = 0.0;
    double mape = 0.0;
    std::size_t n = 0;
};

/// All four measures in the caller's (physical) units.
EvalReport evaluate_all(std::span<const double> y, std::span<const double> y_hat);

} // namespace pcboost::metrics
