#pragma once

// epsilon-insensitive support vector regression.
//
// The dual is solved over 2n variables (alpha_i, alpha*_i) in the standard
// single-equality form
//
//     min 1/2 a'Qa + p'a   s.t.  y'a = 0,  0 <= a_t <= C
//
// with y_t = +1 for alpha and -1 for alpha*, p_t = eps - y_i (alpha) and
// eps + y_i (alpha*), Q_ts = y_t y_s K(x_t, x_s). Each iteration updates the
// maximal violating pair analytically. The fitted function is
//
//     f(x) = sum_i (alpha_i - alpha*_i) K(x_i, x) + b.

#include "pcboost/matrix.hpp"

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pcboost::svr {

enum class KernelType { Linear, Polynomial, Rbf, Sigmoid };

std::string_view kernel_name(KernelType k);
/// Accepts linear, poly/polynomial, rbf, sigmoid. Throws ConfigError otherwise.
KernelType parse_kernel(std::string_view name);

struct Kernel {
    KernelType type = KernelType::Rbf;
    double gamma = 0.1;
    int degree = 3;
    double coef0 = 0.0;

    friend bool operator==(const Kernel&, const Kernel&) = default;
};

/// Throws DataError on dimension mismatch.
double kernel_eval(const Kernel& k, std::span<const double> a, std::span<const double> b);

/// Full n x n kernel matrix of the rows of X.
Matrix gram_matrix(const Kernel& k, const Matrix& X);

struct HyperParams {
    double C = 1.0;
    double epsilon = 0.1;
    Kernel kernel;
    double tol = 1e-3;
    long max_passes = 10000;

    void validate() const;
};

struct SolverInfo {
    long iterations = 0;
    bool converged = true;
    /// Final maximal-violating-pair gap; <= tol on convergence.
    double gap = 0.0;
};

struct SvrModel {
    Kernel kernel;
    double C = 1.0;
    double epsilon = 0.1;
    std::size_t n_features = 0;
    Matrix support_vectors;
    std::vector<double> dual_coefs; // alpha - alpha*, one per support vector
    std::vector<std::size_t> support_indices; // rows of the training matrix
    double bias = 0.0;
    SolverInfo solver;

    [[nodiscard]] double predict_row(std::span<const double> x) const;
    [[nodiscard]] std::size_t support_count() const noexcept { return dual_coefs.size(); }
};

/// Solves the dual. A solver that hits max_passes still returns its best
/// iterate with solver.converged = false.
SvrModel fit(const Matrix& X, std::span<const double> y, const HyperParams& p);

std::vector<double> predict(const SvrModel& m, const Matrix& X);

/// Largest violation of the epsilon-KKT conditions of `m` on its training
/// data, in target units. For residual r_i = y_i - f(x_i) and coefficient
/// c_i, each sample must satisfy
///
///     c_i = 0       ->  |r_i| <= eps
///     0 < c_i < C   ->  r_i = eps        (-C < c_i < 0 -> r_i = -eps)
///     c_i = C       ->  r_i >= eps       (c_i = -C     -> r_i <= -eps)
///
/// The box |c_i| <= C and the equality sum(c_i) = 0 count as conditions too.
/// A converged fit satisfies kkt_violation <= tol.
double kkt_violation(const SvrModel& m, const Matrix& X, std::span<const double> y);

inline constexpr int kFormatVersion = 1;

std::string to_json(const SvrModel& m);
SvrModel from_json(const std::string& text);
void save_model(const SvrModel& m, const std::filesystem::path& path);
SvrModel load_model(const std::filesystem::path& path);

} // namespace pcboost::svr
