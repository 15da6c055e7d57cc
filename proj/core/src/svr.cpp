#include "pcboost/svr.hpp"

#include "pcboost/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace pcboost::svr {

using nlohmann::ordered_json;

std::string_view kernel_name(KernelType k) {
    switch (k) {
    case KernelType::Linear: return "linear";
    case KernelType::Polynomial: return "poly";
    case KernelType::Rbf: return "rbf";
    case KernelType::Sigmoid: return "sigmoid";
    }
    return "rbf";
}

KernelType parse_kernel(std::string_view name) {
    if (name == "linear") return KernelType::Linear;
    if (name == "poly" || name == "polynomial") return KernelType::Polynomial;
    if (name == "rbf") return KernelType::Rbf;
    if (name == "sigmoid") return KernelType::Sigmoid;
    throw ConfigError("unknown kernel '" + std::string(name) +
                      "' (expected linear, poly, rbf or sigmoid)");
}

double kernel_eval(const Kernel& k, std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw DataError("kernel_eval: dimension mismatch (" + std::to_string(a.size()) + " vs " +
                        std::to_string(b.size()) + ")");
    }
    if (k.type == KernelType::Rbf) {
        double d2 = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) d2 += (a[i] - b[i]) * (a[i] - b[i]);
        return std::exp(-k.gamma * d2);
    }
    double dot = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
    switch (k.type) {
    case KernelType::Linear: return dot;
    case KernelType::Polynomial: return std::pow(k.gamma * dot + k.coef0, k.degree);
    case KernelType::Sigmoid: return std::tanh(k.gamma * dot + k.coef0);
    case KernelType::Rbf: break;
    }
    return 0.0;
}

Matrix gram_matrix(const Kernel& k, const Matrix& X) {
    const std::size_t n = X.rows();
    Matrix K(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            K(i, j) = kernel_eval(k, X.row(i), X.row(j));
            K(j, i) = K(i, j);
        }
    }
    return K;
}

void HyperParams::validate() const {
    auto fail = [](const std::string& what) { throw ConfigError("svr: " + what); };
    if (!(C > 0.0) || !std::isfinite(C)) fail("C must be > 0");
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) fail("epsilon must be >= 0");
    if (!(tol > 0.0)) fail("tol must be > 0");
    if (max_passes < 1) fail("max_passes must be >= 1");
    if (kernel.type == KernelType::Rbf && !(kernel.gamma > 0.0)) fail("gamma must be > 0 for rbf");
    if (!std::isfinite(kernel.gamma)) fail("gamma must be finite");
    if (kernel.type == KernelType::Polynomial && kernel.degree < 1) fail("degree must be >= 1");
}

double SvrModel::predict_row(std::span<const double> x) const {
    double f = bias;
    for (std::size_t s = 0; s < dual_coefs.size(); ++s) {
        f += dual_coefs[s] * kernel_eval(kernel, support_vectors.row(s), x);
    }
    return f;
}

namespace {

constexpr double kTau = 1e-12;

/// Pairwise SMO over the 2n-variable dual.
class Solver {
public:
    Solver(const Matrix& K, std::span<const double> y, const HyperParams& p)
        : K_(K), n_(y.size()), C_(p.C), alpha_(2 * n_, 0.0), grad_(2 * n_), sign_(2 * n_) {
        for (std::size_t i = 0; i < n_; ++i) {
            sign_[i] = 1.0;
            sign_[i + n_] = -1.0;
            grad_[i] = p.epsilon - y[i];
            grad_[i + n_] = p.epsilon + y[i];
        }
    }

    SolverInfo run(double tol, long max_iter) {
        SolverInfo info;
        info.converged = false;
        for (long it = 0; it < max_iter; ++it) {
            std::size_t i = 0;
            std::size_t j = 0;
            info.gap = select_pair(i, j);
            info.iterations = it;
            if (info.gap < tol) {
                info.converged = true;
                return info;
            }
            update(i, j);
        }
        std::size_t i = 0;
        std::size_t j = 0;
        info.gap = select_pair(i, j);
        info.iterations = max_iter;
        info.converged = info.gap < tol;
        return info;
    }

    /// Bias from free variables, or the midpoint of the feasible interval.
    [[nodiscard]] double bias() const {
        double ub = std::numeric_limits<double>::infinity();
        double lb = -std::numeric_limits<double>::infinity();
        double sum_free = 0.0;
        std::size_t n_free = 0;
        for (std::size_t t = 0; t < 2 * n_; ++t) {
            const double yg = sign_[t] * grad_[t];
            if (at_upper(t)) {
                if (sign_[t] < 0) ub = std::min(ub, yg);
                else lb = std::max(lb, yg);
            } else if (at_lower(t)) {
                if (sign_[t] > 0) ub = std::min(ub, yg);
                else lb = std::max(lb, yg);
            } else {
                ++n_free;
                sum_free += yg;
            }
        }
        const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : (ub + lb) / 2.0;
        return -rho;
    }

    [[nodiscard]] double coef(std::size_t i) const { return alpha_[i] - alpha_[i + n_]; }

private:
    [[nodiscard]] bool at_upper(std::size_t t) const { return alpha_[t] >= C_; }
    [[nodiscard]] bool at_lower(std::size_t t) const { return alpha_[t] <= 0.0; }

    [[nodiscard]] double q(std::size_t s, std::size_t t) const {
        return sign_[s] * sign_[t] * K_(s % n_, t % n_);
    }

    /// Maximal violating pair; returns m(alpha) - M(alpha).
    double select_pair(std::size_t& i, std::size_t& j) const {
        double gmax = -std::numeric_limits<double>::infinity();
        double gmin = std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < 2 * n_; ++t) {
            const double v = -sign_[t] * grad_[t];
            const bool up = sign_[t] > 0 ? !at_upper(t) : !at_lower(t);
            const bool low = sign_[t] > 0 ? !at_lower(t) : !at_upper(t);
            if (up && v > gmax) {
                gmax = v;
                i = t;
            }
            if (low && v < gmin) {
                gmin = v;
                j = t;
            }
        }
        if (!std::isfinite(gmax) || !std::isfinite(gmin)) return 0.0;
        return gmax - gmin;
    }

    void update(std::size_t i, std::size_t j) {
        const double qii = q(i, i);
        const double qjj = q(j, j);
        const double qij = q(i, j);
        const double old_i = alpha_[i];
        const double old_j = alpha_[j];
        double& ai = alpha_[i];
        double& aj = alpha_[j];

        if (sign_[i] != sign_[j]) {
            double quad = qii + qjj + 2.0 * qij;
            if (quad <= 0.0) quad = kTau;
            const double delta = (-grad_[i] - grad_[j]) / quad;
            const double diff = ai - aj;
            ai += delta;
            aj += delta;
            if (diff > 0.0) {
                if (aj < 0.0) {
                    aj = 0.0;
                    ai = diff;
                }
            } else if (ai < 0.0) {
                ai = 0.0;
                aj = -diff;
            }
            if (diff > 0.0) {
                if (ai > C_) {
                    ai = C_;
                    aj = C_ - diff;
                }
            } else if (aj > C_) {
                aj = C_;
                ai = C_ + diff;
            }
        } else {
            double quad = qii + qjj - 2.0 * qij;
            if (quad <= 0.0) quad = kTau;
            const double delta = (grad_[i] - grad_[j]) / quad;
            const double sum = ai + aj;
            ai -= delta;
            aj += delta;
            if (sum > C_) {
                if (ai > C_) {
                    ai = C_;
                    aj = sum - C_;
                }
            } else if (aj < 0.0) {
                aj = 0.0;
                ai = sum;
            }
            if (sum > C_) {
                if (aj > C_) {
                    aj = C_;
                    ai = sum - C_;
                }
            } else if (ai < 0.0) {
                ai = 0.0;
                aj = sum;
            }
        }

        const double di = ai - old_i;
        const double dj = aj - old_j;
        for (std::size_t t = 0; t < 2 * n_; ++t) grad_[t] += q(t, i) * di + q(t, j) * dj;
    }

    const Matrix& K_;
    std::size_t n_;
    double C_;
    std::vector<double> alpha_;
    std::vector<double> grad_;
    std::vector<double> sign_;
};

} // namespace

SvrModel fit(const Matrix& X, std::span<const double> y, const HyperParams& p) {
    p.validate();
    if (X.rows() == 0) throw DataError("svr fit: empty training data");
    if (X.rows() != y.size()) {
        throw DataError("svr fit: " + std::to_string(X.rows()) + " rows but " +
                        std::to_string(y.size()) + " targets");
    }

    const Matrix K = gram_matrix(p.kernel, X);
    Solver solver(K, y, p);

    SvrModel m;
    m.kernel = p.kernel;
    m.C = p.C;
    m.epsilon = p.epsilon;
    m.n_features = X.cols();
    m.solver = solver.run(p.tol, p.max_passes);
    m.bias = solver.bias();

    for (std::size_t i = 0; i < X.rows(); ++i) {
        const double c = solver.coef(i);
        if (c != 0.0) {
            m.support_indices.push_back(i);
            m.dual_coefs.push_back(c);
        }
    }
    m.support_vectors = X.select_rows(m.support_indices);
    return m;
}

std::vector<double> predict(const SvrModel& m, const Matrix& X) {
    if (X.cols() != m.n_features) {
        throw DataError("svr predict: model expects " + std::to_string(m.n_features) +
                        " features, got " + std::to_string(X.cols()));
    }
    std::vector<double> out(X.rows());
    for (std::size_t i = 0; i < X.rows(); ++i) out[i] = m.predict_row(X.row(i));
    return out;
}

double kkt_violation(const SvrModel& m, const Matrix& X, std::span<const double> y) {
    if (X.rows() != y.size()) throw DataError("kkt_violation: row/target count mismatch");
    std::vector<double> coef(X.rows(), 0.0);
    double coef_sum = 0.0;
    double worst = 0.0;
    for (std::size_t s = 0; s < m.dual_coefs.size(); ++s) {
        if (m.support_indices[s] >= X.rows()) {
            throw DataError("kkt_violation: support index beyond training data");
        }
        coef[m.support_indices[s]] = m.dual_coefs[s];
        coef_sum += m.dual_coefs[s];
        worst = std::max(worst, std::abs(m.dual_coefs[s]) - m.C);
    }
    worst = std::max(worst, std::abs(coef_sum));

    const double eps = m.epsilon;
    const double at_bound = m.C * (1.0 - 1e-12);
    for (std::size_t i = 0; i < X.rows(); ++i) {
        const double r = y[i] - m.predict_row(X.row(i));
        const double c = coef[i];
        double v = 0.0;
        if (c == 0.0) v = std::abs(r) - eps;
        else if (c >= at_bound) v = eps - r;
        else if (c <= -at_bound) v = r + eps;
        else if (c > 0.0) v = std::abs(r - eps);
        else v = std::abs(r + eps);
        worst = std::max(worst, v);
    }
    return worst;
}

// -- persistence ------------------------------------------------------------

std::string to_json(const SvrModel& m) {
    ordered_json j;
    j["format_version"] = kFormatVersion;
    j["model"] = "svr";
    j["kernel"] = {{"type", kernel_name(m.kernel.type)},
                   {"gamma", m.kernel.gamma},
                   {"degree", m.kernel.degree},
                   {"coef0", m.kernel.coef0}};
    j["C"] = m.C;
    j["epsilon"] = m.epsilon;
    j["n_features"] = m.n_features;
    j["bias"] = m.bias;
    auto svs = ordered_json::array();
    for (std::size_t s = 0; s < m.support_vectors.rows(); ++s) {
        const auto row = m.support_vectors.row(s);
        svs.push_back(std::vector<double>(row.begin(), row.end()));
    }
    j["support_vectors"] = std::move(svs);
    j["dual_coefs"] = m.dual_coefs;
    j["support_indices"] = m.support_indices;
    j["solver"] = {{"iterations", m.solver.iterations},
                   {"converged", m.solver.converged},
                   {"gap", m.solver.gap}};
    return j.dump(1) + "\n";
}

SvrModel from_json(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const ordered_json::parse_error& e) {
        throw ModelError(std::string("corrupt model file: ") + e.what());
    }
    try {
        if (!j.is_object()) throw ModelError("corrupt model file: top level is not an object");
        const int version = j.at("format_version").get<int>();
        if (version != kFormatVersion) {
            throw ModelError("model format_version " + std::to_string(version) +
                             " is not supported (expected " + std::to_string(kFormatVersion) +
                             ")");
        }
        if (j.value("model", std::string("svr")) != "svr") {
            throw ModelError("model file holds a '" + j.at("model").get<std::string>() +
                             "' model, not svr");
        }
        SvrModel m;
        const auto& kj = j.at("kernel");
        m.kernel.type = parse_kernel(kj.at("type").get<std::string>());
        m.kernel.gamma = kj.at("gamma").get<double>();
        m.kernel.degree = kj.value("degree", 3);
        m.kernel.coef0 = kj.value("coef0", 0.0);
        m.C = j.at("C").get<double>();
        m.epsilon = j.at("epsilon").get<double>();
        m.n_features = j.at("n_features").get<std::size_t>();
        m.bias = j.at("bias").get<double>();
        const auto rows = j.at("support_vectors").get<std::vector<std::vector<double>>>();
        m.dual_coefs = j.at("dual_coefs").get<std::vector<double>>();
        if (rows.size() != m.dual_coefs.size()) {
            throw ModelError("support vector count does not match dual coefficient count");
        }
        for (const auto& r : rows) {
            if (r.size() != m.n_features) throw ModelError("support vector has wrong dimension");
        }
        m.support_vectors = rows.empty() ? Matrix(0, m.n_features) : Matrix::from_rows(rows);
        m.support_indices = j.value("support_indices", std::vector<std::size_t>{});
        if (!m.support_indices.empty() && m.support_indices.size() != m.dual_coefs.size()) {
            throw ModelError("support index count does not match dual coefficient count");
        }
        if (j.contains("solver")) {
            const auto& sj = j.at("solver");
            m.solver.iterations = sj.value("iterations", 0L);
            m.solver.converged = sj.value("converged", true);
            m.solver.gap = sj.value("gap", 0.0);
        }
        return m;
    } catch (const ordered_json::exception& e) {
        throw ModelError(std::string("corrupt model file: ") + e.what());
    } catch (const ConfigError& e) {
        throw ModelError(std::string("corrupt model file: ") + e.what());
    }
}

void save_model(const SvrModel& m, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ModelError("cannot write model file '" + path.string() + "'");
    out << to_json(m);
    if (!out) throw ModelError("failed writing model file '" + path.string() + "'");
}

SvrModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ModelError("cannot open model file '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

} // namespace pcboost::svr
