#include "support/testing.hpp"

#include "pcboost/error.hpp"
#include "pcboost/gbrt.hpp"
#include "pcboost/metrics.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace pcboost;
using namespace pcboost::gbrt;

namespace {

Matrix stump_X() { return Matrix::from_rows({{0.0}, {1.0}}); }
const std::vector<double> kStumpY{0.0, 1.0};

HyperParams plain(double eta = 1.0) {
    HyperParams p;
    p.n_estimators = 1;
    p.max_depth = 6;
    p.eta = eta;
    p.reg_lambda = 0.0;
    p.reg_alpha = 0.0;
    p.gamma = 0.0;
    return p;
}

double training_mse(const TreeEnsemble& m, const Matrix& X, std::span<const double> y,
                    std::size_t trees) {
    double s = 0;
    for (std::size_t i = 0; i < X.rows(); ++i) {
        double f = m.base_score;
        for (std::size_t t = 0; t < trees; ++t) f += m.trees[t].predict(X.row(i));
        s += (f - y[i]) * (f - y[i]);
    }
    return s / static_cast<double>(X.rows());
}

} // namespace

TEST_CASE("gradients of squared error") {
    const std::vector<double> y{0, 1}, f{0.5, 0.5};
    const auto g = grad_hess(y, f);
    CHECK(g[0].g == 0.5);
    CHECK(g[1].g == -0.5);
    CHECK(g[0].h == 1.0);
    const auto z = grad_hess(y, y);
    CHECK(z[0].g == 0.0);
    CHECK(z[1].g == 0.0);
    const std::vector<double> y2{2}, f2{0};
    CHECK(grad_hess(y2, f2)[0].g == -2.0);
    CHECK_THROWS_AS(grad_hess(y, y2), DataError);
}

TEST_CASE("leaf weight closed form") {
    HyperParams p;
    p.reg_lambda = 0;
    p.reg_alpha = 0;
    CHECK(leaf_weight({0.5, 1.0, 1}, p) == -0.5);
    p.reg_alpha = 0.2;
    CHECK(leaf_weight({0.5, 1.0, 1}, p) == doctest::Approx(-0.3));
    CHECK(leaf_weight({-0.1, 1.0, 1}, p) == 0.0);
    CHECK(soft_threshold(-1.0, 0.25) == -0.75);
    p.reg_alpha = 0;
    p.reg_lambda = 1;
    CHECK(leaf_weight({3.0, 2.0, 2}, p) == -1.0);
}

TEST_CASE("split gain closed form") {
    HyperParams p;
    p.reg_lambda = 0;
    p.reg_alpha = 0;
    p.gamma = 0;
    const GradStats L{0.5, 1, 1}, R{-0.5, 1, 1};
    CHECK(split_gain(L, R, p) == 0.25);
    p.gamma = 0.25;
    CHECK(split_gain(L, R, p) == 0.0);
    p.gamma = 0.1;
    const GradStats A{0.3, 1, 1};
    CHECK(split_gain(A, A, p) == doctest::Approx(-0.1));
}

TEST_CASE("stump: eta 1 fits the two points exactly") {
    const auto m = fit(stump_X(), kStumpY, plain(1.0));
    REQUIRE(m.trees.size() == 1);
    const auto& t = m.trees[0];
    REQUIRE(t.nodes.size() == 3);
    CHECK(t.nodes[0].feature == 0);
    CHECK(t.nodes[0].threshold == 0.5);
    CHECK(t.nodes[0].gain == 0.25);
    CHECK(t.nodes[0].cover == 2.0);
    CHECK(t.nodes[t.nodes[0].left].weight == -0.5);
    CHECK(t.nodes[t.nodes[0].right].weight == 0.5);
    const auto pred = predict(m, stump_X());
    CHECK(pred[0] == 0.0);
    CHECK(pred[1] == 1.0);
    const std::vector<double> x0{0.0};
    CHECK(m.predict_row(x0) == 0.0);
}

TEST_CASE("stump: eta 0.5 halves the step") {
    const auto pred = predict(fit(stump_X(), kStumpY, plain(0.5)), stump_X());
    CHECK(pred[0] == 0.25);
    CHECK(pred[1] == 0.75);
}

TEST_CASE("stump: gamma 0.3 suppresses the split") {
    auto p = plain(1.0);
    p.gamma = 0.3;
    const auto m = fit(stump_X(), kStumpY, p);
    REQUIRE(m.trees[0].nodes.size() == 1);
    CHECK(m.trees[0].nodes[0].is_leaf());
    CHECK(m.trees[0].nodes[0].weight == 0.0);
    const auto pred = predict(m, stump_X());
    CHECK(pred[0] == 0.5);
    CHECK(pred[1] == 0.5);
}

TEST_CASE("depth 0 leaf equals base score plus mean residual") {
    testing::Gen gen(5);
    for (int trial = 0; trial < 50; ++trial) {
        const auto n = static_cast<std::size_t>(gen.integer(1, 20));
        const auto X = gen.matrix(n, 3, 0, 1);
        const auto y = gen.vec(n, -2, 3);
        auto p = plain(1.0);
        p.max_depth = 0;
        p.base_score = gen.uniform(-1, 1);
        const auto m = fit(X, y, p);
        CHECK(m.trees[0].nodes.size() == 1);
        double mean = 0;
        for (double v : y) mean += v;
        mean /= static_cast<double>(n);
        for (double f : predict(m, X)) CHECK(f == doctest::Approx(mean).epsilon(1e-12));
    }
}

TEST_CASE("empty ensemble predicts base score") {
    HyperParams p;
    p.n_estimators = 0;
    p.base_score = 0.3;
    const auto m = fit(stump_X(), kStumpY, p);
    CHECK(m.trees.empty());
    for (double f : predict(m, stump_X())) CHECK(f == 0.3);
}

TEST_CASE("property: depth bound and training loss never increases") {
    testing::Gen gen(17);
    for (int trial = 0; trial < 60; ++trial) {
        const auto n = static_cast<std::size_t>(gen.integer(2, 30));
        const auto d = static_cast<std::size_t>(gen.integer(1, 4));
        const auto X = gen.coin() ? gen.matrix(n, d, 0, 1) : gen.lattice(n, d, 3);
        const auto y = gen.vec(n, 0, 1);
        HyperParams p;
        p.n_estimators = gen.integer(1, 15);
        p.max_depth = gen.integer(0, 5);
        p.eta = gen.uniform(0.05, 1.0);
        p.reg_lambda = gen.uniform(0, 2);
        p.reg_alpha = gen.coin() ? 0.0 : gen.uniform(0, 0.5);
        p.gamma = gen.coin() ? 0.0 : gen.uniform(0, 0.05);
        const auto m = fit(X, y, p);
        double prev = training_mse(m, X, y, 0);
        for (std::size_t t = 0; t < m.trees.size(); ++t) {
            CHECK(m.trees[t].depth() <= p.max_depth);
            const double cur = training_mse(m, X, y, t + 1);
            CHECK(cur <= prev + 1e-12);
            prev = cur;
        }
    }
}

TEST_CASE("property: a zero-weight tree is an additive identity") {
    testing::Gen gen(23);
    const auto X = gen.matrix(12, 3, 0, 1);
    const auto y = gen.vec(12, 0, 1);
    HyperParams p;
    p.n_estimators = 5;
    p.max_depth = 3;
    auto m = fit(X, y, p);
    const auto before = predict(m, X);
    Tree zero;
    zero.nodes = {TreeNode{0, 0.5, 1, 2, 1.0, 12, 0}, TreeNode{-1, 0, -1, -1, 0, 6, 0.0},
                  TreeNode{-1, 0, -1, -1, 0, 6, 0.0}};
    m.trees.push_back(zero);
    CHECK(predict(m, X) == before);
}

TEST_CASE("tie-break prefers the lower feature index") {
    const auto X = Matrix::from_rows({{0, 0}, {1, 1}, {2, 2}, {3, 3}});
    const std::vector<double> y{0, 0, 1, 1};
    auto p = plain(1.0);
    p.max_depth = 1;
    const auto m = fit(X, y, p);
    CHECK(m.trees[0].nodes[0].feature == 0);
    CHECK(m.trees[0].nodes[0].threshold == 1.5);
}

TEST_CASE("row and column subsampling sizes use the ceiling") {
    testing::Gen gen(31);
    const auto X = gen.matrix(19, 4, 0, 1);
    const auto y = gen.vec(19, 0, 1);
    HyperParams p;
    p.n_estimators = 40;
    p.max_depth = 5;
    p.subsample = 0.7;
    p.colsample_bytree = 0.5;
    const auto m = fit(X, y, p);
    std::set<std::size_t> used_anywhere;
    for (const auto& t : m.trees) {
        CHECK(t.nodes[0].cover == 14.0); // ceil(0.7 * 19)
        std::set<int> used;
        for (const auto& nd : t.nodes)
            if (!nd.is_leaf()) used.insert(nd.feature);
        CHECK(used.size() <= 2); // ceil(0.5 * 4)
        for (int f : used) used_anywhere.insert(static_cast<std::size_t>(f));
    }
    CHECK(used_anywhere.size() == 4);
}

TEST_CASE("determinism under a fixed seed; seed changes subsampled fits") {
    testing::Gen gen(41);
    const auto X = gen.matrix(19, 4, 0, 1);
    const auto y = gen.vec(19, 0, 1);
    HyperParams p;
    p.n_estimators = 30;
    p.subsample = 0.7;
    p.colsample_bytree = 0.7;
    const auto a = fit(X, y, p);
    const auto b = fit(X, y, p);
    CHECK(to_json(a) == to_json(b));
    p.seed = 43;
    CHECK(to_json(fit(X, y, p)) != to_json(a));
}

TEST_CASE("json round trip preserves predictions") {
    testing::Gen gen(51);
    const auto X = gen.matrix(19, 4, 0, 1);
    const auto y = gen.vec(19, 0, 1);
    HyperParams p;
    p.n_estimators = 25;
    p.reg_alpha = 0.11;
    p.subsample = 0.7;
    const auto m = fit(X, y, p, {"a", "b", "c", "d"});
    const auto back = from_json(to_json(m));
    CHECK(back == m);
    CHECK(back.feature_names == std::vector<std::string>{"a", "b", "c", "d"});
    const auto probe = gen.matrix(200, 4, -0.5, 1.5);
    const auto p1 = predict(m, probe);
    const auto p2 = predict(back, probe);
    for (std::size_t i = 0; i < p1.size(); ++i) CHECK(std::abs(p1[i] - p2[i]) <= 1e-12);

    HyperParams none;
    none.n_estimators = 0;
    none.base_score = 0.125;
    const auto empty = from_json(to_json(fit(X, y, none)));
    CHECK(empty.trees.empty());
    CHECK(empty.base_score == 0.125);

    const auto dir = testing::scratch("gbrt_json");
    save_model(m, dir / "m.json");
    CHECK(load_model(dir / "m.json") == m);
}

TEST_CASE("corrupt and mismatched model files are rejected") {
    testing::Gen gen(52);
    const auto X = gen.matrix(8, 2, 0, 1);
    const auto y = gen.vec(8, 0, 1);
    HyperParams p;
    p.n_estimators = 3;
    const auto text = to_json(fit(X, y, p));
    CHECK_THROWS_AS(from_json(text.substr(0, text.size() / 2)), ModelError);
    CHECK_THROWS_AS(from_json("{}"), ModelError);
    auto bumped = text;
    const auto pos = bumped.find("\"format_version\": 1");
    REQUIRE(pos != std::string::npos);
    bumped.replace(pos, 19, "\"format_version\": 9");
    CHECK_THROWS_AS(from_json(bumped), ModelError);
    CHECK_THROWS_AS(load_model("/no/such/model.json"), ModelError);
}

TEST_CASE("hyperparameter validation and arity checks") {
    const auto X = stump_X();
    auto bad = [&](auto mutate) {
        HyperParams p;
        mutate(p);
        CHECK_THROWS_AS(fit(X, kStumpY, p), ConfigError);
    };
    bad([](HyperParams& p) { p.eta = 0.0; });
    bad([](HyperParams& p) { p.eta = 1.5; });
    bad([](HyperParams& p) { p.subsample = 0.0; });
    bad([](HyperParams& p) { p.colsample_bytree = 1.1; });
    bad([](HyperParams& p) { p.reg_lambda = -1; });
    bad([](HyperParams& p) { p.gamma = -0.1; });
    bad([](HyperParams& p) { p.n_estimators = -1; });
    bad([](HyperParams& p) { p.max_depth = -1; });

    const auto m = fit(X, kStumpY, plain());
    CHECK_THROWS_AS(predict(m, Matrix(2, 3)), DataError);
    CHECK_THROWS_AS(fit(Matrix(0, 1), std::vector<double>{}, plain()), DataError);
    CHECK_THROWS_AS(fit(X, std::vector<double>{1.0}, plain()), DataError);
    std::vector<GradPair> g{{0.1, 1}};
    CHECK_THROWS_AS(build_tree(X, g, std::vector<std::size_t>{}, std::vector<std::size_t>{0}, plain()),
                    DataError);
}
