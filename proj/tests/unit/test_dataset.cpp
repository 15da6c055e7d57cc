#include "support/testing.hpp"

#include "pcboost/dataset.hpp"
#include "pcboost/error.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <sstream>

using namespace pcboost;

namespace {

const char* kHeader =
    "id,aggregate_size_mm,cement_kg,w_c,aggregate_kg,density_kgm3,compressive_mpa,tensile_mpa,"
    "porosity_pct\n";

std::string error_of(const std::string& text) {
    std::istringstream in(text);
    try {
        (void)parse_csv(in, "mix.csv");
    } catch (const DataError& e) {
        return e.what();
    }
    return {};
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

} // namespace

TEST_CASE("bundled dataset has 24 mixtures in file order") {
    const auto& ds = testing::bundled();
    REQUIRE(ds.size() == 24);
    CHECK(ds[0].id == "C1");
    CHECK(ds[23].id == "C24");
    CHECK(ds[0][Column::Density] == 1780.31);
    CHECK(ds.find("C11").has_value());
    CHECK_FALSE(ds.find("C99").has_value());
    CHECK(ds.features().rows() == 24);
    CHECK(ds.features().cols() == 4);
}

TEST_CASE("csv parse errors carry location and column") {
    CHECK(contains(error_of(""), "mix.csv: empty file"));
    CHECK(contains(error_of(kHeader), "empty dataset"));
    CHECK(contains(error_of("id,cement_kg\nC1,3\n"), "missing column 'aggregate_size_mm'"));
    CHECK(contains(error_of(std::string(kHeader) + "C1,4.5,abc,0.35,1600,1780,2,0.3,35\n"),
                   "mix.csv:2: column 'cement_kg': cannot parse 'abc' as a number"));
    CHECK(contains(error_of(std::string(kHeader) + "C1,4.5,200,0.35,1600,1780,2,0.3\n"),
                   "expected 9 cells, got 8"));
    CHECK(contains(error_of(std::string(kHeader) + "C1,4.5,200,0.35,1600,1780,2,0.3,35\n"
                                                   "C1,4.5,200,0.35,1600,1780,2,0.3,35\n"),
                   "duplicate id 'C1'"));
    CHECK(contains(error_of(std::string(kHeader) + "C1,4.5,-200,0.35,1600,1780,2,0.3,35\n"),
                   "'cement_kg' must be strictly positive"));
    CHECK(contains(error_of(std::string(kHeader) + "C1,4.5,200,0.35,1600,1780,2,0.3,100\n"),
                   "'porosity_pct' must be below 100"));
    CHECK(contains(error_of(std::string(kHeader) + "C1,4.5,200,1.2,1600,1780,2,0.3,30\n"),
                   "'w_c' must be below 1"));
    CHECK_THROWS_AS(load_csv("/definitely/not/here.csv"), DataError);
}

TEST_CASE("column order in the header does not matter") {
    std::istringstream in(
        "porosity_pct,id,tensile_mpa,compressive_mpa,density_kgm3,aggregate_kg,w_c,cement_kg,"
        "aggregate_size_mm\n35,C1,0.36,2.21,1780.31,1600,0.35,200,4.5\n");
    const auto ds = parse_csv(in);
    CHECK(ds[0][Column::AggregateSize] == 4.5);
    CHECK(ds[0][Column::Porosity] == 35.0);
}

TEST_CASE("write_csv then parse_csv is the identity") {
    std::ostringstream out;
    write_csv(testing::bundled(), out);
    std::istringstream in(out.str());
    CHECK(parse_csv(in) == testing::bundled());
}

TEST_CASE("quantile interpolates at p*(n-1)") {
    const std::vector<double> v{4, 1, 3, 2};
    CHECK(quantile(v, 0.0) == 1.0);
    CHECK(quantile(v, 1.0) == 4.0);
    CHECK(quantile(v, 0.5) == doctest::Approx(2.5));
    CHECK(quantile(v, 0.25) == doctest::Approx(1.75));
    const std::vector<double> one{7};
    CHECK(quantile(one, 0.75) == 7.0);
    CHECK_THROWS_AS((void)quantile(std::vector<double>{}, 0.5), DataError);
}

TEST_CASE("describe_column uses the sample standard deviation") {
    const std::vector<double> v{2, 4, 4, 4, 5, 5, 7, 9};
    const auto s = describe_column(v);
    CHECK(s.count == 8);
    CHECK(s.mean == doctest::Approx(5.0));
    CHECK(s.std == doctest::Approx(std::sqrt(32.0 / 7.0)));
    CHECK(s.min == 2.0);
    CHECK(s.max == 9.0);
    CHECK_FALSE(s.constant);

    const auto c = describe_column(std::vector<double>{3, 3, 3});
    CHECK(c.std == 0.0);
    CHECK(c.constant);
}

TEST_CASE("describe agrees with a direct computation on every column") {
    const auto& ds = testing::bundled();
    const auto stats = describe(ds);
    for (std::size_t c = 0; c < kColumnCount; ++c) {
        auto v = ds.column(static_cast<Column>(c));
        const double mean = std::accumulate(v.begin(), v.end(), 0.0) / 24.0;
        double ss = 0;
        for (double x : v) ss += (x - mean) * (x - mean);
        std::sort(v.begin(), v.end());
        CHECK(stats[c].count == 24);
        CHECK(stats[c].mean == doctest::Approx(mean).epsilon(1e-12));
        CHECK(stats[c].std == doctest::Approx(std::sqrt(ss / 23.0)).epsilon(1e-12));
        CHECK(stats[c].min == v.front());
        CHECK(stats[c].max == v.back());
        // 23 * 0.5 = 11.5: midway between the 12th and 13th sorted values.
        CHECK(stats[c].q50 == doctest::Approx((v[11] + v[12]) / 2));
        CHECK(stats[c].q25 == doctest::Approx(v[5] + 0.75 * (v[6] - v[5])));
        CHECK(stats[c].q75 == doctest::Approx(v[17] + 0.25 * (v[18] - v[17])));
    }
}

TEST_CASE("scaler maps fitted range onto [0,1] and inverts") {
    const auto& ds = testing::bundled();
    const auto s = Scaler::fit(ds);
    CHECK(s.transform(1500.0, Column::Aggregate) == 0.0);
    CHECK(s.transform(1800.0, Column::Aggregate) == 1.0);
    CHECK(s.transform(1650.0, Column::Aggregate) == doctest::Approx(0.5));
    CHECK(s.inverse_transform(0.5, Column::Cement) == doctest::Approx(200.0));
    // No clamping outside the fitted range.
    CHECK(s.transform(2100.0, Column::Aggregate) == doctest::Approx(2.0));

    testing::Gen gen(3);
    for (int i = 0; i < 500; ++i) {
        const double v = gen.uniform(1.0, 80.0);
        CHECK(s.inverse_transform(s.transform(v, Column::Porosity), Column::Porosity) ==
              doctest::Approx(v).epsilon(1e-12));
    }

    const auto X = s.transform_features(ds);
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
        double lo = 1, hi = 0;
        for (std::size_t i = 0; i < X.rows(); ++i) {
            lo = std::min(lo, X(i, j));
            hi = std::max(hi, X(i, j));
        }
        CHECK(lo == 0.0);
        CHECK(hi == 1.0);
    }
}

TEST_CASE("scaler: constant column maps to 0 and back to its value; unfitted throws") {
    std::vector<MixtureRecord> recs;
    for (int i = 0; i < 3; ++i) {
        MixtureRecord r;
        r.id = "M" + std::to_string(i);
        r.values = {10, 200, 0.35, 1600, 1700.0 + i, 2, 0.5, 35};
        recs.push_back(r);
    }
    const Dataset ds(recs);
    const std::array<Column, 2> cols{Column::Cement, Column::Density};
    const auto s = Scaler::fit(ds, cols);
    CHECK(s.range(Column::Cement).constant());
    CHECK(s.transform(200.0, Column::Cement) == 0.0);
    CHECK(s.inverse_transform(0.7, Column::Cement) == 200.0);
    CHECK(s.transform(1701.0, Column::Density) == doctest::Approx(0.5));
    CHECK_FALSE(s.fitted(Column::Porosity));
    CHECK_THROWS_AS((void)s.transform(1.0, Column::Porosity), DataError);
}

TEST_CASE("published split holds out five mixtures") {
    const auto& ds = testing::bundled();
    const auto r = split(ds, published_split(ds));
    CHECK(r.train.size() == 19);
    CHECK(r.test.size() == 5);
    CHECK(r.test.ids() == std::vector<std::string>{"C11", "C12", "C15", "C21", "C23"});
    CHECK_FALSE(r.warning);
    for (std::size_t k = 0; k < r.test_rows.size(); ++k) {
        CHECK(ds[r.test_rows[k]].id == r.test.ids()[k]);
    }
}

TEST_CASE("split validation") {
    const auto& ds = testing::bundled();
    SplitSpec bad = published_split(ds);
    bad.test_ids.insert("C99");
    CHECK_THROWS_AS(split(ds, bad), DataError);

    SplitSpec overlap = published_split(ds);
    overlap.train_ids.insert("C11");
    CHECK_THROWS_AS(split(ds, overlap), DataError);

    SplitSpec partial;
    partial.train_ids = {"C1"};
    partial.test_ids = {"C2"};
    CHECK_THROWS_AS(split(ds, partial), DataError);

    const auto everything = split(ds, SplitSpec::holdout(ds, {}));
    CHECK(everything.test.empty());
    CHECK(everything.warning.has_value());
}

TEST_CASE("random split: 80/20, disjoint, covering, seeded") {
    const auto& ds = testing::bundled();
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto spec = SplitSpec::random(ds, seed);
        CHECK(spec.test_ids.size() == 5);
        CHECK(spec.train_ids.size() == 19);
        for (const auto& id : spec.test_ids) CHECK_FALSE(spec.train_ids.contains(id));
        CHECK(SplitSpec::random(ds, seed).test_ids == spec.test_ids);
    }
    CHECK(SplitSpec::random(ds, 1).test_ids != SplitSpec::random(ds, 2).test_ids);
}

TEST_CASE("target names round-trip") {
    for (auto t : kTargetColumns) CHECK(parse_target(target_name(t)) == t);
    CHECK_THROWS_AS((void)parse_target("strength"), ConfigError);
}
