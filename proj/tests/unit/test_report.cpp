#include "support/testing.hpp"

#include "pcboost/error.hpp"
#include "pcboost/report.hpp"
#include "pcboost/text.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace pcboost;
using namespace pcboost::report;

namespace {

CsvTable table_of(const std::string& text) {
    std::istringstream in(text);
    return read_csv_table(in);
}

double num(const std::string& s) {
    const auto v = parse_number(s);
    REQUIRE(v.has_value());
    return *v;
}

const pipeline::ReproReport& repro() {
    static const auto r = pipeline::reproduce(
        testing::bundled(), pipeline::load_reference(testing::data_dir() / "reference_results.cfg"));
    return r;
}

} // namespace

TEST_CASE("stats csv parses back to describe() exactly") {
    const auto stats = describe(testing::bundled());
    std::ostringstream out;
    write_stats_csv(stats, out);
    const auto t = table_of(out.str());
    REQUIRE(t.header.size() == kColumnCount + 1);
    CHECK(t.header[0] == "statistic");
    CHECK(t.header[1] == column_name(Column::AggregateSize));
    REQUIRE(t.rows.size() == 8);
    CHECK(t.rows[0][0] == "count");
    CHECK(t.rows[7][0] == "max");
    for (std::size_t c = 0; c < kColumnCount; ++c) {
        CHECK(num(t.rows[0][c + 1]) == static_cast<double>(stats[c].count));
        CHECK(num(t.rows[1][c + 1]) == stats[c].mean);
        CHECK(num(t.rows[2][c + 1]) == stats[c].std);
        CHECK(num(t.rows[5][c + 1]) == stats[c].q50);
        CHECK(num(t.rows[7][c + 1]) == stats[c].max);
    }
    std::ostringstream pretty;
    print_stats(stats, pretty);
    CHECK(pretty.str().find("count") != std::string::npos);
}

TEST_CASE("sensitivity csv has one row per input") {
    const auto s = analysis::sensitivity_table(testing::bundled());
    std::ostringstream out;
    write_sensitivity_csv(s, out);
    const auto t = table_of(out.str());
    CHECK(t.header == std::vector<std::string>{"input", "density", "compressive", "tensile", "porosity"});
    REQUIRE(t.rows.size() == kFeatureCount);
    CHECK(num(t.rows[1][t.column("porosity")]) == *s.at(Column::Cement, Column::Porosity));
}

TEST_CASE("importance csv round trip") {
    const auto& imp = repro().importance[1];
    std::ostringstream out;
    write_importance_csv(imp, out);
    const auto t = table_of(out.str());
    REQUIRE(t.rows.size() == kFeatureCount);
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
        CHECK(t.rows[f][0] == imp.features[f]);
        CHECK(num(t.rows[f][t.column("gain")]) == imp.gain[f]);
        CHECK(num(t.rows[f][t.column("rank_cover")]) == imp.rank_cover[f]);
        CHECK(num(t.rows[f][t.column("mean_rank")]) == imp.mean_rank[f]);
    }
}

TEST_CASE("predictions and eval csv") {
    const std::vector<std::string> ids{"C1", "C2"};
    const std::vector<double> truth{1.5, 2.0}, pred{1.25, 2.5};
    std::ostringstream out;
    write_predictions_header(out);
    write_predictions_rows(ids, truth, pred, "test", out);
    const auto t = table_of(out.str());
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[1] == std::vector<std::string>{"C2", "2", "2.5", "test"});

    const auto train = metrics::evaluate_all(truth, pred);
    const std::vector<double> flat{3, 3};
    const auto test = metrics::evaluate_all(truth, flat);
    std::ostringstream e;
    write_eval_csv(train, &test, e);
    const auto et = table_of(e.str());
    REQUIRE(et.rows.size() == 2);
    CHECK(et.rows[0][0] == "train");
    CHECK(num(et.rows[0][et.column("rmse")]) == train.rmse);
    CHECK(et.rows[1][et.column("r2")].empty());
}

TEST_CASE("repro csv: eight rows with deviations that recompute") {
    const auto& r = repro();
    std::ostringstream out;
    write_repro_csv(r, out);
    const auto t = table_of(out.str());
    REQUIRE(t.rows.size() == 8);
    CHECK(t.header.size() == 3 + 2 * 4 * 4 + 2);
    for (std::size_t i = 0; i < 8; ++i) {
        const auto& row = t.rows[i];
        const auto& o = r.rows[i];
        CHECK(row[0] == o.reference.label);
        CHECK(num(row[t.column("test_rmse")]) == o.test.rmse);
        CHECK(num(row[t.column("ref_test_rmse")]) == o.reference.test.rmse);
        CHECK(num(row[t.column("abs_dev_test_rmse")]) == std::abs(o.test.rmse - o.reference.test.rmse));
        CHECK(row[t.column("band_pass")] == (o.band_pass ? "true" : "false"));
    }
    std::ostringstream pretty;
    print_repro(r, pretty);
    CHECK(pretty.str().find("GBRT test RMSE below SVR") != std::string::npos);
}

TEST_CASE("csv reader rejects ragged rows and unknown columns") {
    CHECK_THROWS_AS(table_of("a,b\n1,2,3\n"), DataError);
    const auto t = table_of("a,b\n\n1,2\n");
    CHECK(t.rows.size() == 1);
    CHECK_THROWS_AS((void)t.column("c"), DataError);
}

TEST_CASE("params are written one per line") {
    std::ostringstream out;
    const std::vector<std::pair<std::string, std::string>> p{{"eta", "0.3"}, {"max_depth", "5"}};
    write_params(p, out);
    CHECK(out.str() == "eta = 0.3\nmax_depth = 5\n");
}
