#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "kreg/csv.hpp"
#include "kreg/dataset.hpp"
#include "kreg/rng.hpp"
#include "kreg/synth.hpp"

using namespace kreg;
using testutil::TempDir;
using testutil::two_clusters;

TEST_CASE("dataset validation") {
    CHECK_THROWS_AS(Dataset(std::vector<WeightedPoint>{}), std::invalid_argument);
    CHECK_THROWS_AS(Dataset({{{1.0}, 0.0, 0.0}}), std::invalid_argument);   // w = 0
    CHECK_THROWS_AS(Dataset({{{1.0}, 0.0, -1.0}}), std::invalid_argument);  // w < 0
    CHECK_THROWS_AS(Dataset({{{1.0}, 0.0, 1.0}, {{1.0, 2.0}, 0.0, 1.0}}),
                    std::invalid_argument);  // mixed dims
    double nan = std::nan("");
    CHECK_THROWS_AS(Dataset({{{nan}, 0.0, 1.0}}), std::invalid_argument);
}

TEST_CASE("stats on the two-cluster toy set") {
    auto s = stats(two_clusters(), 1.0);
    CHECK(s.m_range == 100.0);
    CHECK(s.lo == std::vector<double>{1.0});
    CHECK(s.hi == std::vector<double>{17.0});
    CHECK(s.diameter == 16.0);
    CHECK(s.delta == 16.0);
}

TEST_CASE("stats edge cases") {
    Dataset single({{{3.0, 4.0}, 7.0, 1.0}});
    auto s = stats(single, 2.0);
    CHECK(s.m_range == 0.0);
    CHECK(s.diameter == 0.0);
    CHECK(s.delta == 0.0);

    Dataset two({{{0.0}, 1.0, 1.0}, {{10.0}, 2.0, 1.0}});
    CHECK(stats(two, 2.0).delta == 5.0);
}

TEST_CASE("m_range is permutation invariant") {
    std::vector<WeightedPoint> pts;
    Rng rng(7);
    for (int i = 0; i < 64; ++i)
        pts.push_back({{rng.uniform(-5, 5)}, rng.uniform(-100, 100), 1.0});
    double m0 = stats(Dataset(pts), 1.0).m_range;
    std::mt19937 shuffle_rng(99);
    for (int t = 0; t < 10; ++t) {
        std::shuffle(pts.begin(), pts.end(), shuffle_rng);
        CHECK(stats(Dataset(pts), 1.0).m_range == m0);
    }
}

TEST_CASE("synth_ar1 recurrences") {
    // zero noise: constant walk
    Dataset a = synth_ar1(5, 0.0, 1.0, 10.0, 0.0, 3);
    REQUIRE(a.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(a.x(i)[0] == static_cast<double>(i));
        CHECK(a.y(i) == 10.0);
    }
    // phi = 0 collapses to c after the first step
    Dataset b = synth_ar1(3, 1.0, 0.0, 10.0, 0.0, 3);
    CHECK(b.y(0) == 10.0);
    CHECK(b.y(1) == 1.0);
    CHECK(b.y(2) == 1.0);
}

TEST_CASE("synth_ar1 is bit-reproducible") {
    Dataset a = synth_ar1(1000, 0.0, 1.0, 10.0, 1.0, 42);
    Dataset b = synth_ar1(1000, 0.0, 1.0, 10.0, 1.0, 42);
    CHECK(a.ys() == b.ys());
    Dataset c = synth_ar1(1000, 0.0, 1.0, 10.0, 1.0, 43);
    CHECK(a.ys() != c.ys());
}

TEST_CASE("synth_ar1 million-point default configuration", "[slow]") {
    // c=0, phi=1, y0=10, noise=1: first differences are standard normals,
    // so their mean is within 3/sqrt(n) at this seed (CLT).
    const std::size_t n = 1000000;
    Dataset ds = synth_ar1(n, 0.0, 1.0, 10.0, 1.0, 1);
    double mean_diff = (ds.y(n - 1) - ds.y(0)) / static_cast<double>(n - 1);
    CHECK(std::abs(mean_diff) <= 3.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("csv round trip preserves points exactly") {
    TempDir tmp;
    Rng rng(11);
    std::vector<WeightedPoint> pts;
    for (int i = 0; i < 200; ++i)
        pts.push_back({{rng.uniform(-1e6, 1e6), rng.normal()},
                       rng.normal(0, 1e8),
                       rng.uniform(0.1, 9.9)});
    Coreset cs{Dataset(pts), Method::GAggregate, {{"gamma", "2"}}, 0, 12345};
    auto file = tmp.path / "roundtrip.csv";
    save_coreset(cs, file);
    CsvLoad back = load_points(file);
    CHECK(back.skipped_rows == 0);
    REQUIRE(back.data.size() == cs.data.size());
    CHECK(back.data.coords() == cs.data.coords());
    CHECK(back.data.ys() == cs.data.ys());
    CHECK(back.data.ws() == cs.data.ws());
}

TEST_CASE("coreset metadata line appears verbatim") {
    TempDir tmp;
    Coreset cs{Dataset({{{1.0}, 2.0, 1.0}}), Method::GAggregate, {{"gamma", "2"}}, 0, 0};
    auto file = tmp.path / "meta.csv";
    save_coreset(cs, file);
    std::ifstream in(file);
    std::string first;
    std::getline(in, first);
    CHECK(first == "# method=g-aggregate gamma=2");
}

TEST_CASE("load_csv skips missing values and counts them") {
    TempDir tmp;
    auto file = tmp.path / "missing.csv";
    std::ofstream(file) << "t;power;extra\n"
                           "1;5.5;x\n"
                           "2;?;x\n"
                           "3;7.25;x\n";
    ColumnSchema schema;
    schema.x_cols = {0};
    schema.y_col = 1;
    schema.delim = ';';
    schema.missing_token = "?";
    CsvLoad r = load_csv(file, schema);
    CHECK(r.skipped_rows == 1);
    REQUIRE(r.data.size() == 2);
    CHECK(r.data.x(0)[0] == 1.0);
    CHECK(r.data.y(0) == 5.5);
    CHECK(r.data.y(1) == 7.25);
}

TEST_CASE("load_csv rejects nonpositive weights row by row") {
    TempDir tmp;
    auto file = tmp.path / "weights.csv";
    std::ofstream(file) << "x,y,w\n1,2,1\n2,3,0\n3,4,-1\n4,5,2.5\n";
    ColumnSchema schema;
    schema.x_cols = {0};
    schema.y_col = 1;
    schema.w_col = 2;
    CsvLoad r = load_csv(file, schema);
    CHECK(r.skipped_rows == 2);
    REQUIRE(r.data.size() == 2);
    CHECK(r.data.w(0) == 1.0);
    CHECK(r.data.w(1) == 2.5);
}

TEST_CASE("load_csv with 2-d schema keeps both coordinates") {
    TempDir tmp;
    auto file = tmp.path / "lonlat.csv";
    std::ofstream(file) << "lon,lat,timestamp\n"
                           "-93.5,41.6,1000\n"
                           "-93.6,41.7,2000\n";
    ColumnSchema schema;
    schema.x_cols = {0, 1};
    schema.y_col = 2;
    CsvLoad r = load_csv(file, schema);
    REQUIRE(r.data.dim() == 2);
    REQUIRE(r.data.size() == 2);
    CHECK(r.data.x(1)[0] == -93.6);
    CHECK(r.data.x(1)[1] == 41.7);
    CHECK(r.data.y(1) == 2000.0);
}

TEST_CASE("load_csv date+time columns become minutes since first record") {
    TempDir tmp;
    auto file = tmp.path / "household.csv";
    std::ofstream(file) << "Date;Time;Global_active_power\n"
                           "16/12/2006;17:24:00;4.216\n"
                           "16/12/2006;17:25:00;5.360\n"
                           "17/12/2006;17:24:00;?\n"
                           "17/12/2006;17:26:30;3.5\n";
    ColumnSchema schema;
    schema.y_col = 2;
    schema.delim = ';';
    schema.date_time_cols = {{0, 1}};
    CsvLoad r = load_csv(file, schema);
    CHECK(r.skipped_rows == 1);
    REQUIRE(r.data.size() == 3);
    CHECK(r.data.x(0)[0] == 0.0);
    CHECK(r.data.x(1)[0] == 1.0);
    CHECK(r.data.x(2)[0] == 1440.0 + 2.0 + 0.5);  // next day, 17:26:30
}

TEST_CASE("a headerless first row with a missing marker is counted, not eaten") {
    TempDir tmp;
    auto file = tmp.path / "nomissing.csv";
    std::ofstream(file) << "1,?\n2,5\n3,6\n";
    ColumnSchema schema;
    schema.x_cols = {0};
    schema.y_col = 1;
    CsvLoad r = load_csv(file, schema);
    CHECK(r.skipped_rows == 1);
    CHECK(r.data.size() == 2);
}

TEST_CASE("load_csv error paths") {
    TempDir tmp;
    CHECK_THROWS_AS(load_csv(tmp.path / "nope.csv", ColumnSchema{}), CsvError);

    auto file = tmp.path / "allbad.csv";
    std::ofstream(file) << "a,b\n?,?\n?,?\n";
    CHECK_THROWS_AS(load_csv(file, ColumnSchema{}), CsvError);
}

TEST_CASE("dataset hash distinguishes contents") {
    Dataset a({{{1.0}, 2.0, 1.0}});
    Dataset b({{{1.0}, 2.0000000001, 1.0}});
    CHECK(dataset_hash(a) != dataset_hash(b));
    CHECK(dataset_hash(a) == dataset_hash(Dataset({{{1.0}, 2.0, 1.0}})));
}
