#include <doctest.h>

#include "lira/harness.hpp"
#include "lira/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

using namespace lira;
using stats::Aggregate;

namespace {

std::vector<double> iota_vals(int n) {
    std::vector<double> v(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<size_t>(i)] = static_cast<double>(i + 1);
    return v;
}

std::vector<std::vector<double>> parse_csv_numbers(const std::string& path,
                                                   size_t expect_cols) {
    std::ifstream in(path);
    REQUIRE(static_cast<bool>(in));
    std::string line;
    REQUIRE(static_cast<bool>(std::getline(in, line)));  // header
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            REQUIRE(!cell.empty());
            char* end = nullptr;
            row.push_back(std::strtod(cell.c_str(), &end));
            REQUIRE(end == cell.c_str() + cell.size());
        }
        REQUIRE(row.size() == expect_cols);
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

TEST_SUITE("stats") {

TEST_CASE("interquartile mean drops a quarter from each tail") {
    // 30 values 1..30: floor(30/4)=7 dropped per side, mean of 8..23 = 15.5.
    CHECK(stats::iqm(iota_vals(30)) == doctest::Approx(15.5).epsilon(1e-15));

    // Order must not matter.
    std::vector<double> shuffled = iota_vals(30);
    std::mt19937_64 g(7);
    std::shuffle(shuffled.begin(), shuffled.end(), g);
    CHECK(stats::iqm(shuffled) == doctest::Approx(15.5).epsilon(1e-15));

    // Constant samples map to the constant, zeros to zero.
    CHECK(stats::iqm(std::vector<double>(30, 3.25)) == 3.25);
    CHECK(stats::iqm(std::vector<double>(30, 0.0)) == 0.0);

    // Small-sample behaviour: nothing dropped below n=4.
    CHECK(stats::iqm({42.0}) == 42.0);
    CHECK(stats::iqm({1.0, 3.0}) == doctest::Approx(2.0));
    CHECK(stats::iqm({5.0, 1.0, 9.0, 3.0}) == doctest::Approx(4.0));  // keeps {3,5}
    CHECK(stats::iqm({1.0, 2.0, 3.0, 4.0}) == doctest::Approx(2.5));

    // Outliers beyond the quartile cut are ignored entirely.
    std::vector<double> spiked = iota_vals(30);
    spiked[0] = -1e9;
    spiked[29] = 1e9;
    CHECK(stats::iqm(spiked) == doctest::Approx(15.5).epsilon(1e-12));

    CHECK_THROWS_AS(static_cast<void>(stats::iqm({})), std::invalid_argument);
}

TEST_CASE("linear-interpolation quantiles on sorted data") {
    const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
    CHECK(stats::quantile_sorted(v, 0.0) == 1.0);
    CHECK(stats::quantile_sorted(v, 1.0) == 4.0);
    CHECK(stats::quantile_sorted(v, 0.5) == doctest::Approx(2.5));
    CHECK(stats::quantile_sorted(v, 0.25) == doctest::Approx(1.75));
    CHECK(stats::quantile_sorted(v, 0.75) == doctest::Approx(3.25));

    const std::vector<double> w{2.0, 4.0, 6.0, 8.0, 10.0};
    CHECK(stats::quantile_sorted(w, 0.25) == doctest::Approx(4.0));  // h lands on index 1
    CHECK(stats::quantile_sorted(w, 0.1) == doctest::Approx(2.8));   // h=0.4 interpolates

    CHECK(stats::quantile_sorted({7.5}, 0.0) == 7.5);
    CHECK(stats::quantile_sorted({7.5}, 0.9) == 7.5);

    CHECK_THROWS_AS(static_cast<void>(stats::quantile_sorted({}, 0.5)),
                    std::invalid_argument);
}

TEST_CASE("model aggregation trims extremes then outliers") {
    SUBCASE("identical values collapse to zero-width interval") {
        const Aggregate a = stats::aggregate_models({10.0, 10.0, 10.0, 10.0, 10.0});
        CHECK(a.kept == 3);
        CHECK(a.mean == doctest::Approx(10.0));
        CHECK(a.ci_half == doctest::Approx(0.0));
    }
    SUBCASE("single best and worst are removed before anything else") {
        const Aggregate a = stats::aggregate_models({0.0, 10.0, 10.0, 10.0, 100.0});
        CHECK(a.kept == 3);
        CHECK(a.mean == doctest::Approx(10.0));
        CHECK(a.ci_half == doctest::Approx(0.0));
    }
    SUBCASE("a lone spike is consumed by the best-trim") {
        const Aggregate a =
            stats::aggregate_models({10.0, 10.0, 10.0, 10.0, 50.0, 10.0});
        CHECK(a.kept == 4);
        CHECK(a.mean == doctest::Approx(10.0));
        CHECK(a.ci_half == doctest::Approx(0.0));
    }
    SUBCASE("interquartile fence drops survivors the trim missed") {
        // After trimming 100 and 0: {10 x7, 50}; IQR=0 so the fence is [10,10].
        const Aggregate a = stats::aggregate_models(
            {0.0, 10.0, 10.0, 10.0, 10.0, 10.0, 10.0, 10.0, 50.0, 100.0});
        CHECK(a.kept == 7);
        CHECK(a.mean == doctest::Approx(10.0));
        CHECK(a.ci_half == doctest::Approx(0.0));
    }
    SUBCASE("hand-computed t-interval") {
        // Trim 4 and 0 -> {1,2,3}: mean 2, sd 1, ci = t(.975, df=2)/sqrt(3).
        const Aggregate a = stats::aggregate_models({4.0, 1.0, 0.0, 2.0, 3.0});
        CHECK(a.kept == 3);
        CHECK(a.mean == doctest::Approx(2.0));
        CHECK(a.ci_half ==
              doctest::Approx(4.302652729911275 / std::sqrt(3.0)).epsilon(1e-9));
    }
    SUBCASE("minimum input size keeps two values") {
        // Trim 4 and 1 -> {2,3}: sd = sqrt(0.5), ci = t(.975, df=1) * 0.5.
        const Aggregate a = stats::aggregate_models({1.0, 2.0, 3.0, 4.0});
        CHECK(a.kept == 2);
        CHECK(a.mean == doctest::Approx(2.5));
        CHECK(a.ci_half ==
              doctest::Approx(12.706204736432095 * 0.5).epsilon(1e-9));
    }
    SUBCASE("fewer than four values is an error") {
        CHECK_THROWS_AS(static_cast<void>(stats::aggregate_models({1.0, 2.0, 3.0})),
                        std::invalid_argument);
        CHECK_THROWS_AS(static_cast<void>(stats::aggregate_models({})),
                        std::invalid_argument);
    }
}

TEST_CASE("combined robustness metric") {
    // Perfect method: matches the global best nominally and never degrades.
    CHECK(stats::combined_metric({5.0, 5.0, 5.0}, 5.0, 5.0) == doctest::Approx(0.0));

    // Best nominal score but degrading under noise: 0 + (0) + (3-5) + (1-5).
    CHECK(stats::combined_metric({5.0, 3.0, 1.0}, 5.0, 5.0) == doctest::Approx(-6.0));

    // Worse nominal and degrading: (4-5) + (0) + (1-4) + (0-4).
    CHECK(stats::combined_metric({4.0, 1.0, 0.0}, 5.0, 4.0) == doctest::Approx(-8.0));

    // Nominal-only input still pays the gap to the global best.
    CHECK(stats::combined_metric({7.0}, 9.0, 7.0) == doctest::Approx(-2.0));

    // A dominated method must score strictly lower.
    const double weak = stats::combined_metric({4.0, 1.0, 0.0}, 5.0, 4.0);
    const double strong = stats::combined_metric({5.0, 4.0, 3.0}, 5.0, 5.0);
    CHECK(weak < strong);
    CHECK(strong == doctest::Approx(-3.0));

    CHECK_THROWS_AS(static_cast<void>(stats::combined_metric({}, 0.0, 0.0)),
                    std::invalid_argument);
}

TEST_CASE("seventeen-digit formatting reproduces doubles bitwise") {
    const std::vector<double> vals{
        0.1,
        1.0 / 3.0,
        3.141592653589793,
        -2.2250738585072014e-308,
        1.7976931348623157e308,
        5e-324,
        -0.0,
        123456789.123456789,
        1e-9,
    };
    char buf[64];
    for (double v : vals) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        char* end = nullptr;
        const double back = std::strtod(buf, &end);
        CAPTURE(buf);
        CHECK(back == v);
    }
}

TEST_CASE("training logs parse back into the exact diagnostic series") {
    config::ExperimentConfig cfg;
    cfg.env = "point_mass_push";
    cfg.mode = learn::Mode::Proposal;
    cfg.episodes = 3;
    cfg.seed = 11;
    cfg.t_max = 16;
    cfg.batch_size = 8;
    cfg.buffer_capacity = 256;
    cfg.hidden = {8, 8};
    cfg.flow_layers = 1;
    cfg.flow_bins = 4;
    cfg.cond_hidden = {8};
    cfg.adv_feature_hidden = {8};
    cfg.adv_head_hidden = {6};
    cfg.adv_flow_layers = 1;
    cfg.adv_flow_bins = 4;
    cfg.planner.candidates = 8;
    cfg.planner.iterations = 2;
    cfg.planner.horizon = 3;
    cfg.checkpoint_interval = 0;

    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "lira_csv_roundtrip";
    fs::remove_all(dir);
    const harness::TrainResult res = harness::run_training(cfg, dir.string());
    REQUIRE(res.returns.size() == 3);
    REQUIRE(res.gaps.size() == 3);
    REQUIRE(res.lambdas.size() == 3);

    const auto log = parse_csv_numbers((dir / "run_log.csv").string(), 9);
    const auto score = parse_csv_numbers((dir / "score.csv").string(), 2);
    const auto gap = parse_csv_numbers((dir / "gap.csv").string(), 2);
    const auto lam = parse_csv_numbers((dir / "lambda.csv").string(), 2);
    REQUIRE(log.size() == 3);
    REQUIRE(score.size() == 3);
    REQUIRE(gap.size() == 3);
    REQUIRE(lam.size() == 3);

    for (size_t i = 0; i < 3; ++i) {
        CHECK(log[i][0] == static_cast<double>(i));
        // Bitwise equality: the writer must not lose precision.
        CHECK(log[i][1] == res.returns[i]);
        CHECK(log[i][4] == res.gaps[i]);
        CHECK(log[i][5] == res.lambdas[i]);
        CHECK(score[i][1] == res.returns[i]);
        CHECK(gap[i][1] == res.gaps[i]);
        CHECK(lam[i][1] == res.lambdas[i]);
        CHECK(log[i][8] >= 0.0);  // wall time column parses and is sane
    }

    // The provenance config must itself parse and reproduce key settings.
    const config::ExperimentConfig back =
        config::ExperimentConfig::load((dir / "config.ini").string());
    CHECK(back.env == cfg.env);
    CHECK(back.mode == cfg.mode);
    CHECK(back.episodes == cfg.episodes);
    CHECK(back.seed == cfg.seed);
    CHECK(back.batch_size == cfg.batch_size);
    CHECK(back.planner.candidates == cfg.planner.candidates);
    fs::remove_all(dir);
}

}  // TEST_SUITE
