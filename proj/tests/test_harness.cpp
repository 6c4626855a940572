#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gtecon/harness.hpp"
#include "gtecon/report.hpp"

using namespace gtecon;

namespace {

ScenarioConfig base_config() {
    ScenarioConfig cfg;
    cfg.locations = {"Hamburg"};
    cfg.algorithms = {2, 3};
    cfg.n = 1000;
    cfg.n_sim = 25;
    cfg.seed = 20240901;
    return cfg;
}

std::vector<PrevalencePoint> points(std::vector<double> ps,
                                    const std::string& loc = "Hamburg") {
    std::vector<PrevalencePoint> out;
    int day = 1;
    for (double p : ps) {
        char date[16];
        std::snprintf(date, sizeof(date), "2021-01-%02d", day++);
        out.push_back({loc, date, p});
    }
    return out;
}

std::vector<EmpiricalIncomeDistribution> synth_incomes(
    const std::string& loc = "Hamburg") {
    return {synthesize_incomes(loc, 20000, std::log(100.0), 0.5, 77)};
}

}  // namespace

TEST_CASE("p = 0 with h = 1: no randomness survives") {
    auto cfg = base_config();
    cfg.algorithms = {2};
    cfg.cost.h = 1.0;
    auto results = run_scenario(cfg, points({0.0}), synth_incomes());
    REQUIRE(results.size() == 1);
    const auto& res = results[0];
    const double pools =
        std::ceil(static_cast<double>(cfg.n) / res.plan.pool_sizes[0]);
    const double expect = cfg.cost.c_f + pools * cfg.cost.c_v;
    for (double c : res.replication_costs) {
        CHECK(c == doctest::Approx(expect).epsilon(1e-12));
    }
    CHECK(res.range_per_individual == doctest::Approx(0.0));
    CHECK(res.mean_economic_loss == 0.0);
}

TEST_CASE("bookkeeping: one point, two algorithms, 25 replications each") {
    auto cfg = base_config();
    auto results = run_scenario(cfg, points({0.01}), synth_incomes());
    REQUIRE(results.size() == 2);
    for (const auto& res : results) {
        CHECK(res.replication_costs.size() == 25);
        // aggregates must match the retained per-replication costs
        double mean = std::accumulate(res.replication_costs.begin(),
                                      res.replication_costs.end(), 0.0) /
                      res.replication_costs.size();
        auto [lo, hi] = std::minmax_element(res.replication_costs.begin(),
                                            res.replication_costs.end());
        CHECK(res.mean_eci == doctest::Approx(mean / cfg.n).epsilon(1e-12));
        CHECK(res.min_eci == doctest::Approx(*lo / cfg.n).epsilon(1e-12));
        CHECK(res.max_eci == doctest::Approx(*hi / cfg.n).epsilon(1e-12));
        CHECK(res.range_per_individual ==
              doctest::Approx((*hi - *lo) / cfg.n).epsilon(1e-12));
        CHECK(res.min_eci <= res.mean_eci);
        CHECK(res.mean_eci <= res.max_eci);
    }
    CHECK(results[0].k == 2);
    CHECK(results[1].k == 3);
}

TEST_CASE("mean simulated tests tracks the closed form at the optimized plan") {
    auto cfg = base_config();
    cfg.algorithms = {2};
    auto results = run_scenario(cfg, points({0.01}), synth_incomes());
    REQUIRE(results.size() == 1);
    double closed =
        expected_tests(results[0].plan, Prevalence(0.01), cfg.n);
    CHECK(std::abs(results[0].mean_total_tests - closed) / closed < 0.05);
}

TEST_CASE("determinism across runs and thread counts") {
    auto cfg = base_config();
    cfg.algorithms = {2, 3, 4};
    auto pts = points({0.0, 0.004, 0.02});
    auto incomes = synth_incomes();

    auto a = run_scenario(cfg, pts, incomes);
    auto b = run_scenario(cfg, pts, incomes);
    CHECK(results_to_csv(a) == results_to_csv(b));

    cfg.threads = 4;
    auto c = run_scenario(cfg, pts, incomes);
    CHECK(results_to_csv(a) == results_to_csv(c));

    cfg.threads = 0;  // hardware concurrency
    auto d = run_scenario(cfg, pts, incomes);
    CHECK(results_to_csv(a) == results_to_csv(d));
}

TEST_CASE("missing inputs are reported") {
    auto cfg = base_config();
    CHECK_THROWS_AS(run_scenario(cfg, points({0.01}, "Bremen"), synth_incomes()),
                    DataError);
    CHECK_THROWS_AS(run_scenario(cfg, points({0.01}), synth_incomes("Bremen")),
                    DataError);
    CHECK_THROWS_AS(run_scenario(cfg, {}, synth_incomes()), DataError);
}

TEST_CASE("optimal_choice") {
    auto mk = [](const std::string& date, int k, double eci) {
        ScenarioResult r;
        r.location = "X";
        r.date = date;
        r.k = k;
        r.mean_eci = eci;
        return r;
    };
    SUBCASE("argmin by mean ECI") {
        auto choices = optimal_choice({mk("d", 2, 90.0), mk("d", 3, 80.0)});
        REQUIRE(choices.size() == 1);
        CHECK(choices[0].k == 3);
        CHECK(choices[0].mean_eci == doctest::Approx(80.0));
    }
    SUBCASE("ties go to the smaller k") {
        auto choices = optimal_choice({mk("d", 3, 85.0), mk("d", 2, 85.0)});
        REQUIRE(choices.size() == 1);
        CHECK(choices[0].k == 2);
    }
}

TEST_CASE("sweep mechanics") {
    auto cfg = base_config();
    cfg.algorithms = {2};
    cfg.n_sim = 5;
    auto pts = points({0.01});
    auto incomes = synth_incomes();

    SUBCASE("baseline value is inserted when missing") {
        auto swept = sweep(cfg, SweepParameter::h, {0.0, 0.9, 1.0}, pts, incomes);
        REQUIRE(swept.size() == 4);  // h = 0.5 baseline joins in order
        CHECK(swept[1].value == doctest::Approx(0.5));
    }
    SUBCASE("h = 1 zeroes the economic loss") {
        auto swept = sweep(cfg, SweepParameter::h, {1.0}, pts, incomes);
        for (const auto& res : swept.back().results) {
            CHECK(res.mean_economic_loss == 0.0);
        }
    }
    SUBCASE("tau0 = 0 outsources every test") {
        auto swept = sweep(cfg, SweepParameter::tau0, {0.0}, pts, incomes);
        const auto& res = swept.front().results[0];
        // with no internal capacity: cost = c_f + c_l * tests + loss
        double mean_cost = std::accumulate(res.replication_costs.begin(),
                                           res.replication_costs.end(), 0.0) /
                           res.replication_costs.size();
        CHECK(mean_cost == doctest::Approx(cfg.cost.c_f +
                                           cfg.cost.c_l * res.mean_total_tests +
                                           res.mean_economic_loss)
                               .epsilon(1e-10));
    }
    SUBCASE("unknown parameter name") {
        CHECK_THROWS_AS(parse_sweep_parameter("c_q"), ValidationError);
    }
    SUBCASE("empty value list") {
        CHECK_THROWS_AS(sweep(cfg, SweepParameter::h, {}, pts, incomes),
                        ValidationError);
    }
    SUBCASE("c_v sweep over the full grid gives nine result sets") {
        auto swept = sweep(cfg, SweepParameter::c_v,
                           {0, 50, 100, 150, 300, 400, 800, 1000, 2000}, pts,
                           incomes);
        CHECK(swept.size() == 9);
    }
}

TEST_CASE("directional sensitivity of the mean ECI") {
    auto cfg = base_config();
    cfg.algorithms = {2, 3};
    cfg.n_sim = 10;
    auto pts = points({0.005, 0.02});
    auto incomes = synth_incomes();
    auto base = run_scenario(cfg, pts, incomes);

    auto compare = [&](const ScenarioConfig& varied, int sign) {
        auto other = run_scenario(varied, pts, incomes);
        REQUIRE(other.size() == base.size());
        for (std::size_t i = 0; i < base.size(); ++i) {
            if (sign > 0) {
                CHECK(other[i].mean_eci >= base[i].mean_eci - 1e-9);
            } else {
                CHECK(other[i].mean_eci <= base[i].mean_eci + 1e-9);
            }
        }
    };

    ScenarioConfig up = cfg;
    up.cost.c_v += 100.0;
    compare(up, +1);
    up = cfg;
    up.cost.h = 0.9;
    compare(up, -1);
    up = cfg;
    up.cost.tau0 = 2000;
    compare(up, -1);
}

TEST_CASE("common random numbers share draws across algorithms") {
    auto cfg = base_config();
    cfg.common_random_numbers = true;
    cfg.algorithms = {1, 2};
    cfg.cost.h = 1.0;  // only test counts matter
    auto results = run_scenario(cfg, points({0.01}), synth_incomes());
    REQUIRE(results.size() == 2);
    // k = 1 tests everyone regardless of draws
    CHECK(results[0].mean_total_tests == doctest::Approx(1000.0));
}

TEST_CASE("invalid configs are rejected") {
    auto cfg = base_config();
    cfg.algorithms = {7};
    CHECK_THROWS_AS(run_scenario(cfg, points({0.01}), synth_incomes()),
                    ValidationError);
    cfg = base_config();
    cfg.n_sim = 0;
    CHECK_THROWS_AS(run_scenario(cfg, points({0.01}), synth_incomes()),
                    ValidationError);
    cfg = base_config();
    cfg.locations = {};
    CHECK_THROWS_AS(run_scenario(cfg, points({0.01}), synth_incomes()),
                    ValidationError);
}
