#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gtecon/optimize.hpp"

using namespace gtecon;

namespace {

OptimizationRequest req(int k, double p, int s_max = 256, bool strict = true) {
    OptimizationRequest r;
    r.stages = k;
    r.prevalence = p;
    r.n = 100000;
    r.s_max = s_max;
    r.strict_nesting = strict;
    return r;
}

}  // namespace

TEST_CASE("exhaustive search anchors") {
    SUBCASE("k=2, p=0.01 gives s1 = 11") {
        auto res = exhaustive_search(req(2, 0.01));
        CHECK(res.plan.pool_sizes == std::vector<int>{11});
        CHECK(res.per_capita_tests == doctest::Approx(0.1956).epsilon(1e-3));
        CHECK(!res.individual_testing_dominates);
    }
    SUBCASE("k=2, p=0.01 with s_max=16 still finds 11") {
        auto res = exhaustive_search(req(2, 0.01, 16));
        CHECK(res.plan.pool_sizes == std::vector<int>{11});
    }
    SUBCASE("k=2, p=0.5: pooling never beats individual testing") {
        // per-capita at s1=2 is 1/2 + 1 - 0.25 = 1.25 > 1, larger pools are
        // worse still
        auto res = exhaustive_search(req(2, 0.5));
        CHECK(res.per_capita_tests > 1.0);
        CHECK(res.individual_testing_dominates);
    }
    SUBCASE("p=0 degenerates to max pool size with lexicographic tie-break") {
        auto res = exhaustive_search(req(3, 0.0, 64));
        CHECK(res.plan.pool_sizes[0] == 64);
        CHECK(res.plan.pool_sizes[1] == 2);
        CHECK(res.per_capita_tests == doctest::Approx(1.0 / 64));
    }
    SUBCASE("search-space refusal reports an estimate") {
        CHECK_THROWS_AS(exhaustive_search(req(5, 0.01, 256, false)),
                        SearchSpaceError);
    }
    SUBCASE("infeasible bounds") {
        CHECK_THROWS_AS(exhaustive_search(req(5, 0.01, 8)), InfeasibleError);
    }
}

TEST_CASE("optimizer equals exhaustive oracle on the study grid") {
    for (int k : {2, 3, 4, 5}) {
        for (double p : {0.001, 0.005, 0.01, 0.05, 0.1}) {
            CAPTURE(k);
            CAPTURE(p);
            auto fast = optimize_pool_sizes(req(k, p));
            auto oracle = exhaustive_search(req(k, p));
            CHECK(fast.plan.pool_sizes == oracle.plan.pool_sizes);
            CHECK(fast.per_capita_tests ==
                  doctest::Approx(oracle.per_capita_tests).epsilon(1e-12));
        }
    }
}

TEST_CASE("optimizer equals exhaustive without the nesting constraint") {
    for (int k : {2, 3}) {
        for (double p : {0.005, 0.02, 0.08}) {
            CAPTURE(k);
            CAPTURE(p);
            auto fast = optimize_pool_sizes(req(k, p, 64, false));
            auto oracle = exhaustive_search(req(k, p, 64, false));
            CHECK(fast.plan.pool_sizes == oracle.plan.pool_sizes);
        }
    }
}

TEST_CASE("cross-oracle agreement at small bounds") {
    auto fast = optimize_pool_sizes(req(4, 0.001, 64));
    auto oracle = exhaustive_search(req(4, 0.001, 64));
    CHECK(fast.plan.pool_sizes == oracle.plan.pool_sizes);
}

TEST_CASE("scale invariance: the optimal plan is independent of n") {
    auto a = req(3, 0.01);
    a.n = 100;
    auto b = req(3, 0.01);
    b.n = 1000000;
    auto ra = optimize_pool_sizes(a);
    auto rb = optimize_pool_sizes(b);
    CHECK(ra.plan.pool_sizes == rb.plan.pool_sizes);
    CHECK(ra.per_capita_tests == doctest::Approx(rb.per_capita_tests));
    CHECK(ra.expected_tests_at_optimum ==
          doctest::Approx(ra.per_capita_tests * 100));
    CHECK(rb.expected_tests_at_optimum ==
          doctest::Approx(rb.per_capita_tests * 1000000));
}

TEST_CASE("high prevalence: optimum approaches small pools") {
    auto res = optimize_pool_sizes(req(2, 0.3));
    auto oracle = exhaustive_search(req(2, 0.3));
    CHECK(res.plan.pool_sizes == oracle.plan.pool_sizes);
    CHECK(res.plan.pool_sizes[0] <= 4);
}

TEST_CASE("domain errors") {
    CHECK_THROWS_AS(optimize_pool_sizes(req(2, 0.0)), DomainError);
    CHECK_THROWS_AS(optimize_pool_sizes(req(2, 1.0)), DomainError);
    CHECK_THROWS_AS(optimize_pool_sizes(req(2, -0.5)), DomainError);
    CHECK_THROWS_AS(optimize_pool_sizes(req(1, 0.1)), DomainError);
}

TEST_CASE("objective value matches expected_tests on the returned plan") {
    auto res = optimize_pool_sizes(req(4, 0.02));
    double direct = per_capita_expected_tests(res.plan, Prevalence(0.02));
    CHECK(res.per_capita_tests == doctest::Approx(direct).epsilon(1e-13));
}
