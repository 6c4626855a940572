#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "gtecon/econ.hpp"

using namespace gtecon;

namespace {

CostParams baseline(double h) {
    CostParams c;
    c.c_f = 10000.0;
    c.c_v = 150.0;
    c.c_l = 300.0;
    c.tau0 = 750;
    c.h = h;
    return c;
}

}  // namespace

TEST_CASE("branch anchors at baseline parameters") {
    // within capacity, h = 1 zeroes the loss term
    auto b = economic_cost(300, {50000.0, 10000.0}, baseline(1.0));
    CHECK(b.total == doctest::Approx(55000.0).epsilon(1e-10));
    CHECK(b.economic_loss == 0.0);
    CHECK(b.outsourced == 0.0);

    // overflow branch: 750 internal + 50 outsourced
    auto o = economic_cost(800, {1.0, 2.0}, baseline(1.0));
    CHECK(o.total == doctest::Approx(137500.0).epsilon(1e-10));
    CHECK(o.variable == doctest::Approx(112500.0));
    CHECK(o.outsourced == doctest::Approx(15000.0));

    // zero tests, full loss
    auto z = economic_cost(0, {1000.0}, baseline(0.0));
    CHECK(z.total == doctest::Approx(10000.0 + 1000.0));
}

TEST_CASE("breakdown is internally consistent") {
    auto b = economic_cost(500, {20000.0, 5000.0, 100.0}, baseline(0.3));
    CHECK(b.total ==
          doctest::Approx(b.fixed + b.variable + b.outsourced + b.economic_loss));
    CHECK(b.economic_loss == doctest::Approx(0.7 * 25100.0));
}

TEST_CASE("branch continuity at tau = tau0 for random parameters") {
    std::mt19937_64 gen(42);
    std::uniform_real_distribution<double> money(0.0, 500.0);
    std::uniform_int_distribution<std::int64_t> cap(0, 2000);
    std::uniform_real_distribution<double> share(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        CostParams c;
        c.c_f = money(gen) * 100;
        c.c_v = money(gen);
        c.c_l = money(gen);
        c.tau0 = cap(gen);
        c.h = share(gen);
        std::vector<double> w{money(gen) * 50, money(gen) * 10};
        // both branch formulas agree at the kink
        double at = economic_cost(c.tau0, w, c).total;
        double manual_lower =
            c.c_f + c.tau0 * c.c_v + (1 - c.h) * (w[0] + w[1]);
        double manual_upper = c.c_f + c.tau0 * c.c_v + (1 - c.h) * (w[0] + w[1]) +
                              (c.tau0 - c.tau0) * c.c_l;
        CHECK(at == doctest::Approx(manual_lower).epsilon(1e-12));
        CHECK(at == doctest::Approx(manual_upper).epsilon(1e-12));
        // and the step to tau0 + 1 adds exactly c_l
        double above = economic_cost(c.tau0 + 1, w, c).total;
        CHECK(above - at == doctest::Approx(c.c_l).epsilon(1e-9));
    }
}

TEST_CASE("monotonicity in every argument") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> money(0.0, 400.0);
    std::uniform_int_distribution<std::int64_t> cap(0, 1500);
    std::uniform_int_distribution<std::int64_t> tests(0, 2000);
    std::uniform_real_distribution<double> share(0.0, 1.0);
    for (int i = 0; i < 300; ++i) {
        CostParams c;
        c.c_f = money(gen) * 50;
        c.c_v = money(gen);
        // the tau0 monotonicity only holds when outsourcing is the more
        // expensive route, which is the regime the model warns about otherwise
        c.c_l = c.c_v + money(gen);
        c.tau0 = cap(gen);
        c.h = share(gen);
        std::vector<double> w{money(gen) * 20, money(gen) * 5};
        std::int64_t tau = tests(gen);
        double base = economic_cost(tau, w, c).total;

        CHECK(economic_cost(tau + 10, w, c).total >= base);

        CostParams up = c;
        up.c_f += 5;
        CHECK(economic_cost(tau, w, up).total >= base);
        up = c;
        up.c_v += 5;
        CHECK(economic_cost(tau, w, up).total >= base);
        up = c;
        up.c_l += 5;
        CHECK(economic_cost(tau, w, up).total >= base);
        up = c;
        up.h = std::min(1.0, c.h + 0.1);
        CHECK(economic_cost(tau, w, up).total <= base + 1e-9);
        up = c;
        up.tau0 += 10;
        CHECK(economic_cost(tau, w, up).total <= base + 1e-9);

        std::vector<double> wup = w;
        wup[1] += 100.0;
        CHECK(economic_cost(tau, wup, c).total >= base);
    }
}

TEST_CASE("loss term is linear in the quarantine ledger") {
    auto c = baseline(0.25);
    std::vector<double> w{12000.0, 3000.0, 500.0};
    std::vector<double> w2{24000.0, 6000.0, 1000.0};
    auto a = economic_cost(400, w, c);
    auto b = economic_cost(400, w2, c);
    CHECK(b.economic_loss == doctest::Approx(2.0 * a.economic_loss));
    CHECK(b.fixed == a.fixed);
    CHECK(b.variable == a.variable);
    CHECK(b.outsourced == a.outsourced);
}

TEST_CASE("stage duration multiplier scales the loss only") {
    auto c = baseline(0.0);
    c.stage_duration_days = 2.0;
    auto b = economic_cost(100, {1000.0}, c);
    CHECK(b.economic_loss == doctest::Approx(2000.0));
}

TEST_CASE("validation") {
    CHECK_THROWS_AS(economic_cost(-1, {}, baseline(0.5)), ValidationError);
    CHECK_THROWS_AS(economic_cost(1, {-5.0}, baseline(0.5)), ValidationError);
    CostParams bad = baseline(1.5);
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    CostParams warned = baseline(0.5);
    warned.c_l = 10.0;  // below c_v: warn, don't reject
    CHECK(!warned.validate().empty());
}

TEST_CASE("eci and range") {
    CHECK(eci({55000.0}, 1000) == doctest::Approx(55.0));
    CHECK(eci({100000.0, 200000.0}, 1000) == doctest::Approx(150.0));
    CHECK_THROWS_AS(eci({}, 10), ValidationError);

    CHECK(range_per_individual({5.0, 5.0, 5.0}, 1) == doctest::Approx(0.0));
    CHECK(range_per_individual({100000.0, 250000.0}, 1000) ==
          doctest::Approx(150.0));
    CHECK(range_per_individual({7.0}, 3) == doctest::Approx(0.0));
    CHECK_THROWS_AS(range_per_individual({}, 10), ValidationError);

    // range >= 0, and 0 iff all equal
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> money(0.0, 1e6);
    for (int i = 0; i < 100; ++i) {
        std::vector<double> costs{money(gen), money(gen), money(gen)};
        double r = range_per_individual(costs, 100);
        CHECK(r >= 0.0);
        if (r == 0.0) {
            CHECK(costs[0] == costs[1]);
            CHECK(costs[1] == costs[2]);
        }
    }
}
