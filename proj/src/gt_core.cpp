#include "gtecon/gt_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gtecon {

Prevalence::Prevalence(double p) : p_(p) {
    if (!(p >= 0.0) || !(p < 1.0)) {
        throw ValidationError("prevalence must lie in [0, 1)");
    }
}

PoolPlan PoolPlan::make(std::vector<int> sizes) {
    PoolPlan plan;
    plan.stages = static_cast<int>(sizes.size()) + 1;
    plan.pool_sizes = std::move(sizes);
    return plan;
}

bool PoolPlan::nesting_divisible() const {
    for (std::size_t l = 1; l < pool_sizes.size(); ++l) {
        if (pool_sizes[l - 1] % pool_sizes[l] != 0) return false;
    }
    return true;
}

void PoolPlan::validate(bool require_divisibility) const {
    if (stages < 1) throw ValidationError("plan needs at least one stage");
    if (static_cast<int>(pool_sizes.size()) != stages - 1) {
        throw ValidationError("plan needs stages - 1 pool sizes");
    }
    for (std::size_t l = 0; l < pool_sizes.size(); ++l) {
        if (pool_sizes[l] < 2) throw ValidationError("pool sizes must be >= 2");
        if (l > 0 && pool_sizes[l] >= pool_sizes[l - 1]) {
            throw ValidationError("pool sizes must be strictly decreasing");
        }
    }
    if (require_divisibility && !nesting_divisible()) {
        throw ValidationError("each pool size must divide its predecessor");
    }
}

void Population::validate() const {
    if (infected.empty()) throw ValidationError("population must be non-empty");
    if (infected.size() != daily_income.size()) {
        throw ValidationError("infection flags and incomes must have equal length");
    }
    for (double w : daily_income) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw ValidationError("incomes must be finite and non-negative");
        }
    }
}

double per_capita_expected_tests(const PoolPlan& plan, Prevalence p) {
    plan.validate();
    if (plan.stages == 1) return 1.0;
    const double q = p.complement();
    const auto& s = plan.pool_sizes;
    double t = 1.0 / s[0];
    for (std::size_t l = 1; l < s.size(); ++l) {
        t += (1.0 / s[l]) * (1.0 - std::pow(q, s[l - 1]));
    }
    t += 1.0 - std::pow(q, s.back());
    return t;
}

double expected_tests(const PoolPlan& plan, Prevalence p, std::int64_t n) {
    if (n < 1) throw ValidationError("population size must be >= 1");
    return static_cast<double>(n) * per_capita_expected_tests(plan, p);
}

Population draw_population(std::int64_t n, Prevalence p,
                           const std::vector<double>& incomes, rng::Engine& gen) {
    if (n < 1) throw ValidationError("population size must be >= 1");
    if (incomes.empty()) {
        throw ValidationError("income distribution must be non-empty");
    }
    Population pop;
    pop.infected.resize(static_cast<std::size_t>(n));
    pop.daily_income.resize(static_cast<std::size_t>(n));
    std::bernoulli_distribution infect(p.value());
    std::uniform_int_distribution<std::size_t> pick(0, incomes.size() - 1);
    for (std::int64_t i = 0; i < n; ++i) {
        pop.infected[i] = infect(gen) ? 1 : 0;
        pop.daily_income[i] = incomes[pick(gen)];
    }
    return pop;
}

namespace {

struct Pool {
    std::int32_t begin = 0;  // range into the shuffled order
    std::int32_t end = 0;
};

bool pool_positive(const Pool& pool, const std::vector<std::int32_t>& order,
                   const Population& pop) {
    for (std::int32_t i = pool.begin; i < pool.end; ++i) {
        if (pop.infected[order[i]]) return true;
    }
    return false;
}

double income_sum(const std::vector<std::int32_t>& members, const Population& pop) {
    double w = 0.0;
    for (std::int32_t idx : members) w += pop.daily_income[idx];
    return w;
}

}  // namespace

SimulationOutcome simulate(const PoolPlan& plan, const Population& pop,
                           rng::Engine& gen) {
    plan.validate(/*require_divisibility=*/false);
    pop.validate();
    const auto n = static_cast<std::int32_t>(pop.size());
    const int k = plan.stages;

    SimulationOutcome out;
    out.tests_per_stage.assign(k, 0);
    out.quarantined_per_stage.assign(k, {});
    out.stage_income_sums.assign(k, 0.0);

    // Stage 1 quarantines everyone for the day of the first test round.
    out.quarantined_per_stage[0].resize(n);
    std::iota(out.quarantined_per_stage[0].begin(),
              out.quarantined_per_stage[0].end(), 0);
    out.stage_income_sums[0] = income_sum(out.quarantined_per_stage[0], pop);

    if (k == 1) {
        out.tests_per_stage[0] = n;
        out.total_tests = n;
        return out;
    }

    // Pooling order is a seeded shuffle; pools are consecutive chunks,
    // the last one may be ragged.
    std::vector<std::int32_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), gen);

    const int s1 = plan.pool_sizes[0];
    std::vector<Pool> pools;
    for (std::int32_t b = 0; b < n; b += s1) {
        pools.push_back({b, std::min(n, b + s1)});
    }
    out.tests_per_stage[0] = static_cast<std::int64_t>(pools.size());

    // Intermediate joint stages: subdivide positive pools into chunks of
    // size s_l, preserving within-pool order.
    for (int stage = 2; stage <= k - 1; ++stage) {
        const int sl = plan.pool_sizes[stage - 1];
        std::vector<Pool> next;
        auto& quarantined = out.quarantined_per_stage[stage - 1];
        for (const Pool& pool : pools) {
            if (!pool_positive(pool, order, pop)) continue;
            for (std::int32_t i = pool.begin; i < pool.end; ++i) {
                quarantined.push_back(order[i]);
            }
            for (std::int32_t b = pool.begin; b < pool.end; b += sl) {
                next.push_back({b, std::min(pool.end, b + sl)});
            }
        }
        std::sort(quarantined.begin(), quarantined.end());
        out.stage_income_sums[stage - 1] = income_sum(quarantined, pop);
        out.tests_per_stage[stage - 1] = static_cast<std::int64_t>(next.size());
        pools = std::move(next);
    }

    // Final stage: individual retesting of everyone left in a positive pool.
    auto& last = out.quarantined_per_stage[k - 1];
    for (const Pool& pool : pools) {
        if (!pool_positive(pool, order, pop)) continue;
        for (std::int32_t i = pool.begin; i < pool.end; ++i) {
            last.push_back(order[i]);
        }
    }
    std::sort(last.begin(), last.end());
    out.stage_income_sums[k - 1] = income_sum(last, pop);
    out.tests_per_stage[k - 1] = static_cast<std::int64_t>(last.size());

    out.total_tests = std::accumulate(out.tests_per_stage.begin(),
                                      out.tests_per_stage.end(), std::int64_t{0});
    return out;
}

double mean_tests(const PoolPlan& plan, Prevalence p, std::int64_t n,
                  int replications, const std::vector<double>& incomes,
                  rng::Engine& gen) {
    if (replications < 1) throw ValidationError("replications must be >= 1");
    double total = 0.0;
    for (int r = 0; r < replications; ++r) {
        Population pop = draw_population(n, p, incomes, gen);
        total += static_cast<double>(simulate(plan, pop, gen).total_tests);
    }
    return total / replications;
}

}  // namespace gtecon
