#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "gtecon/rng.hpp"

namespace gtecon {

struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Probability that a single individual is infected. Valid range [0, 1);
/// p = 1 is rejected, p = 0 occurs in real incidence data and is allowed.
class Prevalence {
public:
    explicit Prevalence(double p);

    double value() const { return p_; }
    double complement() const { return 1.0 - p_; }

private:
    double p_;
};

/// A k-stage nested Dorfman-type design. pool_sizes holds the joint-test
/// pool sizes s_1 > s_2 > ... > s_{k-1}; the final stage is individual
/// retesting. stages == 1 with empty pool_sizes means individual testing.
struct PoolPlan {
    int stages = 1;
    std::vector<int> pool_sizes;

    static PoolPlan individual() { return PoolPlan{1, {}}; }
    static PoolPlan make(std::vector<int> sizes);  // stages = sizes.size() + 1

    // strictly decreasing, all >= 2, s_{l+1} | s_l
    void validate(bool require_divisibility = true) const;
    bool nesting_divisible() const;
};

struct Population {
    std::vector<std::uint8_t> infected;
    std::vector<double> daily_income;

    std::size_t size() const { return infected.size(); }
    void validate() const;
};

/// Result of one stochastic run. Stage 1 quarantines the whole population;
/// stage j+1 holds exactly the members of positive stage-j pools.
struct SimulationOutcome {
    std::vector<std::int64_t> tests_per_stage;
    std::int64_t total_tests = 0;
    std::vector<std::vector<std::int32_t>> quarantined_per_stage;  // sorted indices
    std::vector<double> stage_income_sums;  // w_1..w_k, EUR/day
};

/// Closed-form E(T_k): n(1/s1 + sum_{l=2}^{k-1} (1/s_l)(1 - q^{s_{l-1}})
/// + (1 - q^{s_{k-1}})). k = 1 returns n.
double expected_tests(const PoolPlan& plan, Prevalence p, std::int64_t n);

/// Same expression per individual; independent of n.
double per_capita_expected_tests(const PoolPlan& plan, Prevalence p);

struct EmpiricalIncomeDistribution;  // defined in ingest.hpp

Population draw_population(std::int64_t n, Prevalence p,
                           const std::vector<double>& incomes, rng::Engine& gen);

SimulationOutcome simulate(const PoolPlan& plan, const Population& pop,
                           rng::Engine& gen);

double mean_tests(const PoolPlan& plan, Prevalence p, std::int64_t n,
                  int replications, const std::vector<double>& incomes,
                  rng::Engine& gen);

}  // namespace gtecon
