#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gtecon/econ.hpp"
#include "gtecon/gt_core.hpp"
#include "gtecon/ingest.hpp"
#include "gtecon/optimize.hpp"

namespace gtecon {

struct ScenarioConfig {
    std::vector<std::string> locations;
    std::vector<int> algorithms = {2, 3, 4, 5};  // stage counts k
    CostParams cost;
    std::int64_t n = 1000;
    int n_sim = 25;
    double duration_days = 14.0;
    std::uint64_t seed = 0;
    int s_max = 256;
    bool strict_nesting = true;
    // Share infection/income draws across algorithms at the same
    // (location, date) for variance reduction.
    bool common_random_numbers = false;
    int threads = 1;  // 0 = hardware concurrency

    void validate() const;
};

struct ScenarioResult {
    std::string location;
    std::string date;
    double prevalence = 0.0;
    int k = 0;
    PoolPlan plan;
    double mean_eci = 0.0;
    double min_eci = 0.0;
    double max_eci = 0.0;
    double range_per_individual = 0.0;
    double mean_total_tests = 0.0;
    double mean_economic_loss = 0.0;
    std::vector<double> replication_costs;  // kept so aggregates stay auditable
};

struct OptimalChoice {
    std::string location;
    std::string date;
    double prevalence = 0.0;
    int k = 0;
    double mean_eci = 0.0;
};

/// One seeded replication per (location, date, k, r); sub-seeds are derived
/// by hashing, so results are identical at any thread count.
std::vector<ScenarioResult> run_scenario(
    const ScenarioConfig& config, const std::vector<PrevalencePoint>& prevalence,
    const std::vector<EmpiricalIncomeDistribution>& incomes);

/// Argmin-k by mean ECI per (location, date); ties go to the smaller k.
std::vector<OptimalChoice> optimal_choice(const std::vector<ScenarioResult>& results);

enum class SweepParameter { c_v, n, h, tau0 };

SweepParameter parse_sweep_parameter(const std::string& name);
std::string sweep_parameter_name(SweepParameter param);

/// One-at-a-time sweep; the baseline value is inserted if missing and the
/// value list is evaluated in ascending order.
struct SweepResult {
    double value = 0.0;
    std::vector<ScenarioResult> results;
};

std::vector<SweepResult> sweep(const ScenarioConfig& config, SweepParameter param,
                               std::vector<double> values,
                               const std::vector<PrevalencePoint>& prevalence,
                               const std::vector<EmpiricalIncomeDistribution>& incomes);

}  // namespace gtecon
