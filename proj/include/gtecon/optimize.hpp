#pragma once

#include <cstdint>
#include <stdexcept>

#include "gtecon/gt_core.hpp"

namespace gtecon {

struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SearchSpaceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class OptimizeMethod { continuous_lattice, exhaustive };

struct OptimizationRequest {
    int stages = 2;          // k, final stage is individual retesting
    double prevalence = 0.0;
    std::int64_t n = 1000;
    int s_max = 256;         // upper bound for s_1
    bool strict_nesting = true;

    void validate() const;
};

struct OptimizationResult {
    PoolPlan plan;
    double per_capita_tests = 0.0;
    double expected_tests_at_optimum = 0.0;  // n * per_capita_tests
    OptimizeMethod method = OptimizeMethod::exhaustive;
    // Per-capita optimum >= 1 means pooling never beats testing everyone once.
    bool individual_testing_dominates = false;
};

/// Nelder-Mead on the continuous relaxation (multi-start), then integer
/// refinement on the surrounding lattice. Requires p in (0,1).
OptimizationResult optimize_pool_sizes(const OptimizationRequest& req);

/// Full enumeration of all feasible integer plans; the correctness oracle.
/// Accepts p = 0 (objective degenerates to 1/s_1). Refuses search spaces
/// above 10^7 candidates.
OptimizationResult exhaustive_search(const OptimizationRequest& req);

}  // namespace gtecon
