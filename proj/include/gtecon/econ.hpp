#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gtecon/gt_core.hpp"

namespace gtecon {

/// Parameters of the piecewise economic cost function. Tests up to tau0 are
/// run internally at c_v each, the overflow is outsourced at c_l each, and
/// quarantine income loss is discounted by the remote-work share h.
struct CostParams {
    double c_f = 10000.0;  // fixed setup cost, EUR
    double c_v = 150.0;    // internal cost per test
    double c_l = 300.0;    // outsourced cost per test
    std::int64_t tau0 = 750;  // internal testing capacity
    double h = 0.5;        // remote-work share in [0, 1]
    double stage_duration_days = 1.0;  // multiplier on the quarantine ledger

    // Returns a warning string for c_l < c_v (unusual but not rejected),
    // throws on invalid values.
    std::vector<std::string> validate() const;
};

struct CostBreakdown {
    double fixed = 0.0;
    double variable = 0.0;
    double outsourced = 0.0;
    double economic_loss = 0.0;
    double total = 0.0;
};

CostBreakdown economic_cost(std::int64_t tau,
                            const std::vector<double>& stage_income_sums,
                            const CostParams& params);

/// Economic cost per individual: mean of the replication costs over n.
double eci(const std::vector<double>& costs, std::int64_t n);

/// (max - min) / n, the spread measure across replications.
double range_per_individual(const std::vector<double>& costs, std::int64_t n);

}  // namespace gtecon
