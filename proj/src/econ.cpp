#include "gtecon/econ.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gtecon {

std::vector<std::string> CostParams::validate() const {
    if (c_f < 0.0 || c_v < 0.0 || c_l < 0.0 || tau0 < 0 ||
        stage_duration_days < 0.0) {
        throw ValidationError("cost parameters must be non-negative");
    }
    if (h < 0.0 || h > 1.0) {
        throw ValidationError("remote-work share h must lie in [0, 1]");
    }
    std::vector<std::string> warnings;
    if (c_l < c_v) {
        warnings.push_back("outsourced cost c_l below internal cost c_v");
    }
    return warnings;
}

CostBreakdown economic_cost(std::int64_t tau,
                            const std::vector<double>& stage_income_sums,
                            const CostParams& params) {
    params.validate();
    if (tau < 0) throw ValidationError("test count must be non-negative");
    for (double w : stage_income_sums) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw ValidationError("stage income sums must be finite and non-negative");
        }
    }

    const double w_total =
        std::accumulate(stage_income_sums.begin(), stage_income_sums.end(), 0.0);

    CostBreakdown b;
    b.fixed = params.c_f;
    b.economic_loss = (1.0 - params.h) * params.stage_duration_days * w_total;
    if (tau <= params.tau0) {
        b.variable = static_cast<double>(tau) * params.c_v;
        b.outsourced = 0.0;
    } else {
        b.variable = static_cast<double>(params.tau0) * params.c_v;
        b.outsourced = static_cast<double>(tau - params.tau0) * params.c_l;
    }
    b.total = b.fixed + b.variable + b.outsourced + b.economic_loss;
    return b;
}

double eci(const std::vector<double>& costs, std::int64_t n) {
    if (costs.empty()) throw ValidationError("cost list must be non-empty");
    if (n < 1) throw ValidationError("population size must be >= 1");
    const double mean =
        std::accumulate(costs.begin(), costs.end(), 0.0) / costs.size();
    return mean / static_cast<double>(n);
}

double range_per_individual(const std::vector<double>& costs, std::int64_t n) {
    if (costs.empty()) throw ValidationError("cost list must be non-empty");
    if (n < 1) throw ValidationError("population size must be >= 1");
    auto [lo, hi] = std::minmax_element(costs.begin(), costs.end());
    return (*hi - *lo) / static_cast<double>(n);
}

}  // namespace gtecon
