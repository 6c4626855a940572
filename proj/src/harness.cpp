#include "gtecon/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <map>
#include <set>
#include <thread>

namespace gtecon {

namespace {

PoolPlan plan_for(const ScenarioConfig& config, int k, double p) {
    if (k == 1) return PoolPlan::individual();
    OptimizationRequest req;
    req.stages = k;
    req.prevalence = p;
    req.n = config.n;
    req.s_max = static_cast<int>(
        std::min<std::int64_t>(config.s_max, config.n));
    req.strict_nesting = config.strict_nesting;
    if (p == 0.0) {
        // Every plan clears the population in one joint pass; the argmin of
        // ceil(n/s1) tests is found by the same enumeration the oracle uses.
        return exhaustive_search(req).plan;
    }
    return optimize_pool_sizes(req).plan;
}

std::uint64_t replication_seed(const ScenarioConfig& config,
                               const std::string& location,
                               const std::string& date, int k, int rep) {
    std::uint64_t s = rng::combine(config.seed, rng::hash_str(location));
    s = rng::combine(s, rng::hash_str(date));
    if (!config.common_random_numbers) {
        s = rng::combine(s, static_cast<std::uint64_t>(k));
    }
    return rng::combine(s, static_cast<std::uint64_t>(rep));
}

template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn&& body) {
    if (threads == 0) {
        threads = static_cast<int>(std::thread::hardware_concurrency());
        if (threads == 0) threads = 1;
    }
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
                body(i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace

void ScenarioConfig::validate() const {
    if (locations.empty()) throw ValidationError("at least one location required");
    if (algorithms.empty()) throw ValidationError("at least one algorithm required");
    for (int k : algorithms) {
        if (k < 1 || k > 5) throw ValidationError("algorithm stages must be 1..5");
    }
    if (n < 1) throw ValidationError("population size must be >= 1");
    if (n_sim < 1) throw ValidationError("n_sim must be >= 1");
    if (!(duration_days > 0.0)) throw ValidationError("duration must be > 0");
    cost.validate();
}

std::vector<ScenarioResult> run_scenario(
    const ScenarioConfig& config, const std::vector<PrevalencePoint>& prevalence,
    const std::vector<EmpiricalIncomeDistribution>& incomes) {
    config.validate();

    std::map<std::string, const EmpiricalIncomeDistribution*> income_by_region;
    for (const auto& dist : incomes) {
        if (dist.daily_incomes.empty()) {
            throw ValidationError("empty income distribution for region " +
                                  dist.region);
        }
        income_by_region[dist.region] = &dist;
    }
    for (const auto& loc : config.locations) {
        if (!income_by_region.count(loc)) {
            throw DataError("no income distribution for location " + loc);
        }
    }

    std::vector<PrevalencePoint> points;
    for (const auto& pt : prevalence) {
        if (std::find(config.locations.begin(), config.locations.end(),
                      pt.location_id) != config.locations.end()) {
            points.push_back(pt);
        }
    }
    std::sort(points.begin(), points.end(), [](const auto& a, const auto& b) {
        return std::tie(a.location_id, a.date) < std::tie(b.location_id, b.date);
    });
    for (const auto& loc : config.locations) {
        if (std::none_of(points.begin(), points.end(), [&](const auto& pt) {
                return pt.location_id == loc;
            })) {
            throw DataError("no prevalence points for location " + loc);
        }
    }

    std::vector<int> ks = config.algorithms;
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());

    // Plans depend only on (k, p); optimize once, up front.
    std::map<std::pair<int, std::uint64_t>, PoolPlan> plan_cache;
    for (const auto& pt : points) {
        for (int k : ks) {
            auto key = std::make_pair(k, std::bit_cast<std::uint64_t>(pt.prevalence));
            if (!plan_cache.count(key)) {
                plan_cache.emplace(key, plan_for(config, k, pt.prevalence));
            }
        }
    }

    std::vector<ScenarioResult> results(points.size() * ks.size());
    parallel_for(results.size(), config.threads, [&](std::size_t task) {
        const auto& pt = points[task / ks.size()];
        const int k = ks[task % ks.size()];
        const auto& plan = plan_cache.at(
            {k, std::bit_cast<std::uint64_t>(pt.prevalence)});
        const auto& dist = *income_by_region.at(pt.location_id);
        const Prevalence p(pt.prevalence);

        ScenarioResult& res = results[task];
        res.location = pt.location_id;
        res.date = pt.date;
        res.prevalence = pt.prevalence;
        res.k = k;
        res.plan = plan;
        res.replication_costs.reserve(static_cast<std::size_t>(config.n_sim));

        double tests_sum = 0.0;
        double loss_sum = 0.0;
        for (int r = 0; r < config.n_sim; ++r) {
            auto gen = rng::make_engine(
                replication_seed(config, pt.location_id, pt.date, k, r));
            Population pop =
                draw_population(config.n, p, dist.daily_incomes, gen);
            SimulationOutcome outcome = simulate(plan, pop, gen);
            CostBreakdown cost = economic_cost(
                outcome.total_tests, outcome.stage_income_sums, config.cost);
            res.replication_costs.push_back(cost.total);
            tests_sum += static_cast<double>(outcome.total_tests);
            loss_sum += cost.economic_loss;
        }
        res.mean_eci = eci(res.replication_costs, config.n);
        auto [lo, hi] = std::minmax_element(res.replication_costs.begin(),
                                            res.replication_costs.end());
        res.min_eci = *lo / static_cast<double>(config.n);
        res.max_eci = *hi / static_cast<double>(config.n);
        res.range_per_individual =
            range_per_individual(res.replication_costs, config.n);
        res.mean_total_tests = tests_sum / config.n_sim;
        res.mean_economic_loss = loss_sum / config.n_sim;
    });
    return results;
}

std::vector<OptimalChoice> optimal_choice(const std::vector<ScenarioResult>& results) {
    std::map<std::pair<std::string, std::string>, const ScenarioResult*> best;
    for (const auto& res : results) {
        auto key = std::make_pair(res.location, res.date);
        auto it = best.find(key);
        if (it == best.end() || res.mean_eci < it->second->mean_eci ||
            (res.mean_eci == it->second->mean_eci && res.k < it->second->k)) {
            best[key] = &res;
        }
    }
    std::vector<OptimalChoice> out;
    out.reserve(best.size());
    for (const auto& [key, res] : best) {
        out.push_back({res->location, res->date, res->prevalence, res->k,
                       res->mean_eci});
    }
    return out;
}

SweepParameter parse_sweep_parameter(const std::string& name) {
    if (name == "c_v") return SweepParameter::c_v;
    if (name == "n") return SweepParameter::n;
    if (name == "h") return SweepParameter::h;
    if (name == "tau0") return SweepParameter::tau0;
    throw ValidationError("unknown sweep parameter: " + name);
}

std::string sweep_parameter_name(SweepParameter param) {
    switch (param) {
        case SweepParameter::c_v: return "c_v";
        case SweepParameter::n: return "n";
        case SweepParameter::h: return "h";
        case SweepParameter::tau0: return "tau0";
    }
    return "?";
}

std::vector<SweepResult> sweep(const ScenarioConfig& config, SweepParameter param,
                               std::vector<double> values,
                               const std::vector<PrevalencePoint>& prevalence,
                               const std::vector<EmpiricalIncomeDistribution>& incomes) {
    if (values.empty()) throw ValidationError("sweep needs at least one value");

    double baseline = 0.0;
    switch (param) {
        case SweepParameter::c_v: baseline = config.cost.c_v; break;
        case SweepParameter::n: baseline = static_cast<double>(config.n); break;
        case SweepParameter::h: baseline = config.cost.h; break;
        case SweepParameter::tau0:
            baseline = static_cast<double>(config.cost.tau0);
            break;
    }
    values.push_back(baseline);
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());

    std::vector<SweepResult> out;
    out.reserve(values.size());
    for (double v : values) {
        ScenarioConfig varied = config;
        switch (param) {
            case SweepParameter::c_v: varied.cost.c_v = v; break;
            case SweepParameter::n:
                varied.n = static_cast<std::int64_t>(std::llround(v));
                break;
            case SweepParameter::h: varied.cost.h = v; break;
            case SweepParameter::tau0:
                varied.cost.tau0 = static_cast<std::int64_t>(std::llround(v));
                break;
        }
        out.push_back({v, run_scenario(varied, prevalence, incomes)});
    }
    return out;
}

}  // namespace gtecon
