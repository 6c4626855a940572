#include "gtecon/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace gtecon {

namespace {

double objective(const std::vector<double>& sizes, double q) {
    // Continuous relaxation of the per-capita expected test count.
    double t = 1.0 / sizes[0];
    for (std::size_t l = 1; l < sizes.size(); ++l) {
        t += (1.0 / sizes[l]) * (1.0 - std::pow(q, sizes[l - 1]));
    }
    t += 1.0 - std::pow(q, sizes.back());
    return t;
}

double objective_int(const std::vector<int>& sizes, double q) {
    double t = 1.0 / sizes[0];
    for (std::size_t l = 1; l < sizes.size(); ++l) {
        t += (1.0 / sizes[l]) * (1.0 - std::pow(q, sizes[l - 1]));
    }
    t += 1.0 - std::pow(q, sizes.back());
    return t;
}

// Plain Nelder-Mead over R^d; enough iterations for the smooth, low-d
// objectives here.
std::vector<double> nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                std::vector<double> x0, int max_iter = 600) {
    const std::size_t d = x0.size();
    const double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;

    std::vector<std::vector<double>> simplex(d + 1, x0);
    for (std::size_t i = 0; i < d; ++i) simplex[i + 1][i] += 0.25;
    std::vector<double> fv(d + 1);
    for (std::size_t i = 0; i <= d; ++i) fv[i] = f(simplex[i]);

    for (int it = 0; it < max_iter; ++it) {
        std::vector<std::size_t> idx(d + 1);
        for (std::size_t i = 0; i <= d; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(),
                  [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        std::vector<std::vector<double>> sx(d + 1);
        std::vector<double> sf(d + 1);
        for (std::size_t i = 0; i <= d; ++i) {
            sx[i] = simplex[idx[i]];
            sf[i] = fv[idx[i]];
        }
        simplex = std::move(sx);
        fv = std::move(sf);

        if (fv[d] - fv[0] < 1e-12) break;

        std::vector<double> centroid(d, 0.0);
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) centroid[j] += simplex[i][j];
        }
        for (double& c : centroid) c /= static_cast<double>(d);

        auto blend = [&](double coeff) {
            std::vector<double> x(d);
            for (std::size_t j = 0; j < d; ++j) {
                x[j] = centroid[j] + coeff * (centroid[j] - simplex[d][j]);
            }
            return x;
        };

        auto xr = blend(alpha);
        double fr = f(xr);
        if (fr < fv[0]) {
            auto xe = blend(gamma);
            double fe = f(xe);
            if (fe < fr) {
                simplex[d] = xe;
                fv[d] = fe;
            } else {
                simplex[d] = xr;
                fv[d] = fr;
            }
        } else if (fr < fv[d - 1]) {
            simplex[d] = xr;
            fv[d] = fr;
        } else {
            auto xc = blend(-rho);
            double fc = f(xc);
            if (fc < fv[d]) {
                simplex[d] = xc;
                fv[d] = fc;
            } else {
                for (std::size_t i = 1; i <= d; ++i) {
                    for (std::size_t j = 0; j < d; ++j) {
                        simplex[i][j] = simplex[0][j] + sigma * (simplex[i][j] - simplex[0][j]);
                    }
                    fv[i] = f(simplex[i]);
                }
            }
        }
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i <= fv.size() - 1; ++i) {
        if (fv[i] < fv[best]) best = i;
    }
    return simplex[best];
}

struct Best {
    bool found = false;
    std::vector<int> sizes;
    double value = 0.0;

    // Strict improvement wins; exact ties go to the lexicographically
    // smallest plan.
    void offer(const std::vector<int>& cand, double v) {
        if (!found || v < value || (v == value && cand < sizes)) {
            found = true;
            sizes = cand;
            value = v;
        }
    }
};

void check_feasible(const OptimizationRequest& req) {
    // Smallest admissible s_1 for a full decreasing chain.
    int min_s1 = req.strict_nesting ? (1 << (req.stages - 1)) : req.stages;
    if (min_s1 > req.s_max) {
        throw InfeasibleError("no valid pool-size chain with s_max = " +
                              std::to_string(req.s_max) + " for " +
                              std::to_string(req.stages) + " stages");
    }
}

// Enumerate decreasing (optionally divisibility-nested) chains below `prev`,
// in lexicographic order so the first optimum found is the tie-break winner.
template <typename Fn>
void enumerate_chains(std::vector<int>& sizes, int depth, int total_depth, int prev,
                      bool strict, Fn&& visit) {
    if (depth == total_depth) {
        visit(sizes);
        return;
    }
    for (int s = 2; s < prev; ++s) {
        if (strict && prev % s != 0) continue;
        sizes.push_back(s);
        enumerate_chains(sizes, depth + 1, total_depth, s, strict, visit);
        sizes.pop_back();
    }
}

std::int64_t count_candidates(const OptimizationRequest& req, std::int64_t cap) {
    std::int64_t count = 0;
    std::vector<int> sizes;
    for (int s1 = 2; s1 <= req.s_max && count <= cap; ++s1) {
        sizes.assign(1, s1);
        enumerate_chains(sizes, 1, req.stages - 1, s1, req.strict_nesting,
                         [&](const std::vector<int>&) { ++count; });
    }
    return count;
}

OptimizationResult finish(const OptimizationRequest& req, const Best& best,
                          OptimizeMethod method) {
    if (!best.found) {
        throw InfeasibleError("no feasible plan within bounds");
    }
    OptimizationResult res;
    res.plan = PoolPlan::make(best.sizes);
    res.plan.validate(req.strict_nesting);
    res.per_capita_tests = best.value;
    res.expected_tests_at_optimum = best.value * static_cast<double>(req.n);
    res.method = method;
    res.individual_testing_dominates = best.value >= 1.0;
    return res;
}

}  // namespace

void OptimizationRequest::validate() const {
    if (stages < 2) throw DomainError("optimization needs at least two stages");
    if (s_max < 4) throw DomainError("s_max must be >= 4");
    if (n < 1) throw DomainError("population size must be >= 1");
    if (!(prevalence >= 0.0) || !(prevalence < 1.0)) {
        throw DomainError("prevalence must lie in [0, 1)");
    }
}

OptimizationResult exhaustive_search(const OptimizationRequest& req) {
    req.validate();
    check_feasible(req);
    const double q = 1.0 - req.prevalence;

    constexpr std::int64_t kMaxCandidates = 10'000'000;
    std::int64_t count = count_candidates(req, kMaxCandidates);
    if (count > kMaxCandidates) {
        throw SearchSpaceError("search space exceeds 10^7 candidate plans (>" +
                               std::to_string(count) + ")");
    }

    Best best;
    std::vector<int> sizes;
    for (int s1 = 2; s1 <= req.s_max; ++s1) {
        sizes.assign(1, s1);
        enumerate_chains(sizes, 1, req.stages - 1, s1, req.strict_nesting,
                         [&](const std::vector<int>& cand) {
                             best.offer(cand, objective_int(cand, q));
                         });
    }
    return finish(req, best, OptimizeMethod::exhaustive);
}

OptimizationResult optimize_pool_sizes(const OptimizationRequest& req) {
    req.validate();
    if (!(req.prevalence > 0.0)) {
        throw DomainError("p outside (0,1); p = 0 degenerates every plan");
    }
    check_feasible(req);

    const double q = 1.0 - req.prevalence;
    const int k = req.stages;
    const int dim = k - 1;

    // Strict nesting works in multiplier space: sizes are
    // s_{k-1} = b, s_{k-2} = b*m_1, ..., so any integer (b, m) with
    // entries >= 2 is a feasible chain. Without nesting, coordinates are
    // the pool sizes directly.
    auto decode = [&](const std::vector<double>& y) {
        std::vector<double> s(dim);
        if (req.strict_nesting) {
            double cur = std::exp(y[0]);
            s[dim - 1] = cur;
            for (int i = 1; i < dim; ++i) {
                cur *= std::exp(y[i]);
                s[dim - 1 - i] = cur;
            }
        } else {
            for (int i = 0; i < dim; ++i) s[i] = std::exp(y[i]);
        }
        return s;
    };

    auto penalized = [&](const std::vector<double>& y) {
        std::vector<double> s = decode(y);
        double pen = 0.0;
        for (double v : s) {
            if (v < 2.0) pen += 10.0 * (2.0 - v) * (2.0 - v);
        }
        if (req.strict_nesting) {
            // multipliers below 2 already penalized through sizes; also
            // keep the ratio factors off 1 to preserve strict decrease
            for (int i = 1; i < dim; ++i) {
                double m = std::exp(y[i]);
                if (m < 2.0) pen += 10.0 * (2.0 - m) * (2.0 - m);
            }
        } else {
            for (int i = 1; i < dim; ++i) {
                if (s[i] + 1.0 > s[i - 1]) {
                    double d = s[i] + 1.0 - s[i - 1];
                    pen += 10.0 * d * d;
                }
            }
        }
        if (s[0] > req.s_max) {
            double d = (s[0] - req.s_max) / req.s_max;
            pen += 10.0 * d * d;
        }
        for (double& v : s) v = std::max(v, 1.01);
        return objective(s, q) + pen;
    };

    // Multi-start around the geometric heuristic s_1 ~ c / sqrt(p), plus
    // boundary starts: at moderate prevalence a second basin sits at the
    // s_max boundary, where 1/s_1 shrinks while the later terms saturate.
    std::vector<double> start_s1;
    for (double c : {0.5, 1.0, 2.0, 4.0}) {
        start_s1.push_back(c / std::sqrt(req.prevalence));
    }
    start_s1.push_back(static_cast<double>(req.s_max));
    start_s1.push_back(req.s_max / 2.0);

    std::vector<std::vector<double>> starts;
    for (double raw_s1 : start_s1) {
        double s1 = std::clamp(raw_s1, std::pow(2.0, dim),
                               static_cast<double>(req.s_max));
        double ratio = std::max(2.0, std::pow(s1 / 2.0, 1.0 / dim));
        std::vector<double> y(dim);
        if (req.strict_nesting) {
            y[0] = std::log(std::max(2.0, s1 / std::pow(ratio, dim - 1)));
            for (int i = 1; i < dim; ++i) y[i] = std::log(ratio);
        } else {
            double cur = s1;
            for (int i = 0; i < dim; ++i) {
                y[i] = std::log(cur);
                cur = std::max(2.0, cur / ratio);
            }
        }
        starts.push_back(std::move(y));
    }

    Best best;
    auto offer_box = [&](const std::vector<double>& y) {
        // Integer refinement in a +-3 box per coordinate around the
        // continuous optimum.
        std::vector<double> s = decode(y);
        std::vector<int> center(dim);
        if (req.strict_nesting) {
            center[0] = std::max(2, static_cast<int>(std::lround(s[dim - 1])));
            for (int i = 1; i < dim; ++i) {
                center[i] = std::max(
                    2, static_cast<int>(std::lround(s[dim - 1 - i] / s[dim - i])));
            }
        } else {
            for (int i = 0; i < dim; ++i) {
                center[i] = std::max(2, static_cast<int>(std::lround(s[i])));
            }
        }
        std::vector<int> coord(dim);
        std::function<void(int)> rec = [&](int d) {
            if (d == dim) {
                std::vector<int> sizes(dim);
                if (req.strict_nesting) {
                    long cur = coord[0];
                    sizes[dim - 1] = static_cast<int>(cur);
                    for (int i = 1; i < dim; ++i) {
                        cur *= coord[i];
                        if (cur > req.s_max) return;
                        sizes[dim - 1 - i] = static_cast<int>(cur);
                    }
                } else {
                    for (int i = 0; i < dim; ++i) sizes[i] = coord[i];
                    for (int i = 1; i < dim; ++i) {
                        if (sizes[i] >= sizes[i - 1]) return;
                    }
                }
                if (sizes[0] > req.s_max) return;
                best.offer(sizes, objective_int(sizes, q));
                return;
            }
            for (int v = std::max(2, center[d] - 3); v <= center[d] + 3; ++v) {
                coord[d] = v;
                rec(d + 1);
            }
        };
        rec(0);
    };

    // Iterated coordinate descent on the integer lattice: sweep one
    // coordinate at a time over its full feasible range until no sweep
    // improves. Catches the flat valleys the +-3 box misses.
    auto chain_valid = [&](const std::vector<int>& s) {
        if (s[0] > req.s_max) return false;
        for (int i = 0; i < dim; ++i) {
            if (s[i] < 2) return false;
            if (i > 0 && s[i] >= s[i - 1]) return false;
            if (i > 0 && req.strict_nesting && s[i - 1] % s[i] != 0) return false;
        }
        return true;
    };

    auto lattice_descent = [&](std::vector<int> sizes) {
        if (sizes.empty() || !chain_valid(sizes)) return;
        double cur = objective_int(sizes, q);
        best.offer(sizes, cur);
        bool improved = true;
        while (improved) {
            improved = false;
            // single-coordinate sweeps over the full feasible range
            for (int d = 0; d < dim; ++d) {
                std::vector<int> trial = sizes;
                const int hi = d == 0 ? req.s_max : sizes[d - 1] - 1;
                for (int v = 2; v <= hi; ++v) {
                    trial[d] = v;
                    if (!chain_valid(trial)) continue;
                    double val = objective_int(trial, q);
                    best.offer(trial, val);
                    if (val < cur) {
                        cur = val;
                        sizes = trial;
                        improved = true;
                    }
                }
            }
            // joint sweeps over coordinate pairs; divisibility couples
            // neighbours, so single moves alone can strand the search
            for (int d1 = 0; d1 < dim && dim > 1; ++d1) {
                for (int d2 = d1 + 1; d2 < dim; ++d2) {
                    std::vector<int> trial = sizes;
                    const int hi1 = d1 == 0 ? req.s_max : sizes[d1 - 1] - 1;
                    for (int v1 = 2; v1 <= hi1; ++v1) {
                        trial[d1] = v1;
                        const int hi2 = d2 == d1 + 1
                                            ? v1 - 1
                                            : trial[d2 - 1] - 1;
                        for (int v2 = 2; v2 <= hi2; ++v2) {
                            trial[d2] = v2;
                            if (!chain_valid(trial)) continue;
                            double val = objective_int(trial, q);
                            best.offer(trial, val);
                            if (val < cur) {
                                cur = val;
                                sizes = trial;
                                improved = true;
                            }
                        }
                        trial[d2] = sizes[d2];
                    }
                }
            }
        }
    };

    for (const auto& start : starts) {
        offer_box(nelder_mead(penalized, start));
        offer_box(start);
        if (best.found) lattice_descent(best.sizes);
    }
    return finish(req, best, OptimizeMethod::continuous_lattice);
}

}  // namespace gtecon
