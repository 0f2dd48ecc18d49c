#include "pollsys/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pollsys/errors.hpp"
#include "pollsys/pcl.hpp"

namespace pollsys {

namespace {

// Per-station constants of the marginal cost function. The horizon is the
// mean cycle length of the allocated system, (sum E[S_j] + budget)/(1 - rho),
// which does not depend on how the budget is split.
struct MarginalParams {
    std::vector<double> weight;
    std::vector<double> retrial_rate;
    double horizon = 0.0;
    double budget = 0.0;
};

void validate_problem(const OptimizationProblem& problem) {
    validate(problem.base);
    if (!(problem.budget > 0.0))
        throw validation_error("glue budget must be positive");
}

MarginalParams marginal_params(const OptimizationProblem& problem) {
    MarginalParams p;
    double switchover_sum = 0.0;
    for (const auto& st : problem.base.stations) {
        p.weight.push_back(st.weight);
        p.retrial_rate.push_back(st.nu);
        switchover_sum += st.switchover.mean();
    }
    double rho = utilizations(problem.base).total;
    p.horizon = (switchover_sum + problem.budget) / (1.0 - rho);
    p.budget = problem.budget;
    return p;
}

double marginal_cost(const MarginalParams& p, int station, double glue) {
    double c = p.weight[station];
    double nu = p.retrial_rate[station];
    // 1 - e^{-nu g} without cancellation for tiny nu g.
    double hit = -std::expm1(-nu * glue);
    double miss = std::exp(-nu * glue);
    return c - c / hit - c * nu * miss / (hit * hit) * (p.horizon - glue);
}

// Bisects marginal_cost(station, .) = kappa on (0, budget]. The marginal
// cost is strictly increasing and runs from -infinity, so the root exists
// and is unique whenever kappa < marginal_cost(budget).
double invert_marginal(const MarginalParams& p, int station, double kappa,
                       long& steps) {
    if (!(kappa < marginal_cost(p, station, p.budget)))
        throw validation_error(
            "station " + std::to_string(station + 1) +
            ": no glue length within the budget reaches this marginal cost");
    double lo = 0.0;
    double hi = p.budget;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        ++steps;
        (marginal_cost(p, station, mid) < kappa ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double allocation_sum(const MarginalParams& p, double kappa, long& steps) {
    double total = 0.0;
    for (size_t i = 0; i < p.weight.size(); ++i)
        total += invert_marginal(p, static_cast<int>(i), kappa, steps);
    return total;
}

SystemConfig with_glue(const OptimizationProblem& problem,
                       const std::vector<DistributionSpec>& glue) {
    if (glue.size() != problem.base.stations.size())
        throw validation_error("one glue distribution per station is required");
    SystemConfig cfg = problem.base;
    for (size_t i = 0; i < glue.size(); ++i) cfg.stations[i].glue = glue[i];
    return cfg;
}

} // namespace

double objective_general(const OptimizationProblem& problem,
                         const std::vector<DistributionSpec>& glue) {
    validate_problem(problem);
    SystemConfig cfg = with_glue(problem, glue);
    double mean_sum = 0.0;
    for (const auto& spec : glue) mean_sum += spec.mean();
    if (std::abs(mean_sum - problem.budget) >
        1e-9 * std::max(1.0, problem.budget))
        throw validation_error("glue means must exhaust the budget exactly");
    ApproxReport rep = approx_mean_waiting(cfg);
    double value = 0.0;
    for (int i = 0; i < cfg.size(); ++i)
        value += cfg.stations[i].weight * rep.mean_wait[i];
    return value;
}

double objective_deterministic(const OptimizationProblem& problem,
                               const std::vector<double>& glue) {
    std::vector<DistributionSpec> specs;
    for (size_t i = 0; i < glue.size(); ++i) {
        if (!(glue[i] > 0.0))
            throw validation_error("station " + std::to_string(i + 1) +
                                   ": glue length must be strictly positive");
        specs.push_back(DistributionSpec::deterministic(glue[i]));
    }
    return objective_general(problem, specs);
}

double lagrange_f(const OptimizationProblem& problem, int station, double glue) {
    validate_problem(problem);
    if (station < 0 || station >= problem.base.size())
        throw validation_error("station index out of range");
    if (!(glue > 0.0) || glue > problem.budget)
        throw validation_error(
            "marginal cost is defined for glue lengths in (0, budget]");
    return marginal_cost(marginal_params(problem), station, glue);
}

double invert_f(const OptimizationProblem& problem, int station, double kappa) {
    validate_problem(problem);
    if (station < 0 || station >= problem.base.size())
        throw validation_error("station index out of range");
    long steps = 0;
    return invert_marginal(marginal_params(problem), station, kappa, steps);
}

OptimizationResult optimize(const OptimizationProblem& problem) {
    validate_problem(problem);
    MarginalParams p = marginal_params(problem);
    int n = problem.base.size();
    OptimizationResult res;

    // The common marginal cost lies below every station's value at the full
    // budget. Start the lower end at a nearly empty allocation and double
    // its distance from the upper end until the allocations fit the budget.
    double upper = marginal_cost(p, 0, p.budget);
    double lower = marginal_cost(p, 0, p.budget * 1e-6 / n);
    for (int i = 1; i < n; ++i) {
        upper = std::min(upper, marginal_cost(p, i, p.budget));
        lower = std::min(lower, marginal_cost(p, i, p.budget * 1e-6 / n));
    }
    upper -= 1e-12;
    for (int it = 0; it < 200; ++it) {
        if (allocation_sum(p, lower, res.inner_iterations) < p.budget) break;
        lower = upper - 2.0 * (upper - lower);
    }

    double kappa = 0.5 * (lower + upper);
    for (int it = 0; it < 300; ++it) {
        kappa = 0.5 * (lower + upper);
        if (kappa <= lower || kappa >= upper) break;
        ++res.outer_iterations;
        double total = allocation_sum(p, kappa, res.inner_iterations);
        if (std::abs(total - p.budget) <= 1e-12 * p.budget) break;
        (total < p.budget ? lower : upper) = kappa;
    }

    res.multiplier = kappa;
    res.bracket_width = upper - lower;
    double total = 0.0;
    double f_min = 0.0;
    double f_max = 0.0;
    for (int i = 0; i < n; ++i) {
        double g = invert_marginal(p, i, kappa, res.inner_iterations);
        res.glue_lengths.push_back(g);
        total += g;
        double f = marginal_cost(p, i, g);
        f_min = i == 0 ? f : std::min(f_min, f);
        f_max = i == 0 ? f : std::max(f_max, f);
    }
    res.budget_residual = total - p.budget;
    res.stationarity_gap = f_max - f_min;
    res.objective = objective_deterministic(problem, res.glue_lengths);
    return res;
}

} // namespace pollsys
