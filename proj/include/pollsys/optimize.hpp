#pragma once

#include <vector>

#include "pollsys/config.hpp"

namespace pollsys {

// Constrained glue-budget allocation: pick glue lengths g_i > 0 with
// sum g_i = budget that minimize the weighted sum of approximate mean
// waiting times. Deterministic glue dominates any other distribution with
// the same means, so the search runs over deterministic lengths.
struct OptimizationProblem {
    // Arrival, retrial, service, switchover and weight parameters are taken
    // from here; the glue entries are placeholders and are ignored.
    SystemConfig base;
    double budget = 0.0; // total glue time to distribute
};

struct OptimizationResult {
    std::vector<double> glue_lengths; // optimal deterministic glue lengths
    double multiplier = 0.0;          // common marginal cost at the optimum
    double objective = 0.0;           // weighted approximate wait cost
    double budget_residual = 0.0;     // sum(glue_lengths) - budget
    double stationarity_gap = 0.0;    // spread of per-station marginal costs
    double bracket_width = 0.0;       // final width of the multiplier bracket
    int outer_iterations = 0;         // bisection steps on the multiplier
    long inner_iterations = 0;        // bisection steps inside all inversions
};

// Weighted objective for arbitrary glue distributions. The glue means must
// exhaust the budget; anything else throws validation_error.
double objective_general(const OptimizationProblem& problem,
                         const std::vector<DistributionSpec>& glue);

// Closed-form objective for deterministic glue lengths summing to the
// budget. Throws validation_error when any length is not strictly positive.
double objective_deterministic(const OptimizationProblem& problem,
                               const std::vector<double>& glue);

// Marginal cost of growing station i's glue length: strictly increasing in
// the length, diverging to -infinity as the length shrinks to zero. Defined
// for lengths in (0, budget]; the right endpoint is the bracketing value.
double lagrange_f(const OptimizationProblem& problem, int station, double glue);

// Inverse of lagrange_f by bisection. Requires kappa < f_i(budget).
double invert_f(const OptimizationProblem& problem, int station, double kappa);

// Solves sum_i invert_f(kappa) = budget by bisection on kappa and returns
// the allocation together with convergence diagnostics.
OptimizationResult optimize(const OptimizationProblem& problem);

} // namespace pollsys
