#pragma once

#include <vector>

#include "pollsys/config.hpp"

namespace pollsys {

// Conservation-law report: the utilization-weighted wait sum and the four
// closed-form components it decomposes into. The sum of the components
// equals weighted_wait_sum exactly.
struct PclReport {
    std::vector<double> leftover_work; // E[F_i], work left at glue start
    double weighted_wait_sum = 0.0;    // sum of rho_i E[W_i]
    double service_term = 0.0;         // service second-moment part
    double idle_term = 0.0;            // idle-period second-moment part
    double cross_term = 0.0;           // cross-utilization part
    double retrial_term = 0.0;         // orbit leftovers part
};

struct ApproxReport {
    double residual_cycle = 0.0;
    std::vector<double> mean_wait;
    std::vector<double> retrial_multiplier; // glue transform odds at nu_i
};

// Mean work of station i left behind at the start of its glue period.
std::vector<double> leftover_work(const SystemConfig& cfg);

PclReport pcl_rhs(const SystemConfig& cfg);

// Mean residual of the cycle seen by an arriving customer, calibrated so
// the approximate waits satisfy the conservation law exactly.
double residual_cycle(const SystemConfig& cfg);

ApproxReport approx_mean_waiting(const SystemConfig& cfg);

} // namespace pollsys
