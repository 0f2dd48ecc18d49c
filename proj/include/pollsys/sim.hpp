#pragma once

#include <cstdint>
#include <vector>

#include "pollsys/config.hpp"

namespace pollsys {

// How customers gated for a visit are ordered for service. Per-station mean
// waits are order-invariant; the choice shows up only in finer statistics.
enum class ServiceOrder {
    glue_epoch_fcfs, // by the instant they stuck to the station (default)
    arrival_fcfs,    // by original arrival time
    glue_epoch_lcfs, // newest glue epoch first
};

// One glue period's retrial outcome, for diagnostic goodness-of-fit tests.
struct GlueSample {
    int station = 0;
    double length = 0.0;  // realized glue length
    long orbit_size = 0;  // orbit population at glue start
    long glued = 0;       // how many of them stuck
};

struct SimConfig {
    SystemConfig system;
    long total_cycles = 1'000'000; // measured cycles, split into batches
    int batches = 10;
    long warmup_cycles = 10'000;   // cycles discarded before measuring
    std::uint64_t seed = 0;
    std::uint64_t replication = 0; // selects an independent stream family
    ServiceOrder order = ServiceOrder::glue_epoch_fcfs;
    bool record_glue_log = false;  // fill SimResult::glue_log (can be large)
};

struct Estimate {
    double value = 0.0;
    double lower = 0.0; // 95% confidence bounds from batch means
    double upper = 0.0;
};

// Raw per-batch averages, exposed for reanalysis.
struct BatchMeans {
    std::vector<double> wait;         // mean wait of customers served
    std::vector<double> station_size; // time-average customers present
    std::vector<double> orbit_queue;  // same, excluding the one in service
    std::vector<long> served;         // customers served in the batch
    double weighted_wait = 0.0;       // sum of rho_i * wait_i
    double workload = 0.0;            // time-average outstanding work
    double cycle_length = 0.0;
};

struct SimResult {
    std::vector<Estimate> wait;
    std::vector<Estimate> station_size;
    std::vector<Estimate> orbit_queue;
    Estimate weighted_wait;
    Estimate workload;
    double mean_cycle_length = 0.0;
    long cycles = 0;              // measured cycles (warmup excluded)
    std::vector<long> served;     // total served per station
    std::vector<BatchMeans> per_batch;
    std::vector<GlueSample> glue_log;
    // Discipline self-checks, counted over the whole run including warmup.
    // Always zero for a correct engine: customers arriving during their
    // station's visit must wait for a later cycle, and customers arriving
    // during their station's glue period are served in the very next visit.
    long gated_violations = 0;
    long glue_violations = 0;
};

// Cycle-driven discrete-event run. Each cycle visits every station once:
// glue period (orbit customers stick iff an exponential retrial clock rings
// within the realized glue length; new arrivals stick immediately), gated
// visit serving exactly the stuck customers, then switchover. Waiting time
// is service start minus arrival. Instability is not an error; it surfaces
// as drifting batch means.
SimResult simulate(const SimConfig& cfg);

struct PclCheck {
    double analytic = 0.0;  // conservation-law right-hand side
    double simulated = 0.0; // simulated weighted wait sum
    double lower = 0.0;
    double upper = 0.0;
    bool pass = false; // analytic value inside the simulated interval
};

// Checks the simulated weighted wait sum against the exact conservation law.
PclCheck verify_pcl(const SimResult& result, const SystemConfig& cfg);

// 97.5% Student-t quantile backing the confidence intervals.
double t_quantile_975(int dof);

} // namespace pollsys
