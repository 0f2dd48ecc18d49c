#pragma once

#include <cstddef>
#include <vector>

#include "pollsys/distribution.hpp"

namespace pollsys {

// One station of the polling system. The switchover distribution is the
// travel time FROM this station to the next one in cyclic order.
struct StationParams {
    double lambda = 0.0;           // Poisson arrival rate
    double nu = 1.0;               // exponential retrial rate of the orbit
    DistributionSpec service = DistributionSpec::exponential(1.0);
    DistributionSpec switchover = DistributionSpec::deterministic(1.0);
    DistributionSpec glue = DistributionSpec::deterministic(1.0);
    double weight = 1.0;           // cost weight in optimization objectives

    bool operator==(const StationParams&) const = default;
};

struct SystemConfig {
    std::vector<StationParams> stations;

    int size() const { return static_cast<int>(stations.size()); }

    bool operator==(const SystemConfig&) const = default;
};

struct Utilizations {
    std::vector<double> per_station;
    double total = 0.0;
};

// Normalizes a (possibly negative or overflowing) cyclic station index into
// [0, n). The single place where wrap-around arithmetic lives.
inline int mod_station(int i, int n) {
    int r = i % n;
    return r < 0 ? r + n : r;
}

// Full validity check: at least one station, lambda >= 0, nu > 0, weight > 0,
// positive service/switchover/glue means, and stability with margin
// (rho < 1 - 1e-12). Throws validation_error naming the offending station.
void validate(const SystemConfig& cfg);

Utilizations utilizations(const SystemConfig& cfg);

// Mean cycle length: total idle time per cycle divided by 1 - rho.
double mean_cycle(const SystemConfig& cfg);

struct IdleMoments {
    double mean = 0.0;          // E[sum of all switchover and glue periods]
    double second_moment = 0.0; // E[(that sum)^2], using mutual independence
};

IdleMoments total_idle_moments(const SystemConfig& cfg);

} // namespace pollsys
