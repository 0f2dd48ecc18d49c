#include "pollsys/config.hpp"

#include <string>

#include "pollsys/errors.hpp"

namespace pollsys {

namespace {
constexpr double stability_margin = 1e-12;
}

void validate(const SystemConfig& cfg) {
    if (cfg.stations.empty())
        throw validation_error("config needs at least one station");
    for (int i = 0; i < cfg.size(); ++i) {
        const StationParams& st = cfg.stations[static_cast<size_t>(i)];
        const std::string where = "station " + std::to_string(i + 1) + ": ";
        if (!(st.lambda >= 0.0))
            throw validation_error(where + "lambda must be >= 0");
        if (!(st.nu > 0.0))
            throw validation_error(where + "nu must be > 0");
        if (!(st.weight > 0.0))
            throw validation_error(where + "weight must be > 0");
        if (!(st.service.mean() > 0.0))
            throw validation_error(where + "service mean must be > 0");
        if (!(st.switchover.mean() > 0.0))
            throw validation_error(where + "switchover mean must be > 0");
        if (!(st.glue.mean() > 0.0))
            throw validation_error(where + "glue mean must be > 0");
    }
    double rho = utilizations(cfg).total;
    if (!(rho < 1.0 - stability_margin))
        throw validation_error("unstable config: total utilization " +
                               std::to_string(rho) + " not below 1");
}

Utilizations utilizations(const SystemConfig& cfg) {
    Utilizations u;
    u.per_station.reserve(cfg.stations.size());
    for (const StationParams& st : cfg.stations) {
        double rho_i = st.lambda * st.service.mean();
        u.per_station.push_back(rho_i);
        u.total += rho_i;
    }
    return u;
}

double mean_cycle(const SystemConfig& cfg) {
    double rho = utilizations(cfg).total;
    if (!(rho < 1.0 - stability_margin))
        throw validation_error("mean cycle undefined: utilization at or above 1");
    double idle = 0.0;
    for (const StationParams& st : cfg.stations)
        idle += st.glue.mean() + st.switchover.mean();
    return idle / (1.0 - rho);
}

IdleMoments total_idle_moments(const SystemConfig& cfg) {
    IdleMoments m;
    double var = 0.0;
    for (const StationParams& st : cfg.stations) {
        m.mean += st.switchover.mean() + st.glue.mean();
        var += st.switchover.variance() + st.glue.variance();
    }
    m.second_moment = var + m.mean * m.mean;
    return m;
}

} // namespace pollsys
