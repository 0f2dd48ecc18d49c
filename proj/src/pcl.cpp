#include "pollsys/pcl.hpp"

#include <sstream>

#include "pollsys/errors.hpp"

namespace pollsys {
namespace {

// Odds form of the glue transform at the retrial rate: the expected number
// of additional full glue periods a customer waits before a successful
// retrial, per unit of probability mass that a retrial misses the window.
double retrial_odds(const StationParams& st, int index) {
    double transform = st.glue.lst(st.nu);
    if (transform >= 1.0) {
        std::ostringstream os;
        os << "station " << index + 1
           << ": glue period is degenerate at zero, retrials can never join";
        throw validation_error(os.str());
    }
    return transform / (1.0 - transform);
}

double second_moment_sum(const SystemConfig& cfg) {
    double acc = 0.0;
    for (const auto& st : cfg.stations)
        acc += st.lambda * st.service.raw_moment(2);
    return acc;
}

} // namespace

std::vector<double> leftover_work(const SystemConfig& cfg) {
    validate(cfg);
    double cycle = mean_cycle(cfg);
    Utilizations util = utilizations(cfg);
    std::vector<double> out(cfg.stations.size());
    for (int i = 0; i < cfg.size(); ++i) {
        const auto& st = cfg.stations[static_cast<size_t>(i)];
        double rho = util.per_station[static_cast<size_t>(i)];
        out[static_cast<size_t>(i)] =
            rho * rho * cycle +
            rho * retrial_odds(st, i) * (cycle - st.glue.mean());
    }
    return out;
}

PclReport pcl_rhs(const SystemConfig& cfg) {
    validate(cfg);
    Utilizations util = utilizations(cfg);
    IdleMoments idle = total_idle_moments(cfg);
    double rho = util.total;
    double rho_sq = 0.0;
    for (double r : util.per_station) rho_sq += r * r;

    PclReport rep;
    rep.leftover_work = leftover_work(cfg);
    rep.service_term = rho * second_moment_sum(cfg) / (2.0 * (1.0 - rho));
    rep.idle_term = rho * idle.second_moment / (2.0 * idle.mean);
    rep.cross_term = (rho * rho + rho_sq) * idle.mean / (2.0 * (1.0 - rho));
    double retrial = 0.0;
    for (int i = 0; i < cfg.size(); ++i) {
        const auto& st = cfg.stations[static_cast<size_t>(i)];
        retrial += util.per_station[static_cast<size_t>(i)] *
                   retrial_odds(st, i) *
                   (idle.mean / (1.0 - rho) - st.glue.mean());
    }
    rep.retrial_term = retrial;
    rep.weighted_wait_sum =
        rep.service_term + rep.idle_term + rep.cross_term + rep.retrial_term;
    return rep;
}

double residual_cycle(const SystemConfig& cfg) {
    validate(cfg);
    Utilizations util = utilizations(cfg);
    IdleMoments idle = total_idle_moments(cfg);
    double rho = util.total;
    if (rho <= 0.0)
        throw validation_error("residual cycle undefined for an empty system");
    double rho_sq = 0.0;
    for (double r : util.per_station) rho_sq += r * r;

    double served = second_moment_sum(cfg) / (2.0 * (1.0 - rho)) +
                    idle.second_moment / (2.0 * idle.mean) +
                    rho * idle.mean / (2.0 * (1.0 - rho));
    double unserved = idle.mean / (2.0 * (1.0 - rho));
    return (rho * served + rho_sq * unserved) / (rho + rho_sq);
}

ApproxReport approx_mean_waiting(const SystemConfig& cfg) {
    validate(cfg);
    Utilizations util = utilizations(cfg);
    double cycle = mean_cycle(cfg);

    ApproxReport rep;
    rep.residual_cycle = residual_cycle(cfg);
    rep.mean_wait.resize(cfg.stations.size());
    rep.retrial_multiplier.resize(cfg.stations.size());
    for (int i = 0; i < cfg.size(); ++i) {
        const auto& st = cfg.stations[static_cast<size_t>(i)];
        double odds = retrial_odds(st, i);
        rep.retrial_multiplier[static_cast<size_t>(i)] = odds;
        rep.mean_wait[static_cast<size_t>(i)] =
            (1.0 + util.per_station[static_cast<size_t>(i)]) * rep.residual_cycle +
            odds * (cycle - st.glue.mean());
    }
    return rep;
}

} // namespace pollsys
