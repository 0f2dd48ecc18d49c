#include "pollsys/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pollsys/errors.hpp"
#include "pollsys/pcl.hpp"
#include "pollsys/rng.hpp"

namespace pollsys {

namespace {

constexpr double kNever = std::numeric_limits<double>::infinity();

// What the customer's own station was doing when the customer arrived.
enum class ArrivalPhase : char { own_glue, own_visit, elsewhere };

struct Customer {
    double arrival = 0.0;   // when it entered the system
    double work = 0.0;      // service requirement, sampled at arrival
    double order_key = 0.0; // within-visit service order epoch
    long cycle = 0;         // cycle index of the arrival
    ArrivalPhase phase = ArrivalPhase::elsewhere;
};

struct StationState {
    std::vector<Customer> orbit;
    std::vector<Customer> gated;
    double next_arrival = kNever;
};

// Accumulators for one batch (or the warmup stretch, which is discarded).
struct Accumulator {
    std::vector<double> wait_sum;
    std::vector<long> served;
    std::vector<double> size_integral;
    std::vector<double> oq_integral;
    double workload_integral = 0.0;
    double start_time = 0.0;

    explicit Accumulator(int n)
        : wait_sum(n, 0.0), served(n, 0), size_integral(n, 0.0),
          oq_integral(n, 0.0) {}

    void reset(double t) {
        std::fill(wait_sum.begin(), wait_sum.end(), 0.0);
        std::fill(served.begin(), served.end(), 0);
        std::fill(size_integral.begin(), size_integral.end(), 0.0);
        std::fill(oq_integral.begin(), oq_integral.end(), 0.0);
        workload_integral = 0.0;
        start_time = t;
    }
};

class Engine {
public:
    explicit Engine(const SimConfig& cfg) : cfg_(cfg), acc_(cfg.system.size()) {
        int n = cfg.system.size();
        for (int i = 0; i < n; ++i) {
            auto station = static_cast<std::uint64_t>(i);
            arrivals_.emplace_back(cfg.seed, cfg.replication,
                                   StreamPurpose::arrivals, station);
            services_.emplace_back(cfg.seed, cfg.replication,
                                   StreamPurpose::services, station);
            switchovers_.emplace_back(cfg.seed, cfg.replication,
                                      StreamPurpose::switchovers, station);
            glues_.emplace_back(cfg.seed, cfg.replication,
                                StreamPurpose::glues, station);
            retrials_.emplace_back(cfg.seed, cfg.replication,
                                   StreamPurpose::retrials, station);
        }
        stations_.resize(n);
        count_.assign(n, 0);
        for (int i = 0; i < n; ++i) schedule_arrival(i);
    }

    SimResult run();

private:
    void schedule_arrival(int i) {
        double lambda = cfg_.system.stations[i].lambda;
        stations_[i].next_arrival =
            lambda > 0.0 ? now_ + arrivals_[i].exponential(1.0 / lambda) : kNever;
    }

    // Moves time forward to `until`, integrating statistics and handling
    // arrivals on the way. While `drain` is set the server works at rate 1.
    void advance(double until, bool drain) {
        int n = cfg_.system.size();
        while (now_ < until) {
            int next = -1;
            double t = until;
            for (int j = 0; j < n; ++j) {
                if (stations_[j].next_arrival < t) {
                    t = stations_[j].next_arrival;
                    next = j;
                }
            }
            double dt = t - now_;
            if (dt > 0.0) {
                for (int j = 0; j < n; ++j) {
                    acc_.size_integral[j] += count_[j] * dt;
                    acc_.oq_integral[j] += (count_[j] - (serving_ == j)) * dt;
                }
                acc_.workload_integral += workload_ * dt;
                if (drain) {
                    acc_.workload_integral -= 0.5 * dt * dt;
                    workload_ -= dt;
                    serving_remaining_ -= dt;
                }
                now_ = t;
            }
            if (next < 0) break;
            Customer c;
            c.arrival = t;
            c.work = services_[next].sample(cfg_.system.stations[next].service);
            c.order_key = t;
            c.cycle = cycle_index_;
            c.phase = next == in_glue_    ? ArrivalPhase::own_glue
                      : next == serving_  ? ArrivalPhase::own_visit
                                          : ArrivalPhase::elsewhere;
            workload_ += c.work;
            ++count_[next];
            (next == in_glue_ ? stations_[next].gated : stations_[next].orbit)
                .push_back(c);
            schedule_arrival(next);
        }
        now_ = until;
    }

    void glue_phase(int i) {
        const auto& st = cfg_.system.stations[i];
        double g = glues_[i].sample(st.glue);
        auto& orbit = stations_[i].orbit;
        auto& gated = stations_[i].gated;
        long orbit_before = static_cast<long>(orbit.size());
        long glued = 0;
        // Race every orbit customer's retrial clock against the glue length,
        // in orbit insertion order for reproducibility.
        std::vector<Customer> stay;
        stay.reserve(orbit.size());
        for (const Customer& c : orbit) {
            double ring = retrials_[i].exponential(1.0 / st.nu);
            if (ring < g) {
                Customer stuck = c;
                stuck.order_key = now_ + ring;
                gated.push_back(stuck);
                ++glued;
            } else {
                stay.push_back(c);
            }
        }
        orbit.swap(stay);
        in_glue_ = i;
        advance(now_ + g, false);
        in_glue_ = -1;
        if (cfg_.record_glue_log && collecting_)
            glue_log_.push_back({i, g, orbit_before, glued});
    }

    void visit_phase(int i) {
        auto& gated = stations_[i].gated;
        switch (cfg_.order) {
        case ServiceOrder::glue_epoch_fcfs:
            std::stable_sort(gated.begin(), gated.end(),
                             [](const Customer& a, const Customer& b) {
                                 return a.order_key < b.order_key;
                             });
            break;
        case ServiceOrder::arrival_fcfs:
            std::stable_sort(gated.begin(), gated.end(),
                             [](const Customer& a, const Customer& b) {
                                 return a.arrival < b.arrival;
                             });
            break;
        case ServiceOrder::glue_epoch_lcfs:
            std::stable_sort(gated.begin(), gated.end(),
                             [](const Customer& a, const Customer& b) {
                                 return a.order_key > b.order_key;
                             });
            break;
        }
        for (const Customer& c : gated) {
            // Discipline bookkeeping: a visit-time arrival must never be
            // served within its arrival cycle, and a glue-time arrival must
            // be served in the visit directly after its glue period.
            if (c.phase == ArrivalPhase::own_visit && c.cycle == cycle_index_)
                ++gated_violations_;
            if (c.phase == ArrivalPhase::own_glue && c.cycle != cycle_index_)
                ++glue_violations_;
            if (collecting_) {
                acc_.wait_sum[i] += now_ - c.arrival;
                ++acc_.served[i];
            }
            serving_ = i;
            serving_remaining_ = c.work;
            advance(now_ + c.work, true);
            // Cancel the accumulated rounding drift of the linear drain.
            workload_ -= serving_remaining_;
            serving_remaining_ = 0.0;
            if (workload_ < 0.0) workload_ = 0.0;
            serving_ = -1;
            --count_[i];
        }
        gated.clear();
    }

    void switchover_phase(int i) {
        double s = switchovers_[i].sample(cfg_.system.stations[i].switchover);
        advance(now_ + s, false);
    }

    BatchMeans finalize_batch(long cycles_in_batch) {
        int n = cfg_.system.size();
        double span = now_ - acc_.start_time;
        BatchMeans b;
        b.wait.resize(n);
        b.station_size.resize(n);
        b.orbit_queue.resize(n);
        b.served = acc_.served;
        for (int j = 0; j < n; ++j) {
            b.wait[j] = acc_.served[j] > 0 ? acc_.wait_sum[j] / acc_.served[j] : 0.0;
            b.station_size[j] = acc_.size_integral[j] / span;
            b.orbit_queue[j] = acc_.oq_integral[j] / span;
            double rho_j = cfg_.system.stations[j].lambda *
                           cfg_.system.stations[j].service.mean();
            b.weighted_wait += rho_j * b.wait[j];
        }
        b.workload = acc_.workload_integral / span;
        b.cycle_length = span / static_cast<double>(cycles_in_batch);
        acc_.reset(now_);
        return b;
    }

    SimConfig cfg_;
    std::vector<RngStream> arrivals_, services_, switchovers_, glues_, retrials_;
    std::vector<StationState> stations_;
    std::vector<long> count_; // customers present per station
    double now_ = 0.0;
    long cycle_index_ = 0;
    int in_glue_ = -1;
    int serving_ = -1;
    double serving_remaining_ = 0.0;
    double workload_ = 0.0;
    bool collecting_ = false;
    long gated_violations_ = 0;
    long glue_violations_ = 0;
    Accumulator acc_;
    std::vector<GlueSample> glue_log_;
};

Estimate summarize(const std::vector<double>& batch_values) {
    int b = static_cast<int>(batch_values.size());
    double mean = 0.0;
    for (double v : batch_values) mean += v;
    mean /= b;
    double var = 0.0;
    for (double v : batch_values) var += (v - mean) * (v - mean);
    var /= (b - 1);
    double half = t_quantile_975(b - 1) * std::sqrt(var / b);
    return {mean, mean - half, mean + half};
}

SimResult Engine::run() {
    int n = cfg_.system.size();
    long per_batch = cfg_.total_cycles / cfg_.batches;
    std::vector<BatchMeans> batches;
    long measured = 0;
    for (long cycle = 0; cycle < cfg_.warmup_cycles + cfg_.total_cycles; ++cycle) {
        cycle_index_ = cycle;
        if (cycle == cfg_.warmup_cycles) {
            collecting_ = true;
            acc_.reset(now_);
        }
        for (int i = 0; i < n; ++i) {
            glue_phase(i);
            visit_phase(i);
            switchover_phase(i);
        }
        if (collecting_ && ++measured % per_batch == 0)
            batches.push_back(finalize_batch(per_batch));
    }

    SimResult res;
    res.per_batch = batches;
    res.glue_log = std::move(glue_log_);
    res.cycles = measured;
    res.gated_violations = gated_violations_;
    res.glue_violations = glue_violations_;
    res.served.assign(n, 0);
    std::vector<double> column(batches.size());
    auto fill = [&](auto pick) {
        for (size_t b = 0; b < batches.size(); ++b) column[b] = pick(batches[b]);
        return summarize(column);
    };
    for (int i = 0; i < n; ++i) {
        res.wait.push_back(fill([&](const BatchMeans& b) { return b.wait[i]; }));
        res.station_size.push_back(
            fill([&](const BatchMeans& b) { return b.station_size[i]; }));
        res.orbit_queue.push_back(
            fill([&](const BatchMeans& b) { return b.orbit_queue[i]; }));
        for (const auto& b : batches) res.served[i] += b.served[i];
    }
    res.weighted_wait = fill([](const BatchMeans& b) { return b.weighted_wait; });
    res.workload = fill([](const BatchMeans& b) { return b.workload; });
    res.mean_cycle_length =
        fill([](const BatchMeans& b) { return b.cycle_length; }).value;
    return res;
}

} // namespace

SimResult simulate(const SimConfig& cfg) {
    validate(cfg.system);
    if (cfg.batches < 2)
        throw validation_error("at least two batches are required");
    if (cfg.total_cycles <= 0 || cfg.total_cycles % cfg.batches != 0)
        throw validation_error(
            "total cycles must be a positive multiple of the batch count");
    if (cfg.warmup_cycles < 0)
        throw validation_error("warmup cycle count cannot be negative");
    return Engine(cfg).run();
}

PclCheck verify_pcl(const SimResult& result, const SystemConfig& cfg) {
    PclCheck check;
    check.analytic = pcl_rhs(cfg).weighted_wait_sum;
    check.simulated = result.weighted_wait.value;
    check.lower = result.weighted_wait.lower;
    check.upper = result.weighted_wait.upper;
    check.pass = check.lower <= check.analytic && check.analytic <= check.upper;
    return check;
}

double t_quantile_975(int dof) {
    static constexpr double table[] = {
        12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
        2.201,  2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086,
        2.080,  2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042};
    if (dof < 1) throw validation_error("t quantile needs at least one degree");
    if (dof <= 30) return table[dof - 1];
    if (dof <= 40) return 2.021;
    if (dof <= 60) return 2.000;
    if (dof <= 120) return 1.980;
    return 1.960;
}

} // namespace pollsys
