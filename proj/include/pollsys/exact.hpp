#pragma once

#include <functional>
#include <map>
#include <vector>

#include "pollsys/config.hpp"
#include "pollsys/series.hpp"

namespace pollsys {

// Scaled moments of the station-size vector at glue-period-end epochs,
// indexed by station, orbit multi-index l (one slot per station) and queue
// order m. Entries are stored per station under the key l with m appended,
// so deterministic map order doubles as a stable iteration order.
class PhiTable {
  public:
    PhiTable(const SystemConfig& cfg, int max_order);

    double at(int station, const std::vector<int>& l, int m) const;
    bool has(int station, const std::vector<int>& l, int m) const;
    void set(int station, const std::vector<int>& l, int m, double value);

    const std::map<std::vector<int>, double>& station_entries(int station) const;
    const SystemConfig& config() const { return cfg_; }
    int max_order() const { return max_order_; }

    long iterations_used = 0;
    double final_residual = 0.0;
    double tolerance = 0.0;

  private:
    SystemConfig cfg_;
    int max_order_;
    std::vector<std::map<std::vector<int>, double>> entries_;
};

struct PhiIterationOptions {
    double tolerance = 1e-12;
    long max_iterations = 1000000;
    // Solve total order 1 with the generic fixed point instead of the
    // closed forms; used to cross-check the two derivations.
    bool iterate_first_order = false;
    // Observer called once per sweep with (total order, iteration number,
    // max |change|, min signed change); min signed change >= 0 certifies
    // the monotone convergence property.
    std::function<void(int, long, double, double)> on_iteration;
};

// Closed-form entries of total order <= 1. Requires exponential glue at
// every station.
PhiTable phi_first_moments(const SystemConfig& cfg);

// Complete table to total order K: closed forms for order <= 1, then one
// monotone fixed-point solve per total order.
PhiTable phi_higher_moments(const SystemConfig& cfg, int max_order,
                            const PhiIterationOptions& opts = {});

// Scaled station-size moments at glue-begin epochs (g), service-begin
// epochs (v) and switchover-begin epochs (s), derived from a Phi table.
// psi_v at (l, m) consumes Phi entries up to total order |l|+m+1, so the
// table must extend one order past the requested moments.
class PsiMoments {
  public:
    PsiMoments(const SystemConfig& cfg, PhiTable phi);

    double psi_g(int station, const std::vector<int>& l, int m) const;
    double psi_v(int station, const std::vector<int>& l, int m) const;
    double psi_s(int station, const std::vector<int>& l) const;
    double theta(int station, const std::vector<int>& l) const;

    const PhiTable& phi() const { return phi_; }

  private:
    void require_order(int needed) const;

    PhiTable phi_;
    CoeffBank bank_;
    std::vector<double> gamma_;
    std::vector<double> rho_;
    double mean_cycle_;
};

struct StationStats {
    std::vector<double> mean_orbit;        // E[M_i^o]
    std::vector<double> mean_orbit_queue;  // E[M_i^oq]
    std::vector<double> mean_total;        // E[M_i]
    std::vector<double> mean_wait;         // E[W_i]
    // Second-order outputs; filled only when requested.
    std::vector<double> variance;
    std::vector<double> scv;
    std::vector<std::vector<double>> correlation;
};

StationStats station_size_stats(const SystemConfig& cfg,
                                bool with_second_moments = true);

std::vector<double> exact_mean_waiting(const SystemConfig& cfg);

} // namespace pollsys
