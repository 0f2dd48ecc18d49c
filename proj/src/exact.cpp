#include "pollsys/exact.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "pollsys/errors.hpp"

namespace pollsys {
namespace {

void check_exponential_glue(const SystemConfig& cfg) {
    for (int i = 0; i < cfg.size(); ++i) {
        if (cfg.stations[static_cast<size_t>(i)].glue.kind() != DistKind::exponential) {
            std::ostringstream os;
            os << "station " << i + 1
               << ": exact moment analysis requires exponential glue periods";
            throw validation_error(os.str());
        }
    }
}

void check_positive_rates(const SystemConfig& cfg) {
    for (int i = 0; i < cfg.size(); ++i) {
        if (cfg.stations[static_cast<size_t>(i)].lambda <= 0.0) {
            std::ostringstream os;
            os << "station " << i + 1
               << ": exact occupancy moments require a positive arrival rate";
            throw validation_error(os.str());
        }
    }
}

// Visit every multi-index l >= 0 over n stations with |l| == total.
void for_each_l_of_total(int n, int total, std::vector<int>& cur,
                         const std::function<void(const std::vector<int>&)>& fn) {
    if (static_cast<int>(cur.size()) == n - 1) {
        cur.push_back(total);
        fn(cur);
        cur.pop_back();
        return;
    }
    for (int v = 0; v <= total; ++v) {
        cur.push_back(v);
        for_each_l_of_total(n, total - v, cur, fn);
        cur.pop_back();
    }
}

// Visit every componentwise l' <= l.
void for_each_sub_index(const std::vector<int>& l, std::vector<int>& cur,
                        const std::function<void(const std::vector<int>&)>& fn) {
    if (cur.size() == l.size()) {
        fn(cur);
        return;
    }
    for (int v = 0; v <= l[cur.size()]; ++v) {
        cur.push_back(v);
        for_each_sub_index(l, cur, fn);
        cur.pop_back();
    }
}

int index_total(const std::vector<int>& l) {
    int t = 0;
    for (int v : l) t += v;
    return t;
}

struct OrderEntry {
    int station;
    std::vector<int> l;
    int m;
};

void fill_closed_order_zero(PhiTable& tab, const SystemConfig& cfg) {
    std::vector<int> zero(static_cast<size_t>(cfg.size()), 0);
    for (int i = 0; i < cfg.size(); ++i)
        tab.set(i, zero, 0, cfg.stations[static_cast<size_t>(i)].glue.mean());
}

void fill_closed_order_one(PhiTable& tab, const SystemConfig& cfg) {
    int n = cfg.size();
    double cycle = mean_cycle(cfg);
    Utilizations util = utilizations(cfg);
    std::vector<int> zero(static_cast<size_t>(n), 0);

    for (int j = 0; j < n; ++j) {
        const auto& stj = cfg.stations[static_cast<size_t>(j)];
        tab.set(j, zero, 1, stj.lambda * stj.glue.mean() * cycle);

        // Orbit first moments, backward around the ring from station j.
        std::vector<int> unit = zero;
        unit[static_cast<size_t>(j)] = 1;
        double glue_j = stj.glue.mean();
        double prev = (stj.lambda / stj.nu) * (cycle - glue_j);
        tab.set(j, unit, 0, prev);
        for (int step = 1; step < n; ++step) {
            int i = mod_station(j - step, n);
            int next = mod_station(i + 1, n);
            const auto& sti = cfg.stations[static_cast<size_t>(i)];
            double glue_i = sti.glue.mean();
            double glue_next = cfg.stations[static_cast<size_t>(next)].glue.mean();
            double delta = (mod_station(j - 1, n) == i) ? 1.0 : 0.0;
            double value =
                (glue_i / glue_next) * prev +
                stj.lambda * glue_i *
                    ((delta - util.per_station[static_cast<size_t>(i)]) * cycle -
                     glue_next - sti.switchover.mean());
            tab.set(i, unit, 0, value);
            prev = value;
        }
    }
}

// One monotone fixed-point solve for all entries of the given total order.
// Jacobi sweeps: same-order reads come from the previous iterate, lower
// orders are constants already stored in the table.
void solve_order(PhiTable& tab, const SystemConfig& cfg, const CoeffBank& bank,
                 int order, const PhiIterationOptions& opts) {
    int n = cfg.size();
    std::vector<double> gamma(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        gamma[static_cast<size_t>(i)] =
            1.0 / cfg.stations[static_cast<size_t>(i)].glue.mean();

    std::vector<OrderEntry> entries;
    std::map<std::pair<int, std::vector<int>>, size_t> slot;
    for (int i = 0; i < n; ++i) {
        for (int lt = 0; lt <= order; ++lt) {
            std::vector<int> cur;
            for_each_l_of_total(n, lt, cur, [&](const std::vector<int>& l) {
                slot[{i, l}] = entries.size();
                entries.push_back({i, l, order - lt});
            });
        }
    }

    std::vector<double> prev(entries.size(), 0.0);
    std::vector<double> next(entries.size(), 0.0);

    long iter = 0;
    double max_change = 0.0;
    while (true) {
        ++iter;
        max_change = 0.0;
        double min_change = 0.0;
        for (size_t e = 0; e < entries.size(); ++e) {
            int i = entries[e].station;
            const std::vector<int>& l = entries[e].l;
            int m = entries[e].m;
            const auto& st = cfg.stations[static_cast<size_t>(i)];
            double denom = gamma[static_cast<size_t>(i)] +
                           l[static_cast<size_t>(i)] * st.nu;
            double v = 0.0;

            if (m >= 1) {
                v += st.lambda / denom * tab.at(i, l, m - 1);
                std::vector<int> up = l;
                ++up[static_cast<size_t>(i)];
                v += (l[static_cast<size_t>(i)] + 1) * st.nu / denom *
                     prev[slot.at({i, up})];
            }
            for (int j = 0; j < n; ++j) {
                if (j == i || l[static_cast<size_t>(j)] == 0) continue;
                std::vector<int> down = l;
                --down[static_cast<size_t>(j)];
                v += cfg.stations[static_cast<size_t>(j)].lambda / denom *
                     tab.at(i, down, m);
            }
            if (m == 0) {
                int ip = mod_station(i - 1, n);
                double coeff = gamma[static_cast<size_t>(ip)] / denom;
                std::vector<int> cur;
                for_each_sub_index(l, cur, [&](const std::vector<int>& lp) {
                    std::vector<int> dl(l.size());
                    for (size_t q = 0; q < l.size(); ++q) dl[q] = l[q] - lp[q];
                    int d = index_total(dl);
                    for (int k = 0; k < d; ++k)
                        v += coeff * tab.at(ip, lp, k) * bank.gamma(ip, k, dl);
                    v += coeff * prev[slot.at({ip, lp})] * bank.gamma(ip, d, dl);
                });
            }

            next[e] = v;
            double change = v - prev[e];
            max_change = std::max(max_change, std::abs(change));
            min_change = std::min(min_change, change);
        }
        if (opts.on_iteration) opts.on_iteration(order, iter, max_change, min_change);
        prev.swap(next);
        if (max_change < opts.tolerance) break;
        if (iter >= opts.max_iterations) {
            std::ostringstream os;
            os << "scaled-moment fixed point at order " << order
               << " did not converge in " << opts.max_iterations
               << " iterations (residual " << max_change << ")";
            throw numerical_error(os.str());
        }
    }

    for (size_t e = 0; e < entries.size(); ++e)
        tab.set(entries[e].station, entries[e].l, entries[e].m, prev[e]);
    tab.iterations_used += iter;
    tab.final_residual = max_change;
}

} // namespace

PhiTable::PhiTable(const SystemConfig& cfg, int max_order)
    : cfg_(cfg), max_order_(max_order),
      entries_(static_cast<size_t>(cfg.size())) {
    if (max_order < 0) throw validation_error("moment order cap must be >= 0");
}

double PhiTable::at(int station, const std::vector<int>& l, int m) const {
    std::vector<int> key = l;
    key.push_back(m);
    auto& bucket = entries_.at(static_cast<size_t>(station));
    auto it = bucket.find(key);
    if (it == bucket.end()) {
        std::ostringstream os;
        os << "scaled moment (station " << station + 1 << ", |l|+m "
           << index_total(l) + m << ") not present; table order is " << max_order_;
        throw validation_error(os.str());
    }
    return it->second;
}

bool PhiTable::has(int station, const std::vector<int>& l, int m) const {
    std::vector<int> key = l;
    key.push_back(m);
    auto& bucket = entries_.at(static_cast<size_t>(station));
    return bucket.find(key) != bucket.end();
}

void PhiTable::set(int station, const std::vector<int>& l, int m, double value) {
    std::vector<int> key = l;
    key.push_back(m);
    entries_.at(static_cast<size_t>(station))[key] = value;
}

const std::map<std::vector<int>, double>&
PhiTable::station_entries(int station) const {
    return entries_.at(static_cast<size_t>(station));
}

PhiTable phi_first_moments(const SystemConfig& cfg) {
    validate(cfg);
    check_exponential_glue(cfg);
    PhiTable tab(cfg, 1);
    fill_closed_order_zero(tab, cfg);
    fill_closed_order_one(tab, cfg);
    return tab;
}

PhiTable phi_higher_moments(const SystemConfig& cfg, int max_order,
                            const PhiIterationOptions& opts) {
    validate(cfg);
    check_exponential_glue(cfg);
    PhiTable tab(cfg, max_order);
    tab.tolerance = opts.tolerance;
    fill_closed_order_zero(tab, cfg);
    if (max_order < 1) return tab;

    CoeffBank bank(cfg, max_order, max_order);
    int first_iterated = 2;
    if (opts.iterate_first_order)
        first_iterated = 1;
    else
        fill_closed_order_one(tab, cfg);
    for (int k = first_iterated; k <= max_order; ++k)
        solve_order(tab, cfg, bank, k, opts);
    return tab;
}

PsiMoments::PsiMoments(const SystemConfig& cfg, PhiTable phi)
    : phi_(std::move(phi)), bank_(cfg, phi_.max_order(), phi_.max_order()),
      gamma_(static_cast<size_t>(cfg.size())),
      rho_(utilizations(cfg).per_station), mean_cycle_(mean_cycle(cfg)) {
    if (!(cfg == phi_.config()))
        throw validation_error("scaled-moment table was built for a different system");
    check_positive_rates(cfg);
    for (int i = 0; i < cfg.size(); ++i)
        gamma_[static_cast<size_t>(i)] =
            1.0 / cfg.stations[static_cast<size_t>(i)].glue.mean();
}

void PsiMoments::require_order(int needed) const {
    if (needed > phi_.max_order()) {
        std::ostringstream os;
        os << "epoch moments need scaled moments to order " << needed
           << " but the table stops at order " << phi_.max_order();
        throw validation_error(os.str());
    }
}

double PsiMoments::psi_g(int station, const std::vector<int>& l, int m) const {
    require_order(index_total(l) + m);
    return gamma_[static_cast<size_t>(station)] * phi_.at(station, l, m);
}

double PsiMoments::psi_v(int station, const std::vector<int>& l, int m) const {
    require_order(index_total(l) + m + 1);
    double acc = 0.0;
    std::vector<int> cur;
    for_each_sub_index(l, cur, [&](const std::vector<int>& lp) {
        std::vector<int> dl(l.size());
        for (size_t q = 0; q < l.size(); ++q) dl[q] = l[q] - lp[q];
        int d = index_total(dl);
        for (int k = 0; k <= d; ++k)
            acc += phi_.at(station, lp, m + k + 1) * bank_.eta(station, k, dl);
    });
    double rho = rho_[static_cast<size_t>(station)];
    return gamma_[static_cast<size_t>(station)] / (rho * mean_cycle_) * acc;
}

double PsiMoments::theta(int station, const std::vector<int>& l) const {
    require_order(index_total(l));
    double acc = 0.0;
    std::vector<int> cur;
    for_each_sub_index(l, cur, [&](const std::vector<int>& lp) {
        std::vector<int> dl(l.size());
        for (size_t q = 0; q < l.size(); ++q) dl[q] = l[q] - lp[q];
        int d = index_total(dl);
        for (int k = 0; k <= d; ++k)
            acc += phi_.at(station, lp, k) * bank_.delta(station, k, dl);
    });
    return acc;
}

double PsiMoments::psi_s(int station, const std::vector<int>& l) const {
    require_order(index_total(l));
    double acc = 0.0;
    std::vector<int> cur;
    for_each_sub_index(l, cur, [&](const std::vector<int>& lp) {
        std::vector<int> dl(l.size());
        for (size_t q = 0; q < l.size(); ++q) dl[q] = l[q] - lp[q];
        acc += theta(station, lp) * bank_.zeta(station, dl);
    });
    const auto& st = phi_.config().stations[static_cast<size_t>(station)];
    return gamma_[static_cast<size_t>(station)] / st.switchover.mean() * acc;
}

StationStats station_size_stats(const SystemConfig& cfg,
                                bool with_second_moments) {
    int order = with_second_moments ? 3 : 2;
    PsiMoments psi(cfg, phi_higher_moments(cfg, order));

    int n = cfg.size();
    double cycle = mean_cycle(cfg);
    Utilizations util = utilizations(cfg);
    std::vector<int> zero(static_cast<size_t>(n), 0);
    auto unit = [&](int i) {
        std::vector<int> l = zero;
        ++l[static_cast<size_t>(i)];
        return l;
    };
    auto glue_w = [&](int k) {
        return cfg.stations[static_cast<size_t>(k)].glue.mean() / cycle;
    };
    auto switch_w = [&](int k) {
        return cfg.stations[static_cast<size_t>(k)].switchover.mean() / cycle;
    };
    auto rho = [&](int k) { return util.per_station[static_cast<size_t>(k)]; };

    // Time-average moment of the marked counts, mixing the three epoch types
    // with weights (service, glue, switchover) fractions of the cycle.
    auto mix = [&](const std::vector<int>& l) {
        double acc = 0.0;
        for (int k = 0; k < n; ++k)
            acc += rho(k) * psi.psi_v(k, l, 0) + glue_w(k) * psi.psi_g(k, l, 0) +
                   switch_w(k) * psi.psi_s(k, l);
        return acc;
    };

    StationStats out;
    out.mean_orbit.resize(static_cast<size_t>(n));
    out.mean_orbit_queue.resize(static_cast<size_t>(n));
    out.mean_total.resize(static_cast<size_t>(n));
    out.mean_wait.resize(static_cast<size_t>(n));

    for (int i = 0; i < n; ++i) {
        double orbit = mix(unit(i));
        double oq = orbit + rho(i) * psi.psi_v(i, zero, 1) +
                    glue_w(i) * psi.psi_g(i, zero, 1);
        out.mean_orbit[static_cast<size_t>(i)] = orbit;
        out.mean_orbit_queue[static_cast<size_t>(i)] = oq;
        out.mean_total[static_cast<size_t>(i)] = oq + rho(i);
        out.mean_wait[static_cast<size_t>(i)] =
            oq / cfg.stations[static_cast<size_t>(i)].lambda;
    }
    if (!with_second_moments) return out;

    // Pairwise product moments; diagonal entries follow the factorial
    // convention (counts of ordered pairs), converted to variances below.
    std::vector<std::vector<double>> product(
        static_cast<size_t>(n), std::vector<double>(static_cast<size_t>(n)));
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            std::vector<int> lij = unit(i);
            ++lij[static_cast<size_t>(j)];
            if (i == j) {
                double orbit2 = 2.0 * mix(lij);
                double oq2 = orbit2 +
                             2.0 * (rho(i) * psi.psi_v(i, unit(i), 1) +
                                    glue_w(i) * psi.psi_g(i, unit(i), 1) +
                                    rho(i) * psi.psi_v(i, zero, 2) +
                                    glue_w(i) * psi.psi_g(i, zero, 2));
                product[static_cast<size_t>(i)][static_cast<size_t>(i)] =
                    oq2 + 2.0 * rho(i) * psi.psi_v(i, unit(i), 0) +
                    2.0 * rho(i) * psi.psi_v(i, zero, 1);
            } else {
                double orbit2 = mix(lij);
                double oq2 = orbit2 + rho(i) * psi.psi_v(i, unit(j), 1) +
                             rho(j) * psi.psi_v(j, unit(i), 1) +
                             glue_w(i) * psi.psi_g(i, unit(j), 1) +
                             glue_w(j) * psi.psi_g(j, unit(i), 1);
                double total = oq2 + rho(i) * psi.psi_v(i, unit(j), 0) +
                               rho(j) * psi.psi_v(j, unit(i), 0);
                product[static_cast<size_t>(i)][static_cast<size_t>(j)] = total;
                product[static_cast<size_t>(j)][static_cast<size_t>(i)] = total;
            }
        }
    }

    out.variance.resize(static_cast<size_t>(n));
    out.scv.resize(static_cast<size_t>(n));
    out.correlation.assign(static_cast<size_t>(n),
                           std::vector<double>(static_cast<size_t>(n), 1.0));
    for (int i = 0; i < n; ++i) {
        double mean = out.mean_total[static_cast<size_t>(i)];
        double var = product[static_cast<size_t>(i)][static_cast<size_t>(i)] +
                     mean - mean * mean;
        out.variance[static_cast<size_t>(i)] = var;
        out.scv[static_cast<size_t>(i)] = var / (mean * mean);
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            double cov = product[static_cast<size_t>(i)][static_cast<size_t>(j)] -
                         out.mean_total[static_cast<size_t>(i)] *
                             out.mean_total[static_cast<size_t>(j)];
            out.correlation[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                cov / std::sqrt(out.variance[static_cast<size_t>(i)] *
                                out.variance[static_cast<size_t>(j)]);
        }
    }
    return out;
}

std::vector<double> exact_mean_waiting(const SystemConfig& cfg) {
    return station_size_stats(cfg, false).mean_wait;
}

} // namespace pollsys
