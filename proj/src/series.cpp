#include "pollsys/series.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "pollsys/errors.hpp"

namespace pollsys {

namespace {
constexpr double division_residual_cap = 1e-12;
}

USeries::USeries(int order) : c_(static_cast<size_t>(order) + 1, 0.0) {}

USeries::USeries(std::vector<double> coeffs) : c_(std::move(coeffs)) {
    if (c_.empty()) c_.push_back(0.0);
}

USeries& USeries::operator+=(const USeries& o) {
    c_.resize(std::max(c_.size(), o.c_.size()), 0.0);
    for (size_t n = 0; n < o.c_.size(); ++n) c_[n] += o.c_[n];
    return *this;
}

USeries& USeries::operator-=(const USeries& o) {
    c_.resize(std::max(c_.size(), o.c_.size()), 0.0);
    for (size_t n = 0; n < o.c_.size(); ++n) c_[n] -= o.c_[n];
    return *this;
}

USeries& USeries::operator*=(double t) {
    for (double& a : c_) a *= t;
    return *this;
}

USeries USeries::operator*(const USeries& o) const {
    USeries r(std::min(order() + o.order(), std::max(order(), o.order())));
    // truncate to the larger of the two operand orders: callers size their
    // inputs to the order they need out
    for (size_t i = 0; i < c_.size(); ++i) {
        if (c_[i] == 0.0) continue;
        size_t jmax = std::min(o.c_.size(), r.c_.size() - i);
        for (size_t j = 0; j < jmax; ++j)
            r.c_[i + j] += c_[i] * o.c_[j];
    }
    return r;
}

USeries USeries::divided_by_u() const {
    if (std::abs(c_[0]) > division_residual_cap)
        throw numerical_error(
            "division by u of a series with nonzero constant term " +
            std::to_string(c_[0]));
    USeries r(order());
    for (int n = 1; n <= order(); ++n) r[n - 1] = (*this)[n];
    return r;
}

USeries USeries::pow(int exponent) const {
    USeries r(order());
    r[0] = 1.0;
    for (int e = 0; e < exponent; ++e) r = r * (*this);
    return r;
}

int MultiIndex::total_l() const {
    int s = 0;
    for (int v : l) s += v;
    return s;
}

USeries series_from_lst(const DistributionSpec& d, int order) {
    USeries s(order);
    double fact = 1.0;
    for (int n = 0; n <= order; ++n) {
        if (n > 0) fact *= n;
        s[n] = (n % 2 ? -1.0 : 1.0) * d.raw_moment(n) / fact;
    }
    return s;
}

double multi_coeff(double a, const std::vector<int>& l,
                   const std::vector<double>& lambdas) {
    int total = 0;
    double factor = 1.0;
    for (size_t j = 0; j < l.size(); ++j) {
        for (int v = 1; v <= l[j]; ++v) {
            ++total;
            // accumulate (|l|! / l!) prod lambda^l incrementally: each unit of
            // l_j contributes (running total) / v * lambda_j
            factor *= static_cast<double>(total) / v * lambdas[j];
        }
    }
    double sign = (total % 2) ? -1.0 : 1.0;
    return sign * factor * a;
}

namespace {

std::vector<double> arrival_rates(const SystemConfig& cfg) {
    std::vector<double> ls;
    ls.reserve(cfg.stations.size());
    for (const auto& st : cfg.stations) ls.push_back(st.lambda);
    return ls;
}

int total_of(const std::vector<int>& l) {
    int s = 0;
    for (int v : l) s += v;
    return s;
}

// (beta_i - 1)^m sigma_i as a u-series
USeries gamma_series(const SystemConfig& cfg, int i, int m, int order) {
    const auto& st = cfg.stations[static_cast<size_t>(i)];
    USeries beta1 = series_from_lst(st.service, order);
    beta1[0] -= 1.0;
    return beta1.pow(m) * series_from_lst(st.switchover, order);
}

// -(beta_i - 1)^{m+1} / u
USeries eta_series(const SystemConfig& cfg, int i, int m, int order) {
    const auto& st = cfg.stations[static_cast<size_t>(i)];
    USeries beta1 = series_from_lst(st.service, order + 1);
    beta1[0] -= 1.0;
    return (beta1.pow(m + 1) * -1.0).divided_by_u();
}

// (1 - sigma_i) / u
USeries zeta_series(const SystemConfig& cfg, int i, int order) {
    const auto& st = cfg.stations[static_cast<size_t>(i)];
    USeries s = series_from_lst(st.switchover, order + 1) * -1.0;
    s[0] += 1.0;
    return s.divided_by_u();
}

// (beta_i - 1)^m
USeries delta_series(const SystemConfig& cfg, int i, int m, int order) {
    const auto& st = cfg.stations[static_cast<size_t>(i)];
    USeries beta1 = series_from_lst(st.service, order);
    beta1[0] -= 1.0;
    return beta1.pow(m);
}

} // namespace

double gamma_coeff(const SystemConfig& cfg, int i, int m, const std::vector<int>& l) {
    int k = total_of(l);
    return multi_coeff(gamma_series(cfg, i, m, k)[k], l, arrival_rates(cfg));
}

double eta_coeff(const SystemConfig& cfg, int i, int m, const std::vector<int>& l) {
    int k = total_of(l);
    return multi_coeff(eta_series(cfg, i, m, k)[k], l, arrival_rates(cfg));
}

double zeta_coeff(const SystemConfig& cfg, int i, const std::vector<int>& l) {
    int k = total_of(l);
    return multi_coeff(zeta_series(cfg, i, k)[k], l, arrival_rates(cfg));
}

double delta_coeff(const SystemConfig& cfg, int i, int m, const std::vector<int>& l) {
    int k = total_of(l);
    return multi_coeff(delta_series(cfg, i, m, k)[k], l, arrival_rates(cfg));
}

CoeffBank::CoeffBank(const SystemConfig& cfg, int max_m, int order)
    : lambdas_(arrival_rates(cfg)), max_m_(max_m), order_(order) {
    int n = cfg.size();
    gamma_.reserve(static_cast<size_t>(n));
    eta_.reserve(static_cast<size_t>(n));
    delta_.reserve(static_cast<size_t>(n));
    zeta_.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        std::vector<USeries> gs, es, ds;
        for (int m = 0; m <= max_m; ++m) {
            gs.push_back(gamma_series(cfg, i, m, order));
            es.push_back(eta_series(cfg, i, m, order));
            ds.push_back(delta_series(cfg, i, m, order));
        }
        gamma_.push_back(std::move(gs));
        eta_.push_back(std::move(es));
        delta_.push_back(std::move(ds));
        zeta_.push_back(zeta_series(cfg, i, order));
    }
}

double CoeffBank::gamma(int i, int m, const std::vector<int>& l) const {
    int k = total_of(l);
    return multi_coeff(gamma_[static_cast<size_t>(i)][static_cast<size_t>(m)][k],
                       l, lambdas_);
}

double CoeffBank::eta(int i, int m, const std::vector<int>& l) const {
    int k = total_of(l);
    return multi_coeff(eta_[static_cast<size_t>(i)][static_cast<size_t>(m)][k],
                       l, lambdas_);
}

double CoeffBank::zeta(int i, const std::vector<int>& l) const {
    int k = total_of(l);
    return multi_coeff(zeta_[static_cast<size_t>(i)][k], l, lambdas_);
}

double CoeffBank::delta(int i, int m, const std::vector<int>& l) const {
    int k = total_of(l);
    return multi_coeff(delta_[static_cast<size_t>(i)][static_cast<size_t>(m)][k],
                       l, lambdas_);
}

} // namespace pollsys
