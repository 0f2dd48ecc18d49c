#pragma once

#include <vector>

#include "pollsys/config.hpp"

namespace pollsys {

// Truncated univariate power series F(u) = sum a_n u^n, exact on coefficients
// up to the truncation order. Every multivariate generating function in the
// model depends on z only through u(z) = sum lambda_j (1 - z_j), so all
// derivative bookkeeping reduces to these plus one multinomial mapping.
class USeries {
public:
    explicit USeries(int order);                    // zero series
    USeries(std::vector<double> coeffs);            // from a_0..a_K

    int order() const { return static_cast<int>(c_.size()) - 1; }
    double operator[](int n) const { return c_[static_cast<size_t>(n)]; }
    double& operator[](int n) { return c_[static_cast<size_t>(n)]; }

    USeries& operator+=(const USeries& o);
    USeries& operator-=(const USeries& o);
    USeries& operator*=(double t);
    friend USeries operator+(USeries a, const USeries& b) { return a += b; }
    friend USeries operator-(USeries a, const USeries& b) { return a -= b; }
    friend USeries operator*(USeries a, double t) { return a *= t; }
    friend USeries operator*(double t, USeries a) { return a *= t; }
    USeries operator*(const USeries& o) const;      // truncated convolution

    // F(u)/u for series with zero constant term. Constant terms below 1e-12
    // in absolute value are treated as roundoff and dropped; anything larger
    // means the caller divided a series that genuinely does not vanish at 0.
    USeries divided_by_u() const;

    USeries pow(int exponent) const;

private:
    std::vector<double> c_;
};

// Multi-index (l, m): per-station derivative orders l plus the scalar order m
// of the queue-marking variable.
struct MultiIndex {
    std::vector<int> l;
    int m = 0;

    int total_l() const;
    int total() const { return total_l() + m; }

    bool operator==(const MultiIndex&) const = default;
};

// Series of the transform composed with u: a_n = (-1)^n E[X^n] / n!.
USeries series_from_lst(const DistributionSpec& d, int order);

// Chain-rule mapping: given the coefficient a_{|l|} of F(u), returns the
// scaled multivariate derivative (1/l!) d^l F(u(z)) at z = 1, which equals
// (-1)^{|l|} (|l|!/l!) prod_j lambda_j^{l_j} a_{|l|}.
double multi_coeff(double a, const std::vector<int>& l,
                   const std::vector<double>& lambdas);

// Coefficient tensors of the composite generating functions at z = 1.
// i is a zero-based station index; l has one entry per station.
double gamma_coeff(const SystemConfig& cfg, int i, int m, const std::vector<int>& l);
double eta_coeff(const SystemConfig& cfg, int i, int m, const std::vector<int>& l);
double zeta_coeff(const SystemConfig& cfg, int i, const std::vector<int>& l);
double delta_coeff(const SystemConfig& cfg, int i, int m, const std::vector<int>& l);

// Precomputed per-station series bank for the moment engine: building the
// underlying series once and reading many coefficients is much cheaper than
// recomputing them per multi-index inside the fixed-point iteration.
class CoeffBank {
public:
    // max_m: largest tensor power needed; order: series truncation (>= the
    // largest |l| that will be requested).
    CoeffBank(const SystemConfig& cfg, int max_m, int order);

    double gamma(int i, int m, const std::vector<int>& l) const;
    double eta(int i, int m, const std::vector<int>& l) const;
    double zeta(int i, const std::vector<int>& l) const;
    double delta(int i, int m, const std::vector<int>& l) const;

    int max_m() const { return max_m_; }

private:
    std::vector<double> lambdas_;
    int max_m_;
    int order_;
    // indexed [station][m]
    std::vector<std::vector<USeries>> gamma_, eta_, delta_;
    std::vector<USeries> zeta_;
};

} // namespace pollsys
