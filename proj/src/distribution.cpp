#include "pollsys/distribution.hpp"

#include <cmath>
#include <string>

#include "pollsys/errors.hpp"

namespace pollsys {

DistributionSpec::DistributionSpec(DistKind kind, double a, double b)
    : kind_(kind), a_(a), b_(b) {}

DistributionSpec DistributionSpec::deterministic(double value) {
    if (!(value >= 0.0))
        throw validation_error("deterministic value must be >= 0");
    return {DistKind::deterministic, value, 0.0};
}

DistributionSpec DistributionSpec::exponential(double mean) {
    if (!(mean > 0.0))
        throw validation_error("exponential mean must be > 0");
    return {DistKind::exponential, mean, 0.0};
}

DistributionSpec DistributionSpec::gamma(double shape, double scale) {
    if (!(shape > 0.0) || !(scale > 0.0))
        throw validation_error("gamma shape and scale must be > 0");
    return {DistKind::gamma, shape, scale};
}

double DistributionSpec::mean() const {
    switch (kind_) {
    case DistKind::deterministic: return a_;
    case DistKind::exponential:   return a_;
    case DistKind::gamma:         return a_ * b_;
    }
    return 0.0;
}

double DistributionSpec::variance() const {
    switch (kind_) {
    case DistKind::deterministic: return 0.0;
    case DistKind::exponential:   return a_ * a_;
    case DistKind::gamma:         return a_ * b_ * b_;
    }
    return 0.0;
}

double DistributionSpec::second_moment() const {
    return variance() + mean() * mean();
}

double DistributionSpec::raw_moment(int order) const {
    if (order < 0 || order > max_moment_order)
        throw numerical_error("raw moment order " + std::to_string(order) +
                              " outside supported range [0, " +
                              std::to_string(max_moment_order) + "]");
    if (order == 0) return 1.0;
    switch (kind_) {
    case DistKind::deterministic:
        return std::pow(a_, order);
    case DistKind::exponential: {
        double m = 1.0;
        for (int j = 1; j <= order; ++j) m *= j * a_;
        return m;
    }
    case DistKind::gamma: {
        // E[X^n] = scale^n * shape (shape+1) ... (shape+n-1)
        double m = 1.0;
        for (int j = 0; j < order; ++j) m *= (a_ + j) * b_;
        return m;
    }
    }
    return 0.0;
}

double DistributionSpec::lst(double s) const {
    switch (kind_) {
    case DistKind::deterministic:
        return std::exp(-s * a_);
    case DistKind::exponential: {
        double rate = 1.0 / a_;
        if (!(rate + s > 0.0))
            throw validation_error("exponential lst outside analytic domain");
        return rate / (rate + s);
    }
    case DistKind::gamma: {
        double base = 1.0 + b_ * s;
        if (!(base > 0.0))
            throw validation_error("gamma lst outside analytic domain");
        return std::pow(base, -a_);
    }
    }
    return 0.0;
}

double DistributionSpec::det_value() const {
    if (kind_ != DistKind::deterministic)
        throw validation_error("det_value on non-deterministic distribution");
    return a_;
}

double DistributionSpec::exp_mean() const {
    if (kind_ != DistKind::exponential)
        throw validation_error("exp_mean on non-exponential distribution");
    return a_;
}

double DistributionSpec::gamma_shape() const {
    if (kind_ != DistKind::gamma)
        throw validation_error("gamma_shape on non-gamma distribution");
    return a_;
}

double DistributionSpec::gamma_scale() const {
    if (kind_ != DistKind::gamma)
        throw validation_error("gamma_scale on non-gamma distribution");
    return b_;
}

} // namespace pollsys
