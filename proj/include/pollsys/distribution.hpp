#pragma once

namespace pollsys {

enum class DistKind { deterministic, exponential, gamma };

// Nonnegative duration distribution (service, switchover or glue period).
// Three families cover every supported experiment; deterministic is kept
// exact rather than approximated by a low-variance gamma so that golden
// results stay bit-stable. The (mean, raw_moment, lst) surface is the
// extension point if phase-type distributions are ever added.
class DistributionSpec {
public:
    static DistributionSpec deterministic(double value);
    static DistributionSpec exponential(double mean);
    static DistributionSpec gamma(double shape, double scale);

    DistKind kind() const { return kind_; }

    double mean() const;
    double variance() const;
    double second_moment() const;

    // E[X^n]; n up to max_moment_order (series construction needs several
    // orders beyond the truncation cap in use).
    double raw_moment(int order) const;

    // E[exp(-s X)]. Defined on the full analytic domain of each family
    // (deterministic: all s; exponential mean mu: s > -1/mu; gamma: s >
    // -1/scale) so that callers may difference it across s = 0; throws
    // outside that domain. Analysis code only ever passes s >= 0.
    double lst(double s) const;

    // Parameter accessors for serialization; each is valid only for the
    // matching kind and throws otherwise.
    double det_value() const;
    double exp_mean() const;
    double gamma_shape() const;
    double gamma_scale() const;

    bool operator==(const DistributionSpec&) const = default;

    static constexpr int max_moment_order = 16;

private:
    DistributionSpec(DistKind kind, double a, double b);

    DistKind kind_;
    double a_; // deterministic: value; exponential: mean; gamma: shape
    double b_; // gamma: scale; unused otherwise
};

} // namespace pollsys
