#include "pollsys/rng.hpp"

#include <cmath>

#include "pollsys/errors.hpp"

namespace pollsys {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t replication,
                     StreamPurpose purpose, std::uint64_t station) {
    std::uint64_t key = mix64(seed);
    key = mix64(key ^ replication);
    key = mix64(key ^ static_cast<std::uint64_t>(purpose));
    key = mix64(key ^ station);
    engine_.seed(key);
}

double RngStream::uniform() {
    // Top 53 bits, centered into (0, 1) so logarithms stay finite.
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::exponential(double mean) { return -mean * std::log(uniform()); }

double RngStream::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_normal_;
    }
    double x, y, s;
    do {
        x = 2.0 * uniform() - 1.0;
        y = 2.0 * uniform() - 1.0;
        s = x * x + y * y;
    } while (s >= 1.0 || s == 0.0);
    double scale = std::sqrt(-2.0 * std::log(s) / s);
    spare_normal_ = y * scale;
    have_spare_ = true;
    return x * scale;
}

double RngStream::gamma(double shape, double scale) {
    if (shape < 1.0) {
        double boost = std::pow(uniform(), 1.0 / shape);
        return gamma(shape + 1.0, scale) * boost;
    }
    double d = shape - 1.0 / 3.0;
    double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        double u = uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
            return d * v * scale;
    }
}

double RngStream::sample(const DistributionSpec& spec) {
    switch (spec.kind()) {
    case DistKind::deterministic: return spec.det_value();
    case DistKind::exponential: return exponential(spec.exp_mean());
    case DistKind::gamma: return gamma(spec.gamma_shape(), spec.gamma_scale());
    }
    throw numerical_error("unreachable distribution kind");
}

} // namespace pollsys
