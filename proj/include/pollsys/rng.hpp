#pragma once

#include <cstdint>
#include <random>

#include "pollsys/distribution.hpp"

namespace pollsys {

// What a stream's draws are spent on. Every purpose-station pair owns a
// disjoint stream, so changing how one quantity is sampled never disturbs
// the draws behind any other quantity.
enum class StreamPurpose : std::uint64_t {
    arrivals = 1,
    services = 2,
    switchovers = 3,
    glues = 4,
    retrials = 5,
};

// splitmix64 finalizer; the documented hash behind stream derivation.
std::uint64_t mix64(std::uint64_t x);

// A seeded random stream with fixed, documented samplers so results are
// reproducible bit-for-bit on one platform:
//   uniform:     53-bit mantissa from the top bits of mt19937_64, in (0,1);
//   exponential: inversion, -mean*log(u);
//   normal:      Marsaglia polar, first coordinate returned first;
//   gamma:       Marsaglia-Tsang squeeze for shape >= 1, with the
//                u^(1/shape) boost below shape 1;
//   deterministic values consume no draws.
// The engine is seeded from mix64 applied to the chain
// (seed, replication, purpose, station), giving disjoint streams per key.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t replication,
              StreamPurpose purpose, std::uint64_t station);

    double uniform();
    double exponential(double mean);
    double normal();
    double gamma(double shape, double scale);
    double sample(const DistributionSpec& spec);

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_normal_ = 0.0;
};

} // namespace pollsys
