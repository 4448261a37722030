#pragma once

#include <cstdint>
#include <random>

namespace gfou {

/// A named, independently seeded random stream.
///
/// Stream (seed, id) is a pure function of its two integers, so replication r
/// of an experiment can be generated on any worker in any order and still
/// produce the same numbers. A stream must not be shared between threads.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed, std::uint64_t stream_id = 0);

    double normal() { return normal_(engine_); }
    /// Uniform on the open interval (0, 1).
    double uniform();
    double exponential() { return exponential_(engine_); }
    std::uint64_t poisson(double mean);
    std::uint64_t next_u64() { return engine_(); }

    std::mt19937_64& engine() { return engine_; }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    /// Child stream, deterministic in (this stream's seed/id, child).
    RandomStream derive(std::uint64_t child) const;

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::exponential_distribution<double> exponential_{1.0};
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace gfou
