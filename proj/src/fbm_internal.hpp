#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "fft_util.hpp"
#include "gfou/fbm.hpp"

namespace gfou::detail {

/// Exact sampler for n consecutive fGn increments of a fixed step.
class CirculantFgn {
public:
    CirculantFgn(const HurstIndex& h, std::size_t n, double step);

    std::size_t size() const { return n_; }
    std::vector<double> sample(RandomStream& rng) const;

private:
    std::size_t n_;
    std::unique_ptr<Fft> fft_;
    std::vector<double> sqrt_eigen_;
};

/// Uniform lattice description: times[i] = (first_index + i) * step.
struct Lattice {
    double step = 0.0;
    long first_index = 0;
    std::size_t count = 0;

    double time(std::size_t i) const { return static_cast<double>(first_index + static_cast<long>(i)) * step; }
    long last_index() const { return first_index + static_cast<long>(count) - 1; }
};

/// Recognizes `times` as a uniform lattice containing (or extendable to) 0.
/// Returns false when the points are not equally spaced multiples of a step.
bool detect_lattice(const std::vector<double>& times, Lattice& out);

/// FBM values on a lattice that contains 0 (count >= 2).
std::vector<double> sample_on_lattice(const HurstIndex& h, const Lattice& lat, const CirculantFgn& fgn,
                                      RandomStream& rng);

}  // namespace gfou::detail
