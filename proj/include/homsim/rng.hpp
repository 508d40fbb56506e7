#pragma once

#include <cstdint>
#include <random>

#include "homsim/common.hpp"

namespace homsim {

// Deterministic random layer. mt19937_64 is bit-stable across platforms by
// the standard; the distributions here are hand-rolled because the stdlib
// ones (poisson, normal) are implementation-defined and would break the
// byte-identical-artifacts promise.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    // uniform in [0, 1) with 53-bit resolution
    double uniform() {
        return (eng_() >> 11) * (1.0 / 9007199254740992.0);
    }

    // strictly positive uniform, for logs
    double uniform_pos() {
        double u;
        do { u = uniform(); } while (u <= 0.0);
        return u;
    }

    double normal();                      // Box-Muller, cached spare
    // exact sampler: Knuth product for small means, transformed rejection
    // (PTRS) for large ones
    std::uint64_t poisson(double mean);

private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace homsim
