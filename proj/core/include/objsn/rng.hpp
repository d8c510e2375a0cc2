#pragma once

// Deterministic random-number utilities.
//
// Every stochastic routine in the library draws through Rng so that a run is
// reproducible bit-for-bit across platforms and worker counts.  mt19937_64 has
// a fully specified output sequence; the transforms below (53-bit uniforms,
// inverse-CDF normals) deliberately avoid std::*_distribution, whose output is
// implementation-defined.

#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>

namespace objsn {

// Normal quantile function (probit), Wichura's algorithm AS 241 (PPND16).
// Absolute error below 1e-9 over p in (0,1), far better in the bulk.
double normal_quantile(double p);

// k-th output of a splitmix64 generator seeded with `master`.  Used to derive
// independent child seeds (one per replication / stream) in O(1).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t z = master + 0x9e3779b97f4a7c15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    // Uniform on [0,1) with 53 random mantissa bits.
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    // Uniform on the open interval (0,1); safe as inverse-CDF input.
    double uniform_open() {
        return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Standard normal via the AS 241 quantile applied to an open uniform.
    double normal() { return normal_quantile(uniform_open()); }

    // Unbiased integer in [0, m) by rejection.
    std::uint64_t below(std::uint64_t m) {
        if (m == 0) throw std::invalid_argument("Rng::below: m must be positive");
        const std::uint64_t threshold = (0ull - m) % m; // 2^64 mod m
        std::uint64_t x = eng_();
        while (x < threshold) x = eng_();
        return x % m;
    }

    std::uint64_t next() { return eng_(); }

  private:
    std::mt19937_64 eng_;
};

} // namespace objsn
