#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace secrecy {

// splitmix64 step; used to derive independent child seeds from (seed, stream, index).
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index) {
    return splitmix64(splitmix64(base ^ (0x6a09e667f3bcc908ULL + stream)) + index);
}

// Deterministic RNG wrapper. All sampling goes through explicit integer/double
// derivations from mt19937_64 output so results are identical across platforms
// (std::discrete_distribution and friends are implementation-defined).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next() { return eng_(); }

    // uniform in [0,1) with 53 random bits
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // unbiased uniform integer in [0, n), n >= 1
    std::uint64_t below(std::uint64_t n) {
        if (n <= 1) return 0;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do {
            v = next();
        } while (v >= limit);
        return v % n;
    }

    // inverse-CDF sample from a probability vector (sums to 1 within fp error)
    int categorical(std::span<const double> p) {
        const double u = uniform();
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < p.size(); ++i) {
            acc += p[i];
            if (u < acc) return static_cast<int>(i);
        }
        return static_cast<int>(p.size()) - 1;
    }

  private:
    std::mt19937_64 eng_;
};

}  // namespace secrecy
