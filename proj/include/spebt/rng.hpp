#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace spebt {

// SplitMix64 finalizer; used to derive independent stream seeds.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Seed of stream `index` under `master`. Streams with distinct (master, index) are
// decorrelated, so per-slot or per-replicate work can run in any order.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return mix64(mix64(master) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

// Explicit RNG handle passed to every stochastic operation.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    // Child stream; does not advance this generator.
    Rng split(std::uint64_t index) const { return Rng(derive_seed(seed_, index)); }

    double uniform(double lo = 0.0, double hi = 1.0) {
        return std::uniform_real_distribution<double>(lo, hi)(engine_);
    }
    int uniform_int(int lo, int hi) {
        return std::uniform_int_distribution<int>(lo, hi)(engine_);
    }
    double normal(double mean = 0.0, double stddev = 1.0) {
        if (stddev == 0.0) {
            return mean;
        }
        return std::normal_distribution<double>(mean, stddev)(engine_);
    }
    double exponential(double mean) {
        if (mean <= 0.0) {
            return 0.0;
        }
        return std::exponential_distribution<double>(1.0 / mean)(engine_);
    }
    bool bernoulli(double p) {
        if (p <= 0.0) {
            return false;
        }
        return uniform() < p;
    }
    // Circularly-symmetric complex Gaussian CN(0, variance).
    std::complex<double> complex_normal(double variance) {
        const double s = std::sqrt(0.5 * variance);
        return {normal(0.0, s), normal(0.0, s)};
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::uint64_t seed_;
};

}  // namespace spebt
