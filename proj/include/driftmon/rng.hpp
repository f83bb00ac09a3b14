#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>

namespace driftmon {

// Anything that yields uniform doubles in [0,1). Lets tests substitute a
// fixed-threshold stub for the Gibbs sampler.
template <class R>
concept UniformSource = requires(R r) {
    { r.uniform() } -> std::convertible_to<double>;
};

// Seeded PRNG with explicit double transforms. All randomized components draw
// through this wrapper so a run is fully determined by its seeds.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Box-Muller without caching: two uniforms per call, stateless between calls.
    double gaussian() {
        double u1 = 1.0 - uniform();  // (0, 1]
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    double gaussian(double mean, double stddev) { return mean + stddev * gaussian(); }

    bool bernoulli(double p) { return uniform() < p; }

    // Inverse-CDF draw; probabilities are assumed non-negative. A deficit from
    // rounding falls to the last index.
    int categorical(std::span<const double> probs) {
        double r = uniform();
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
            acc += probs[i];
            if (r < acc) return static_cast<int>(i);
        }
        return static_cast<int>(probs.size()) - 1;
    }

    // Derive an independent stream, e.g. one per detector or per run.
    Rng fork(std::uint64_t stream_id) const {
        return Rng(splitmix64(seed_ ^ (0x9e3779b97f4a7c15ULL * (stream_id + 1))));
    }

    static std::uint64_t splitmix64(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

}  // namespace driftmon
