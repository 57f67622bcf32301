#ifndef RETROMC_RNG_HPP
#define RETROMC_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace retromc {

// Deterministic random stream built on xoshiro256++ with SplitMix64 seeding.
// Substreams are addressed by (seed, worker_id, sample_id); the same triple
// always reproduces the same draw sequence.
class RngStream {
public:
    using result_type = std::uint64_t;

    RngStream() : RngStream(0, 0, 0) {}

    RngStream(std::uint64_t seed, std::uint64_t worker_id, std::uint64_t sample_id) {
        std::uint64_t x = splitmix(seed + 0x9e3779b97f4a7c15ULL);
        x = splitmix(x ^ (worker_id * 0xbf58476d1ce4e5b9ULL + 0x94d049bb133111ebULL));
        x = splitmix(x ^ (sample_id * 0x2545f4914f6cdd1dULL + 0x9e3779b97f4a7c15ULL));
        for (auto& s : state_) {
            x = splitmix(x);
            s = x;
        }
        have_cached_normal_ = false;
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type(0); }

    result_type operator()() { return next(); }

    // uniform on [0, 1)
    double uniform() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    // uniform on (0, 1), safe to feed into log()
    double uniform_pos() {
        return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // standard normal via Box-Muller, second value cached
    double normal() {
        if (have_cached_normal_) {
            have_cached_normal_ = false;
            return cached_normal_;
        }
        const double u1 = uniform_pos();
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 6.283185307179586476925286766559 * u2;
        cached_normal_ = radius * std::sin(angle);
        have_cached_normal_ = true;
        return radius * std::cos(angle);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    double exponential() { return -std::log(uniform_pos()); }

    long poisson(double lambda) {
        if (lambda < 0.0) throw std::domain_error("poisson: lambda must be >= 0");
        if (lambda == 0.0) return 0;
        std::poisson_distribution<long> dist(lambda);
        return dist(*this);
    }

private:
    static std::uint64_t splitmix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    std::uint64_t state_[4];
    double cached_normal_ = 0.0;
    bool have_cached_normal_;
};

// Spec-level alias: spec calls this operation sample_poisson.
inline long sample_poisson(double lambda, RngStream& rng) { return rng.poisson(lambda); }

} // namespace retromc

#endif
