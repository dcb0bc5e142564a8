#ifndef MOE_RNG_HPP
#define MOE_RNG_HPP

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>

namespace moe {

// Deterministic stream RNG.  Every consumer derives its own stream from the
// run seed plus a tuple of indices (particle, step, sweep, ...), so results
// do not depend on scheduling or worker count.  The engine is the standard
// mt19937_64 seeded through a splitmix64 hash chain; all variate algorithms
// below are fixed by this project (not delegated to <random> distributions),
// which makes output platform-independent.
class RngStream {
public:
    explicit RngStream(std::uint64_t raw_seed) : eng_(raw_seed) {}

    // Hash-derive an independent stream keyed by (seed, ids...).
    static RngStream derive(std::uint64_t seed, std::initializer_list<std::uint64_t> ids);

    std::uint64_t next() { return eng_(); }

    // Uniform on [0,1) with 53 random bits.
    double uniform();
    // Uniform on (0,1); never returns 0.
    double uniform_pos();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller (no caching; two uniforms per draw).
    double normal();
    double normal(double mean, double sd) { return mean + sd * normal(); }
    double half_normal(double scale);

    // Gamma(shape, 1), Marsaglia-Tsang; shape < 1 boosted through U^(1/a).
    double gamma(double shape);
    // log of a Gamma(shape,1) draw; safe for tiny shapes that underflow.
    double log_gamma(double shape);

    // Uniform index in {0, ..., n-1}.
    std::size_t uniform_index(std::size_t n);

    // Index drawn from normalized probabilities.
    std::size_t categorical(std::span<const double> probs);

private:
    std::mt19937_64 eng_;
};

}  // namespace moe

#endif
