#include "moe/rng.hpp"

#include <cmath>
#include <numbers>

namespace moe {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

RngStream RngStream::derive(std::uint64_t seed, std::initializer_list<std::uint64_t> ids) {
    std::uint64_t state = seed ^ 0xd1b54a32d192ed03ULL;
    std::uint64_t h = splitmix64(state);
    for (std::uint64_t id : ids) {
        state ^= id + 0x9e3779b97f4a7c15ULL + (state << 6) + (state >> 2);
        h ^= splitmix64(state);
    }
    return RngStream(h);
}

double RngStream::uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
}

double RngStream::uniform_pos() {
    double u;
    do {
        u = uniform();
    } while (u <= 0.0);
    return u;
}

double RngStream::normal() {
    const double u1 = uniform_pos();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double RngStream::half_normal(double scale) {
    return std::abs(scale * normal());
}

double RngStream::gamma(double shape) {
    if (shape < 1.0) {
        const double u = uniform_pos();
        return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform_pos();
        if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) {
            return d * v;
        }
    }
}

double RngStream::log_gamma(double shape) {
    if (shape < 1.0) {
        const double u = uniform_pos();
        return std::log(gamma(shape + 1.0)) + std::log(u) / shape;
    }
    return std::log(gamma(shape));
}

std::size_t RngStream::uniform_index(std::size_t n) {
    // rejection-free enough for our n; modulo bias negligible for n << 2^64
    return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
}

std::size_t RngStream::categorical(std::span<const double> probs) {
    const double u = uniform();
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        if (u < acc) return i;
    }
    return probs.size() - 1;
}

}  // namespace moe
