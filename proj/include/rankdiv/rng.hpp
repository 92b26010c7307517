#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace rankdiv {

/// splitmix64 output function. Fixed algorithm, identical on every platform.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Small counter-mode generator: the n-th output is a pure function of
/// (seed, counter), so streams can be evaluated out of order and in parallel
/// without changing a single bit of the result.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : seed_(splitmix64(seed ^ 0x5851f42d4c957f2dULL)) {}

    std::uint64_t bits(std::uint64_t counter) const {
        return splitmix64(seed_ ^ splitmix64(counter));
    }

    /// Uniform double in (0, 1): 53 mantissa bits, zero excluded.
    double uniform01(std::uint64_t counter) const {
        return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
    }

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
};

/// Sequential convenience wrapper over CounterRng.
class SequentialRng {
public:
    explicit SequentialRng(std::uint64_t seed) : rng_(seed) {}

    std::uint64_t next_bits() { return rng_.bits(counter_++); }
    double next_uniform01() { return rng_.uniform01(counter_++); }

    /// Uniform integer in [0, n) by rejection-free 128-bit multiply.
    std::uint64_t next_below(std::uint64_t n) {
        const auto wide = static_cast<unsigned __int128>(next_bits()) * n;
        return static_cast<std::uint64_t>(wide >> 64);
    }

    /// Standard normal via Box-Muller.
    double next_normal() {
        const double u1 = next_uniform01();
        const double u2 = next_uniform01();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    CounterRng rng_;
    std::uint64_t counter_ = 0;
};

/// Injectable source of standard-normal draws for the walker. Draws are
/// addressed by (step, item) so implementations can be deterministic
/// regardless of evaluation order.
class GaussianSource {
public:
    virtual ~GaussianSource() = default;
    virtual double standard_normal(std::uint64_t step, std::uint64_t item) const = 0;
};

/// Default source: counter-based Box-Muller keyed on (seed, step, item).
class CounterGaussianSource final : public GaussianSource {
public:
    explicit CounterGaussianSource(std::uint64_t seed) : rng_(seed) {}

    double standard_normal(std::uint64_t step, std::uint64_t item) const override {
        const std::uint64_t base = splitmix64(step * 0x9e3779b97f4a7c15ULL + item) ^ (step << 1);
        const double u1 = rng_.uniform01(base);
        const double u2 = rng_.uniform01(splitmix64(base));
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    CounterRng rng_;
};

/// Fixed-value source for structural tests.
class ConstantGaussianSource final : public GaussianSource {
public:
    explicit ConstantGaussianSource(double value) : value_(value) {}
    double standard_normal(std::uint64_t, std::uint64_t) const override { return value_; }

private:
    double value_;
};

/// k indices sampled uniformly without replacement from [0, n), in draw
/// order. Partial Fisher-Yates over an index table; deterministic in seed.
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k,
                                                    std::uint64_t seed);

}  // namespace rankdiv
