#pragma once

#include <cstdint>
#include <random>

namespace gridflow {

// SplitMix64 finalizer. Used to derive independent stream seeds from
// (base seed, counter) pairs so that scenario, epoch and sample streams
// never depend on how work is scheduled.
std::uint64_t mix64(std::uint64_t x);

// Seed of stream `counter` under `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t counter);

// mt19937_64 with a portable [0, 1) conversion (53 random bits), so streams
// are identical across standard library implementations.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double low, double high) { return low + (high - low) * uniform(); }

    // Uniform integer in [0, n). n must be > 0.
    std::uint64_t below(std::uint64_t n);

    std::uint64_t next() { return engine_(); }

  private:
    std::mt19937_64 engine_;
};

}  // namespace gridflow
