#pragma once

#include <cstdint>

namespace starkecho {

// Counter-based generator: every draw is a pure function of
// (seed, index, stream, counter), so ensembles are identical for any
// worker count and any evaluation order.
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint64_t index, std::uint64_t stream)
        : key_(mix(mix(seed + 0x9E3779B97F4A7C15ull * (index + 1)) ^
                   mix(stream + 0xD1B54A32D192ED03ull)))
    {
    }

    double uniform() // in (0, 1]
    {
        std::uint64_t z = mix(key_ + 0xBF58476D1CE4E5B9ull * (++counter_));
        return static_cast<double>((z >> 11) + 1) * 0x1.0p-53;
    }

    double gaussian(); // standard normal via Box-Muller

  private:
    static std::uint64_t mix(std::uint64_t z)
    {
        z += 0x9E3779B97F4A7C15ull;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace starkecho
