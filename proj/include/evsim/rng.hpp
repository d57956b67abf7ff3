#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace evsim {

// Derives an independent engine seed for a named substream of a run seed.
// Purposes draw from separate substreams ("arrivals", "ev_attrs",
// "stations") so adding a consumer never perturbs the others.
std::uint64_t substream_seed(std::uint64_t seed, std::string_view label);

// Seeded substream RNG. All draws are built from an explicit 53-bit
// uniform so sequences are bit-identical across platforms.
class SplitRng {
 public:
  SplitRng(std::uint64_t seed, std::string_view label)
      : engine_(substream_seed(seed, label)) {}

  // Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

  // Exponential with the given rate; safe at u == 0 because log1p(-u)
  // is evaluated on (0, 1].
  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

  // Uniform over {0, ..., count-1}.
  int uniform_index(int count) {
    int k = static_cast<int>(uniform() * count);
    return k >= count ? count - 1 : k;
  }

  // Counts unit-rate exponential gaps inside [0, mean]. O(mean) draws,
  // stable for any mean that fits a double.
  int poisson(double mean) {
    int count = 0;
    double acc = exponential(1.0);
    while (acc <= mean) {
      ++count;
      acc += exponential(1.0);
    }
    return count;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace evsim
