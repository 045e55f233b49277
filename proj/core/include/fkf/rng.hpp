#pragma once

#include <cstdint>
#include <random>

namespace fkf {

// Stream splitting: every random stream is a std::mt19937_64 seeded with
//   stream_seed(parent, index) = splitmix64(splitmix64(parent) ^ (index + 1) * 0x9E3779B97F4A7C15)
// Monte-Carlo run j uses seed stream_seed(base_seed, j); inside a run the
// roles x0 / process noise / measurement noise use indices 0 / 1 / 2.
std::uint64_t splitmix64(std::uint64_t x) noexcept;
std::uint64_t stream_seed(std::uint64_t parent, std::uint64_t index) noexcept;

enum class NoiseRole : std::uint64_t { initial_state = 0, process = 1, measurement = 2 };

// Standard normal draws from mt19937_64 via the Marsaglia polar method.
// std::normal_distribution is avoided because its output is not specified
// across standard library implementations.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

  double next();

 private:
  double uniform_open();  // (-1, 1), 53-bit resolution

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace fkf
