#include "fkf/rng.hpp"

#include <cmath>

namespace fkf {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t parent, std::uint64_t index) noexcept {
  return splitmix64(splitmix64(parent) ^ ((index + 1) * 0x9E3779B97F4A7C15ULL));
}

double NormalStream::uniform_open() {
  const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;  // [0, 1)
  return 2.0 * u - 1.0;
}

double NormalStream::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double a = 0.0;
  double b = 0.0;
  double s = 0.0;
  do {
    a = uniform_open();
    b = uniform_open();
    s = a * a + b * b;
  } while (s >= 1.0 || s == 0.0);
  const double scale = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = b * scale;
  has_spare_ = true;
  return a * scale;
}

}  // namespace fkf
