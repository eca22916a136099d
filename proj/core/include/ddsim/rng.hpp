#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace ddsim {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Stream seed for ensemble member `index` under `master`. Members are
/// statistically independent and reproducible regardless of execution order.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master ^ splitmix64(index + 1));
}

/// mt19937_64 wrapper with hand-rolled variate transforms, so draws depend
/// only on the engine stream and libm (std::normal_distribution is not
/// portable across standard libraries).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform() {  // [0, 1)
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  double normal() {  // Marsaglia polar
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    have_spare_ = true;
    return u * f;
  }

  /// N(mean, sigma^2) truncated to mean +- limit*sigma; limit <= 0 means no truncation.
  double truncated_normal(double mean, double sigma, double limit) {
    if (sigma == 0.0) return mean;
    double z = normal();
    if (limit > 0.0) {
      while (std::abs(z) > limit) z = normal();
    }
    return mean + sigma * z;
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace ddsim
