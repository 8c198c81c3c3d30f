#ifndef BENSTAT_RNG_HPP
#define BENSTAT_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace benstat {

// Seeded generator with explicit output transforms. std::mt19937_64 output is
// standardized bit-for-bit; the distributions below are implemented here
// instead of via <random> distribution objects, whose streams are
// implementation-defined. Every seeded artifact (measures, test-functional
// suites) must be reproducible from the recorded seed alone.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller; pairs cached.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
  }

  std::uint64_t raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace benstat

#endif
