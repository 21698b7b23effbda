#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace ranslice {

// splitmix64 finalizer, used as a mixing function for counter-based draws.
inline uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Uniform double in (0,1), never exactly 0 or 1. 52 bits so that the
// half-step offset stays exactly representable at the top of the range.
inline double u64_to_unit(uint64_t x) {
  return (static_cast<double>(x >> 12) + 0.5) * 0x1p-52;
}

// Inverse normal CDF (Acklam's rational approximation, |rel err| < 1.2e-9).
double normal_icdf(double p);

// Counter-based random stream. Every draw is a pure function of
// (seed, stream, a, b, c), so replaying a simulation segment reproduces
// the exact same values regardless of how many draws other code paths
// consumed in between. This is what makes common-random-number replay
// across candidate actions exact.
class CounterRng {
 public:
  explicit CounterRng(uint64_t seed) : seed_(seed) {}

  uint64_t seed() const { return seed_; }

  uint64_t bits(uint64_t stream, uint64_t a, uint64_t b, uint64_t c) const {
    uint64_t h = mix64(seed_ ^ mix64(stream));
    h = mix64(h ^ mix64(a));
    h = mix64(h ^ mix64(b));
    return mix64(h ^ mix64(c));
  }

  double uniform(uint64_t stream, uint64_t a, uint64_t b, uint64_t c) const {
    return u64_to_unit(bits(stream, a, b, c));
  }

  double normal(uint64_t stream, uint64_t a, uint64_t b, uint64_t c) const {
    return normal_icdf(uniform(stream, a, b, c));
  }

  // Poisson via Knuth's product method; sub-draws are indexed under the
  // same key so the count is a pure function of the key. Fine for the
  // small per-slot means used here.
  int poisson(uint64_t stream, uint64_t a, uint64_t b, double mean) const {
    if (mean < 0.0) throw std::invalid_argument("poisson: negative mean");
    if (mean == 0.0) return 0;
    if (mean > 50.0) {
      // normal approximation; exp(-mean) underflows long before this
      const double x = mean + std::sqrt(mean) * normal(stream, a, b, 0);
      return x <= 0.0 ? 0 : static_cast<int>(std::lround(x));
    }
    const double limit = std::exp(-mean);
    double prod = 1.0;
    int n = 0;
    while (true) {
      prod *= uniform(stream, a, b, static_cast<uint64_t>(n));
      if (prod <= limit) return n;
      ++n;
    }
  }

 private:
  uint64_t seed_;
};

// Stream tags for the environment's keyed draws.
namespace stream {
constexpr uint64_t kShadowInit = 0x5348494e49540001ull;
constexpr uint64_t kShadowStep = 0x534841444f570002ull;
constexpr uint64_t kArrival = 0x4152525649410003ull;
constexpr uint64_t kFading = 0x464144494e470004ull;
}  // namespace stream

// Derives per-purpose 64-bit seeds from a master seed. Train and eval
// trace seeds use distinct tags so the two datasets never overlap.
inline uint64_t derive_seed(uint64_t master, uint64_t tag, uint64_t index) {
  return mix64(mix64(master ^ mix64(tag)) ^ mix64(index));
}

namespace seed_tag {
constexpr uint64_t kTrainTrace = 0x545241494e545243ull;
constexpr uint64_t kEvalTrace = 0x4556414c54524143ull;
constexpr uint64_t kTrainEnv = 0x545241494e454e56ull;
constexpr uint64_t kEvalEnv = 0x4556414c454e5600ull;
constexpr uint64_t kAgentInit = 0x4147454e54494e49ull;
constexpr uint64_t kAgentNoise = 0x4147454e544e4f49ull;
}  // namespace seed_tag

}  // namespace ranslice
