#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace rsvp {

// Deterministic generator used by every sampling operation. The integer
// stream is std::mt19937_64, whose output sequence is fixed by the C++
// standard, so equal seeds give equal streams on every platform. Floating
// point derivations (uniform, gaussian) are documented below and only depend
// on that stream plus libm.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1): top 53 bits of the next output, scaled by 2^-53.
  double uniform() {
    return double(engine_() >> 11) * 0x1.0p-53;
  }

  // Unbiased integer in [0, n) by rejection on the top of the 64-bit range.
  std::uint64_t uniform_below(std::uint64_t n) {
    if (n == 0) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t r;
    do {
      r = engine_();
    } while (r >= limit);
    return r % n;
  }

  // Standard normal via Box-Muller: two uniforms per call, cosine branch,
  // no cached second value.
  double gaussian() {
    const double u1 = 1.0 - uniform();  // (0, 1]: keeps log finite
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  double gaussian(double mean, double stddev) {
    return mean + stddev * gaussian();
  }

  // FNV-1a 64-bit. Used to derive stable per-item seeds.
  static std::uint64_t hash_id(std::string_view id) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : id) {
      h ^= c;
      h *= 1099511628211ull;
    }
    return h;
  }

  // Per-item generator: seed' = global_seed XOR hash(item id). Batch workers
  // get identical streams regardless of scheduling.
  static Rng derive(std::uint64_t global_seed, std::string_view item_id) {
    return Rng(global_seed ^ hash_id(item_id));
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace rsvp
