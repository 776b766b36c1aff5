#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace trimfit {

/// Deterministic random stream ("trimfit-rng/1").
///
/// Wraps std::mt19937_64 (whose output sequence is fully specified by the
/// standard) and performs all real-valued transforms itself, so streams are
/// bit-reproducible across platforms and standard-library implementations.
class Rng {
 public:
  static constexpr const char* kName = "trimfit-rng/1";

  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(mix(seed)) {}

  std::uint64_t seed() const { return seed_; }

  /// Independent child stream derived from (seed, stream_id).
  Rng split(std::uint64_t stream_id) const {
    return Rng(mix(seed_ ^ mix(stream_id + 0x9E3779B97F4A7C15ull)));
  }

  /// Uniform double in [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 1.0 - uniform();  // (0, 1]
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  /// Uniform integer in [0, bound) by rejection.
  std::uint64_t integer(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("Rng::integer: bound must be positive");
    std::uint64_t threshold = (~bound + 1) % bound;  // 2^64 mod bound
    for (;;) {
      std::uint64_t r = engine_();
      if (r >= threshold) return r % bound;
    }
  }

  /// k distinct indices from {0,...,n-1}, uniform without replacement.
  /// Partial Fisher-Yates; output order is the draw order.
  std::vector<int> sample_without_replacement(int n, int k) {
    if (k < 0 || k > n) throw std::invalid_argument("sample_without_replacement: k out of range");
    std::vector<int> pool(n);
    for (int i = 0; i < n; ++i) pool[i] = i;
    std::vector<int> out(k);
    for (int i = 0; i < k; ++i) {
      int j = i + static_cast<int>(integer(static_cast<std::uint64_t>(n - i)));
      std::swap(pool[i], pool[j]);
      out[i] = pool[i];
    }
    return out;
  }

 private:
  static std::uint64_t mix(std::uint64_t x) {
    // splitmix64 finalizer
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
  }

  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace trimfit
