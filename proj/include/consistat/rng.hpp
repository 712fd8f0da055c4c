#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace consistat {

// All randomness in the library flows through Rng.  The generator is
// std::mt19937_64; substreams are derived by mixing a root seed with a
// stream name through splitmix64, so independent pipeline stages get
// decorrelated streams from a single --seed value.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  static Rng substream(std::uint64_t root_seed, std::string_view name,
                       std::uint64_t index = 0) {
    std::uint64_t s = splitmix64(root_seed ^ fnv1a64(name));
    return Rng(splitmix64(s ^ (index * 0x9e3779b97f4a7c15ULL)));
  }

  double uniform() { return unit_(eng_); }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(eng_);
  }

  bool bernoulli(double p) { return uniform() < p; }

  std::uint64_t binomial(std::uint64_t n, double p) {
    if (n == 0 || p <= 0.0) return 0;
    if (p >= 1.0) return n;
    return std::binomial_distribution<std::uint64_t>(n, p)(eng_);
  }

  double normal(double mean = 0.0, double stddev = 1.0) {
    return std::normal_distribution<double>(mean, stddev)(eng_);
  }

  // k distinct indices from [0, n), returned sorted.
  std::vector<std::uint32_t> sample_without_replacement(std::uint32_t n,
                                                        std::uint32_t k);

  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

inline std::vector<std::uint32_t> Rng::sample_without_replacement(
    std::uint32_t n, std::uint32_t k) {
  if (k > n) throw std::invalid_argument("sample size exceeds population");
  std::vector<std::uint32_t> pool(n);
  for (std::uint32_t i = 0; i < n; ++i) pool[i] = i;
  for (std::uint32_t i = 0; i < k; ++i) {
    std::uint32_t j = i + static_cast<std::uint32_t>(below(n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

// Draws a multinomial sample of `n` counts over `probs` (need not be
// normalized internally; caller passes probabilities summing to 1).
// Returns per-cell counts aligned with `probs`.
inline std::vector<std::uint64_t> multinomial(std::uint64_t n,
                                              const std::vector<double>& probs,
                                              Rng& rng) {
  std::vector<double> cum(probs.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    cum[i] = acc;
  }
  std::vector<std::uint64_t> counts(probs.size(), 0);
  for (std::uint64_t m = 0; m < n; ++m) {
    double u = rng.uniform() * acc;
    auto it = std::upper_bound(cum.begin(), cum.end(), u);
    std::size_t idx = it == cum.end() ? probs.size() - 1
                                      : static_cast<std::size_t>(it - cum.begin());
    ++counts[idx];
  }
  return counts;
}

}  // namespace consistat
