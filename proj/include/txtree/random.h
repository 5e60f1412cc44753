#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>

namespace txtree {

// SplitMix64 finalizer; used to derive independent seeds for chains and replicates.
inline auto derive_seed(std::uint64_t seed, std::uint64_t stream) -> std::uint64_t {
  auto z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_{seed} {}

  auto engine() -> std::mt19937_64& { return engine_; }

  auto uniform() -> double { return std::uniform_real_distribution<double>{0.0, 1.0}(engine_); }
  auto uniform_int(int lo, int hi) -> int {
    return std::uniform_int_distribution<int>{lo, hi}(engine_);
  }
  auto bernoulli(double p) -> bool { return uniform() < p; }
  auto normal(double mean, double sd) -> double {
    return std::normal_distribution<double>{mean, sd}(engine_);
  }
  auto gamma(double shape) -> double {
    return std::gamma_distribution<double>{shape, 1.0}(engine_);
  }
  auto beta(double a, double b) -> double {
    auto x = gamma(a);
    auto y = gamma(b);
    return x / (x + y);
  }
  // Failures before the first success; support {0, 1, ...}.
  auto geometric(double q) -> int {
    if (q >= 1.0) return 0;
    return std::geometric_distribution<int>{q}(engine_);
  }
  auto poisson(double mean) -> int {
    if (mean <= 0.0) return 0;
    return std::poisson_distribution<int>{mean}(engine_);
  }
  template <typename T>
  auto pick(std::span<const T> items) -> const T& {
    return items[uniform_int(0, static_cast<int>(items.size()) - 1)];
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace txtree
