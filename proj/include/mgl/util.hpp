#pragma once

#include <cstdint>
#include <cstdlib>
#include <functional>
#include <random>
#include <span>
#include <thread>
#include <vector>

namespace mgl {

/// Seeded generator with a portable uniform draw (std distributions are not
/// bit-identical across standard libraries).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal via Box-Muller.
  double normal();
  std::uint64_t next() { return engine_(); }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Worker count: MGL_THREADS if set, otherwise hardware concurrency.
unsigned worker_count();

/// Runs body(i) for i in [0, n) across worker_count() threads.  body must
/// only write to slots owned by index i.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// Deterministic pairwise summation.
double pairwise_sum(std::span<const double> v);

}  // namespace mgl
