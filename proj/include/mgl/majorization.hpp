#pragma once

// Weak majorization and the body W(x) = {y >= 0 : y weakly m-majorized by x},
// together with its extreme-point description E(x) and hull H(x).

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "mgl/region.hpp"
#include "mgl/util.hpp"

namespace mgl {

inline constexpr double kMajorizationTol = 1e-12;
inline constexpr double kHullTol = 1e-9;
inline constexpr double kRearrangementTol = 1e-10;
inline constexpr std::size_t kMaxExtremeDim = 8;

/// Non-negative vector in arbitrary order.
class NonNegVector {
 public:
  NonNegVector() = default;
  explicit NonNegVector(std::vector<double> values);
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double> sorted_desc() const;
  double sum() const;

 private:
  std::vector<double> values_;
};

struct ExtremeSet {
  NonNegVector source;
  std::vector<std::vector<double>> points;
};

/// y is l-weakly majorized by x: the first k descending partial sums of y
/// are dominated by those of x, k = 1..l.
bool weakly_majorized(std::span<const double> y, std::span<const double> x, std::size_t l,
                      double tol = kMajorizationTol);

/// Smallest partial-sum slack min_k (sum_{i<=k} x~ - sum_{i<=k} y~), k <= l.
double majorization_slack(std::span<const double> y, std::span<const double> x, std::size_t l);

ExtremeSet extreme_points(const NonNegVector& x);

/// Convex-combination feasibility of y over E(x), decided by a Phase-I
/// simplex.  Returns the optimal infeasibility in `residual` when non-null.
bool hull_contains(const NonNegVector& x, const NonNegVector& y, double* residual = nullptr);
bool hull_contains(const ExtremeSet& e, std::span<const double> y, double* residual = nullptr);

bool w_contains(const NonNegVector& x, const NonNegVector& y);

bool is_rearrangement(std::span<const double> y, std::span<const double> x,
                      double tol = kRearrangementTol);

/// Samples of W(x): rejection samples from [0, max x]^m filtered by partial
/// sums, plus deliberate boundary points (vertices, face points on
/// sum(y) = sum(x), and their scalings).
std::vector<std::vector<double>> sample_W(const NonNegVector& x, std::size_t count, Rng& rng);

struct GridSampling {
  double step = 0.1;
  double upper = 1.0;
};
struct RandomSampling {
  std::size_t count = 1000;
  double upper = 1.0;
  std::uint64_t seed = 1;
};

struct MirskyReport {
  std::size_t samples = 0;
  std::size_t disagreements = 0;
  /// Disagreements whose partial-sum slack lies within the hull band.
  std::size_t in_band = 0;
  std::vector<std::vector<double>> witnesses;
};

MirskyReport mirsky_agreement(const NonNegVector& x, const GridSampling& grid);
MirskyReport mirsky_agreement(const NonNegVector& x, const RandomSampling& random);

using ScalarFunction = std::function<double(std::span<const double>)>;
using DomainPredicate = std::function<bool(std::span<const double>)>;

struct MonotoneBoundReport {
  std::size_t samples = 0;
  std::size_t violations = 0;
  double max_excess = -std::numeric_limits<double>::infinity();
  std::size_t equality_cases = 0;
  /// Equality cases that are not rearrangements of x.
  std::size_t equality_non_rearrangement = 0;
};

/// F(y) <= F(x) over sampled y in W(x).  The caller certifies W(x) is inside
/// the domain of F; `domain` only rejects individual samples (throws).
MonotoneBoundReport lemma_monotone_bound(const ScalarFunction& f, const NonNegVector& x,
                                         std::span<const std::vector<double>> samples,
                                         const DomainPredicate& domain = {});

struct ConfinementReport {
  std::size_t samples = 0;
  std::size_t outside_N = 0;
  std::size_t boundary_samples = 0;
  double max_boundary_sum_gap = 0.0;
  std::size_t sum_gap_violations = 0;
};

/// For x in the symmetric convex region C (subset of closed N), checks
/// sampled y in W(x) against closed N and, on the boundary of N with
/// max y_i > 1, the equality sum(y) = sum(x).  Throws if x is not in C.
ConfinementReport confined_region_check(const Region& c, const NonNegVector& x,
                                        std::span<const std::vector<double>> samples,
                                        double sum_tol = 1e-9,
                                        double boundary_tol = kRegionTol);

}  // namespace mgl
