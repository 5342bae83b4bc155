#pragma once

// Singular-value regions: the stability region M (on singular values), its
// squared image N, the explicit polyhedron C_m and the slope-bounded set V_m.
//
// All regions are symmetric, so inputs are sorted descending on
// construction.  Every defining inequality is normalized to "expr >= 0" and
// the verdict margin is the smallest such expression.

#include <limits>
#include <span>
#include <string>
#include <vector>

namespace mgl {

/// Boundary band for region membership; the defining expressions are
/// low-degree polynomials of exact user inputs.
inline constexpr double kRegionTol = 1e-12;

/// Descending, non-negative vector.  Shared representation for singular
/// values and their squares.
class SortedNonNeg {
 public:
  SortedNonNeg() = default;
  explicit SortedNonNeg(std::vector<double> values);

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  const std::vector<double>& values() const { return values_; }
  std::span<const double> span() const { return values_; }

 protected:
  std::vector<double> values_;
};

/// Singular values (lambda_1 >= ... >= lambda_m >= 0).
class Spectrum : public SortedNonNeg {
 public:
  using SortedNonNeg::SortedNonNeg;
};

/// Squared singular values (lambda_1^2 >= ... >= lambda_m^2 >= 0).
class SquaredSpectrum : public SortedNonNeg {
 public:
  using SortedNonNeg::SortedNonNeg;
  static SquaredSpectrum from_spectrum(const Spectrum& s);
};

Spectrum sqrt_of(const SquaredSpectrum& a);

struct RegionVerdict {
  bool member = false;
  bool on_boundary = false;
  double margin = 0.0;
  /// Set when the region is evaluated outside the hypothesis of the result
  /// that defines it (V_m with m = 2).
  bool out_of_scope = false;
};

/// prod (1 + lambda_i^2)^{1/2}, the volume density of the graph.
double slope_from_spectrum(const Spectrum& lambda);
/// prod (1 + a_i)^{1/2} for a squared spectrum.
double slope_from_squared(const SquaredSpectrum& a);

/// prod(1 - a_i) + sum_i (1 - a_1)...a_i...(1 - a_m).  The second defining
/// expression of N (and of M after squaring).
double product_sum_expression(std::span<const double> a);

RegionVerdict in_M(const Spectrum& lambda, bool closed);
RegionVerdict in_N_closure(const SquaredSpectrum& a);
/// Throws std::domain_error when a is not in the closure of N.
bool on_N_boundary(const SquaredSpectrum& a, double tol = kRegionTol);

/// sum 1/(1 - y_i); every entry must be < 1.
double g_function(std::span<const double> y);

/// Membership in closed N via the G reformulation.  Requires a_1 > 1 and
/// a_i < 1 for i >= 2.
bool in_N_via_G(const SquaredSpectrum& a, double tol = kRegionTol);
/// Value of 1/(1 - a_1) + G(a_2, ..., a_m) on the same domain.
double n_via_g_value(const SquaredSpectrum& a);

RegionVerdict in_C_m(const SquaredSpectrum& a);

/// sqrt(3) * (2 - 1/(m - 1))^{1/2}
double mu_m(int m);

RegionVerdict in_V_m(const SquaredSpectrum& a);
/// prod (1 + a_i)^{1/2} <= sqrt(3).
RegionVerdict in_slope_sqrt3(const SquaredSpectrum& a);

/// Consistency oracle: closed M on lambda agrees with closed N on lambda^2.
bool squared_equivalence(const Spectrum& lambda);

enum class RegionKind { M_open, M_closed, N_closure, C_m, V_m, SlopeSqrt3 };

/// Region predicate over squared spectra, usable as a field evaluator.
class Region {
 public:
  explicit Region(RegionKind kind) : kind_(kind) {}
  RegionKind kind() const { return kind_; }
  std::string name() const;
  RegionVerdict operator()(const SquaredSpectrum& a) const;

  /// Accepts "M", "M_bar", "N", "N_bar", "C_m", "V_m", "slope_sqrt3".
  static Region parse(const std::string& name);

 private:
  RegionKind kind_;
};

}  // namespace mgl
