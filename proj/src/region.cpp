#include "mgl/region.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace mgl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double max_pair_product(std::span<const double> a) {
  // sorted descending with non-negative entries
  return a.size() < 2 ? 0.0 : a[0] * a[1];
}

double max_pair_sum(std::span<const double> a) {
  return a.size() < 2 ? 0.0 : a[0] + a[1];
}

RegionVerdict closed_verdict(double margin) {
  RegionVerdict v;
  v.margin = margin;
  v.member = margin >= -kRegionTol;
  v.on_boundary = v.member && std::abs(margin) <= kRegionTol;
  return v;
}

RegionVerdict open_verdict(double margin) {
  RegionVerdict v;
  v.margin = margin;
  v.member = margin > kRegionTol;
  v.on_boundary = false;
  return v;
}

RegionVerdict degenerate_member() {
  RegionVerdict v;
  v.member = true;
  v.margin = kInf;
  return v;
}

void require_pairs(const SortedNonNeg& a, const char* what) {
  if (a.size() < 2) throw std::domain_error(std::string(what) + " requires m >= 2");
}

}  // namespace

SortedNonNeg::SortedNonNeg(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw std::invalid_argument("spectrum must have at least one entry");
  for (double v : values_) {
    if (!std::isfinite(v) || v < 0.0)
      throw std::invalid_argument("spectrum entries must be finite and non-negative");
  }
  std::sort(values_.begin(), values_.end(), std::greater<>());
}

SquaredSpectrum SquaredSpectrum::from_spectrum(const Spectrum& s) {
  std::vector<double> sq(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) sq[i] = s[i] * s[i];
  return SquaredSpectrum(std::move(sq));
}

Spectrum sqrt_of(const SquaredSpectrum& a) {
  std::vector<double> r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = std::sqrt(a[i]);
  return Spectrum(std::move(r));
}

double slope_from_spectrum(const Spectrum& lambda) {
  double p = 1.0;
  for (double l : lambda.values()) p *= 1.0 + l * l;
  return std::sqrt(p);
}

double slope_from_squared(const SquaredSpectrum& a) {
  double p = 1.0;
  for (double v : a.values()) p *= 1.0 + v;
  return std::sqrt(p);
}

double product_sum_expression(std::span<const double> a) {
  const std::size_t m = a.size();
  double prod = 1.0;
  for (double v : a) prod *= 1.0 - v;
  double sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double term = a[i];
    for (std::size_t j = 0; j < m; ++j) {
      if (j != i) term *= 1.0 - a[j];
    }
    sum += term;
  }
  return prod + sum;
}

RegionVerdict in_M(const Spectrum& lambda, bool closed) {
  if (lambda.size() < 2) return degenerate_member();
  std::vector<double> sq(lambda.size());
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = lambda[i] * lambda[i];
  const double margin = std::min(1.0 - lambda[0] * lambda[1], product_sum_expression(sq));
  return closed ? closed_verdict(margin) : open_verdict(margin);
}

RegionVerdict in_N_closure(const SquaredSpectrum& a) {
  if (a.size() < 2) return degenerate_member();
  const double margin =
      std::min(1.0 - max_pair_product(a.span()), product_sum_expression(a.span()));
  return closed_verdict(margin);
}

bool on_N_boundary(const SquaredSpectrum& a, double tol) {
  const RegionVerdict v = in_N_closure(a);
  if (!v.member) throw std::domain_error("on_N_boundary: vector is outside the closure of N");
  if (a.size() < 2) return false;
  return std::abs(max_pair_product(a.span()) - 1.0) <= tol ||
         std::abs(product_sum_expression(a.span())) <= tol;
}

double g_function(std::span<const double> y) {
  double s = 0.0;
  for (double v : y) {
    if (!(v < 1.0)) throw std::domain_error("g_function: entries must be < 1");
    s += 1.0 / (1.0 - v);
  }
  return s;
}

double n_via_g_value(const SquaredSpectrum& a) {
  if (a.size() < 2 || !(a[0] > 1.0) || !(a[1] < 1.0))
    throw std::domain_error("n_via_g: requires a_1 > 1 and a_i < 1 for i >= 2");
  return 1.0 / (1.0 - a[0]) + g_function(a.span().subspan(1));
}

bool in_N_via_G(const SquaredSpectrum& a, double tol) {
  const double value = n_via_g_value(a);
  const double m = static_cast<double>(a.size());
  return a[0] * a[1] <= 1.0 + tol && value <= m - 1.0 + tol;
}

RegionVerdict in_C_m(const SquaredSpectrum& a) {
  require_pairs(a, "C_m");
  const double m = static_cast<double>(a.size());
  double sum = 0.0;
  for (double v : a.values()) sum += v;
  const double margin = std::min(3.0 - 1.0 / (m - 1.0) - sum, 2.0 - max_pair_sum(a.span()));
  return closed_verdict(margin);
}

double mu_m(int m) {
  if (m < 2) throw std::domain_error("mu_m requires m >= 2");
  return std::sqrt(3.0) * std::sqrt(2.0 - 1.0 / (m - 1));
}

RegionVerdict in_V_m(const SquaredSpectrum& a) {
  require_pairs(a, "V_m");
  const double margin = std::min(mu_m(static_cast<int>(a.size())) - slope_from_squared(a),
                                 2.0 - max_pair_sum(a.span()));
  RegionVerdict v = closed_verdict(margin);
  v.out_of_scope = a.size() == 2;
  return v;
}

RegionVerdict in_slope_sqrt3(const SquaredSpectrum& a) {
  return closed_verdict(std::sqrt(3.0) - slope_from_squared(a));
}

bool squared_equivalence(const Spectrum& lambda) {
  return in_N_closure(SquaredSpectrum::from_spectrum(lambda)).member ==
         in_M(lambda, true).member;
}

std::string Region::name() const {
  switch (kind_) {
    case RegionKind::M_open: return "M";
    case RegionKind::M_closed: return "M_bar";
    case RegionKind::N_closure: return "N_bar";
    case RegionKind::C_m: return "C_m";
    case RegionKind::V_m: return "V_m";
    case RegionKind::SlopeSqrt3: return "slope_sqrt3";
  }
  return "?";
}

RegionVerdict Region::operator()(const SquaredSpectrum& a) const {
  switch (kind_) {
    case RegionKind::M_open: return in_M(sqrt_of(a), false);
    case RegionKind::M_closed: return in_M(sqrt_of(a), true);
    case RegionKind::N_closure: return in_N_closure(a);
    case RegionKind::C_m: return in_C_m(a);
    case RegionKind::V_m: return in_V_m(a);
    case RegionKind::SlopeSqrt3: return in_slope_sqrt3(a);
  }
  throw std::logic_error("unknown region kind");
}

Region Region::parse(const std::string& name) {
  if (name == "M") return Region(RegionKind::M_open);
  if (name == "M_bar") return Region(RegionKind::M_closed);
  if (name == "N" || name == "N_bar") return Region(RegionKind::N_closure);
  if (name == "C_m" || name == "C") return Region(RegionKind::C_m);
  if (name == "V_m" || name == "V") return Region(RegionKind::V_m);
  if (name == "slope_sqrt3") return Region(RegionKind::SlopeSqrt3);
  throw std::invalid_argument("unknown region '" + name + "'");
}

}  // namespace mgl
