#pragma once

// Second variation of graph volume along a geodesic homotopy, split into
// the five integrated terms of the singular-frame decomposition.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mgl/homotopy.hpp"

namespace mgl {

/// Covariant derivatives of a vector field along f_t (one ambient vector
/// per node at f_t(node)) in the grid directions, in the frame at f_t(node):
/// an n x 2 matrix per active node.  Neighbour values are parallel
/// transported to the centre before differencing.
std::vector<Eigen::MatrixXd> covariant_derivative_field(const HomotopyTrace& trace,
                                                        std::size_t sample,
                                                        const std::vector<Vec>& field);

/// nabla_V V per node at a sample, by covariant differences in t.
std::vector<Vec> acceleration_field(const HomotopyTrace& trace, std::size_t sample);

/// Singular frame at one node: J a_i = lambda_i b_i.
struct SingularFrame {
  Eigen::MatrixXd a;       // 2 x 2, columns a_i
  Eigen::MatrixXd b;       // n x n, columns b_alpha (frame coordinates)
  Eigen::VectorXd lambda;  // min(2, n) entries
};

/// When tie_seed is set, singular directions sharing a singular value are
/// rotated by a seeded random angle (a valid alternative SVD).
SingularFrame singular_frame(const Eigen::MatrixXd& j,
                             std::optional<std::uint64_t> tie_seed = std::nullopt);

/// p_{i alpha} = <nabla_{a_i} V, b_alpha>, a 2 x n matrix.
Eigen::MatrixXd p_matrix(const SingularFrame& sf, const Eigen::MatrixXd& dv);

struct VariationTerms {
  double i = 0.0, ii = 0.0, iii = 0.0, iv = 0.0, v = 0.0;
  double total() const { return i + ii + iii + iv + v; }
};

/// Pointwise integrands (not yet weighted by the volume form).
VariationTerms node_terms(const SingularFrame& sf, const Eigen::MatrixXd& dv,
                          const Eigen::MatrixXd& dw, const Eigen::VectorXd& v, double kappa);

/// Pointwise d^2/dt^2 of the volume density divided by sqrt(det g), from
/// the trace formula in grid coordinates.  Independent of any SVD.
double node_second_derivative_direct(const Eigen::MatrixXd& j, const Eigen::MatrixXd& dv,
                                     const Eigen::MatrixXd& dw, const Eigen::VectorXd& v,
                                     double kappa);

struct VariationReport {
  std::size_t sample = 0;
  double t = 0.0;
  VariationTerms terms;
  /// Same integral via the trace formula.
  double direct_total = 0.0;
  /// Finite difference of the discrete volume in t (NaN with < 4 samples).
  double fd_total = 0.0;
  /// Richardson estimate of the time-discretization error of fd_total
  /// (NaN when the coarser stencil does not fit).
  double fd_time_error = 0.0;
  double area = 0.0;
  double h = 0.0;
  double dt = 0.0;
  std::size_t nodes = 0;
  std::size_t outside_N = 0;
  std::size_t pairwise_violations = 0;  // nodes with lambda_1 lambda_2 > 1
  double min_N_margin = 0.0;
};

VariationReport second_variation_terms(const HomotopyTrace& trace, std::size_t sample,
                                       std::optional<std::uint64_t> tie_seed = std::nullopt);

struct AreaProfile {
  std::vector<double> t, area, d_area, d_area_fd, d2_area, d2_area_fd;
};

/// A(t), dA/dt = 1/2 int tr(g^{-1} g') dv and d^2A/dt^2 at every sample,
/// with finite-difference companions.
AreaProfile area_derivatives(const HomotopyTrace& trace);

/// Finite difference of samples at index s (centered where possible,
/// second-order one-sided at the ends).
double fd_first(const std::vector<double>& t, const std::vector<double>& y, std::size_t s);
double fd_second(const std::vector<double>& t, const std::vector<double>& y, std::size_t s);

enum class SignStatus { Pass, Fail, HypothesisUnmet };
std::string to_string(SignStatus s);

struct SignCheck {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  SignStatus status = SignStatus::Pass;
};

/// Non-negativity of terms (i), (ii), (iii), (v) and of the total, each
/// under the pointwise hypothesis it needs.  Threshold: -rel_tol * area.
std::vector<SignCheck> sign_report(const VariationReport& r, double rel_tol = 1e-8);

}  // namespace mgl
