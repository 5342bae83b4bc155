#include "mgl/variation.hpp"

#include <Eigen/SVD>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "mgl/util.hpp"

namespace mgl {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_sample(const HomotopyTrace& trace, std::size_t s) {
  if (s >= trace.samples()) throw std::out_of_range("t-sample index out of range");
}

}  // namespace

std::vector<Eigen::MatrixXd> covariant_derivative_field(const HomotopyTrace& trace,
                                                        std::size_t sample,
                                                        const std::vector<Vec>& field) {
  require_sample(trace, sample);
  const GridMap& f = trace.maps[sample];
  const GridDomain& d = f.domain;
  if (field.size() != d.size()) throw std::invalid_argument("field size mismatch");
  const ModelManifold mf(f.target);
  std::vector<Eigen::MatrixXd> out(d.size());
  for (std::size_t k = 0; k < d.size(); ++k) {
    const int i = d.col(k), j = d.row(k);
    if (!d.active(i, j)) continue;
    const Point& c = f.values[k];
    const auto& frame = trace.jacobians[sample][k].frame;
    Eigen::MatrixXd m(mf.dim(), kSourceDim);
    for (int axis = 0; axis < kSourceDim; ++axis) {
      const AxisStencil s = axis_stencil(d, i, j, axis);
      const int di = axis == 0 ? 1 : 0, dj = axis == 0 ? 0 : 1;
      Vec acc = Vec::Zero(c.size());
      for (int q = 0; q < s.count; ++q) {
        if (s.offsets[q] == 0) {
          acc += s.weights[q] * field[k];
          continue;
        }
        const std::size_t nb = d.index(i + s.offsets[q] * di, j + s.offsets[q] * dj);
        acc += s.weights[q] * mf.parallel_transport(f.values[nb], c, field[nb]);
      }
      m.col(axis) = mf.to_frame(frame, acc);
    }
    out[k] = std::move(m);
  }
  return out;
}

std::vector<Vec> acceleration_field(const HomotopyTrace& trace, std::size_t sample) {
  require_sample(trace, sample);
  const std::size_t ns = trace.samples();
  if (ns < 3) throw std::invalid_argument("acceleration needs 3 t-samples");
  const ModelManifold mf(trace.f0.target);
  const auto& t = trace.t;
  // Three-point stencil in t: centered inside, one-sided at the ends.
  std::array<std::size_t, 3> idx;
  if (sample == 0) idx = {0, 1, 2};
  else if (sample + 1 == ns) idx = {ns - 3, ns - 2, ns - 1};
  else idx = {sample - 1, sample, sample + 1};
  // Lagrange derivative weights at t[sample].
  std::array<double, 3> w;
  const double x = t[sample];
  for (int a = 0; a < 3; ++a) {
    double num = 0.0, den = 1.0;
    for (int b = 0; b < 3; ++b) {
      if (b == a) continue;
      den *= t[idx[a]] - t[idx[b]];
      double prod = 1.0;
      for (int c = 0; c < 3; ++c)
        if (c != a && c != b) prod *= x - t[idx[c]];
      num += prod;
    }
    w[a] = num / den;
  }
  std::vector<Vec> out(trace.nodes());
  for (std::size_t k = 0; k < trace.nodes(); ++k) {
    if (!trace.active(k)) continue;
    const Point& c = trace.maps[sample].values[k];
    Vec acc = Vec::Zero(c.size());
    for (int a = 0; a < 3; ++a) {
      const std::size_t s = idx[a];
      if (s == sample) acc += w[a] * trace.velocity[s][k];
      else acc += w[a] * mf.parallel_transport(trace.maps[s].values[k], c, trace.velocity[s][k]);
    }
    out[k] = mf.project_tangent(c, acc);
  }
  return out;
}

SingularFrame singular_frame(const Eigen::MatrixXd& j, std::optional<std::uint64_t> tie_seed) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(j, Eigen::ComputeThinU | Eigen::ComputeFullV);
  SingularFrame sf;
  sf.a = svd.matrixV();
  sf.lambda = svd.singularValues();
  // Complete the singular b's by Gram-Schmidt over the frame basis, in order.
  const int n = static_cast<int>(j.rows());
  const int q = static_cast<int>(sf.lambda.size());
  sf.b = Eigen::MatrixXd::Zero(n, n);
  sf.b.leftCols(q) = svd.matrixU();
  int filled = q;
  for (int e = 0; e < n && filled < n; ++e) {
    Eigen::VectorXd c = Eigen::VectorXd::Unit(n, e);
    for (int pass = 0; pass < 2; ++pass)
      for (int k = 0; k < filled; ++k) c -= sf.b.col(k).dot(c) * sf.b.col(k);
    const double norm = c.norm();
    if (norm < 1e-8) continue;
    sf.b.col(filled++) = c / norm;
  }
  if (tie_seed && sf.lambda.size() == 2) {
    const double scale = std::max(1.0, sf.lambda[0]);
    if (std::abs(sf.lambda[0] - sf.lambda[1]) <= 1e-12 * scale) {
      Rng rng(*tie_seed);
      const double th = rng.uniform(0.0, 2.0 * std::numbers::pi);
      Eigen::Matrix2d r;
      r << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
      sf.a = (sf.a * r).eval();
      sf.b.leftCols(2) = (sf.b.leftCols(2) * r).eval();
    }
  }
  return sf;
}

Eigen::MatrixXd p_matrix(const SingularFrame& sf, const Eigen::MatrixXd& dv) {
  return (sf.b.transpose() * dv * sf.a).transpose();
}

VariationTerms node_terms(const SingularFrame& sf, const Eigen::MatrixXd& dv,
                          const Eigen::MatrixXd& dw, const Eigen::VectorXd& v, double kappa) {
  const Eigen::MatrixXd p = p_matrix(sf, dv);
  const int m = static_cast<int>(p.rows());
  const int n = static_cast<int>(p.cols());
  const int q = static_cast<int>(sf.lambda.size());
  auto lam = [&](int i) { return i < q ? sf.lambda[i] : 0.0; };
  auto g = [&](int i) { return 1.0 + lam(i) * lam(i); };

  VariationTerms r;
  for (int i = 0; i < q; ++i) {
    r.i += p(i, i) * p(i, i) / (g(i) * g(i));
    for (int j = 0; j < q; ++j)
      if (j != i) r.i += lam(i) * lam(j) * p(i, i) * p(j, j) / (g(i) * g(j));
  }
  for (int i = 0; i < q; ++i)
    for (int j = i + 1; j < q; ++j)
      r.ii += (p(i, j) * p(i, j) + p(j, i) * p(j, i) - 2.0 * lam(i) * lam(j) * p(i, j) * p(j, i)) /
              (g(i) * g(j));
  // Normal directions beyond the source dimension, and source directions in
  // the kernel when the target is lower-dimensional.
  for (int i = 0; i < m; ++i)
    for (int a = m; a < n; ++a) r.iii += p(i, a) * p(i, a) / g(i);
  for (int j = n; j < m; ++j)
    for (int a = 0; a < n; ++a) r.iii += p(j, a) * p(j, a) / g(a);

  const Eigen::MatrixXd dwa = dw * sf.a;
  for (int i = 0; i < q; ++i) r.iv += lam(i) / g(i) * dwa.col(i).dot(sf.b.col(i));

  const double vv = v.squaredNorm();
  for (int i = 0; i < q; ++i) {
    const double bv = sf.b.col(i).dot(v);
    r.v += lam(i) * lam(i) / g(i) * kappa * std::max(0.0, vv - bv * bv);
  }
  return r;
}

double node_second_derivative_direct(const Eigen::MatrixXd& j, const Eigen::MatrixXd& dv,
                                     const Eigen::MatrixXd& dw, const Eigen::VectorXd& v,
                                     double kappa) {
  const Eigen::Matrix2d jtj = j.transpose() * j;
  const Eigen::Matrix2d g = Eigen::Matrix2d::Identity() + jtj;
  const Eigen::Matrix2d gd = dv.transpose() * j + j.transpose() * dv;
  const Eigen::Vector2d jv = j.transpose() * v;
  const Eigen::Matrix2d gdd = 2.0 * dv.transpose() * dv +
                              2.0 * kappa * (v.squaredNorm() * jtj - jv * jv.transpose()) +
                              dw.transpose() * j + j.transpose() * dw;
  const Eigen::Matrix2d gi = g.inverse();
  const Eigen::Matrix2d x = gi * gd;
  const double tr = x.trace();
  return -0.5 * (x * x).trace() + 0.25 * tr * tr + 0.5 * (gi * gdd).trace();
}

double fd_first(const std::vector<double>& t, const std::vector<double>& y, std::size_t s) {
  const std::size_t n = t.size();
  if (n < 3) return n == 2 ? (y[1] - y[0]) / (t[1] - t[0]) : kNaN;
  const double h = t[1] - t[0];
  if (s == 0) return (-3.0 * y[0] + 4.0 * y[1] - y[2]) / (2.0 * h);
  if (s + 1 == n) return (3.0 * y[n - 1] - 4.0 * y[n - 2] + y[n - 3]) / (2.0 * h);
  return (y[s + 1] - y[s - 1]) / (t[s + 1] - t[s - 1]);
}

double fd_second(const std::vector<double>& t, const std::vector<double>& y, std::size_t s) {
  const std::size_t n = t.size();
  if (n < 4) return kNaN;
  const double h = t[1] - t[0];
  if (s == 0) return (2.0 * y[0] - 5.0 * y[1] + 4.0 * y[2] - y[3]) / (h * h);
  if (s + 1 == n) return (2.0 * y[n - 1] - 5.0 * y[n - 2] + 4.0 * y[n - 3] - y[n - 4]) / (h * h);
  const double h0 = t[s] - t[s - 1], h1 = t[s + 1] - t[s];
  return 2.0 * ((y[s + 1] - y[s]) / h1 - (y[s] - y[s - 1]) / h0) / (h0 + h1);
}

namespace {

std::vector<double> area_samples(const HomotopyTrace& trace) {
  std::vector<double> a(trace.samples());
  for (std::size_t s = 0; s < a.size(); ++s)
    a[s] = graph_volume(trace.f0.domain, trace.jacobians[s]);
  return a;
}

struct SampleIntegrals {
  VariationTerms terms;
  double direct = 0.0;
  double area = 0.0;
  double d_area = 0.0;
  std::size_t nodes = 0, outside = 0, pairwise = 0;
  double min_margin = std::numeric_limits<double>::infinity();
};

SampleIntegrals integrate_sample(const HomotopyTrace& trace, std::size_t sample,
                                 std::optional<std::uint64_t> tie_seed) {
  const GridDomain& d = trace.f0.domain;
  const ModelManifold mf(trace.f0.target);
  const double kappa = trace.f0.target.kappa();
  const auto w = d.quadrature_weights();
  const auto dv = covariant_derivative_field(trace, sample, trace.velocity[sample]);
  const auto acc = acceleration_field(trace, sample);
  const auto dw = covariant_derivative_field(trace, sample, acc);

  const std::size_t nn = d.size();
  std::vector<double> ti(nn, 0.0), tii(nn, 0.0), tiii(nn, 0.0), tiv(nn, 0.0), tv(nn, 0.0),
      direct(nn, 0.0), area(nn, 0.0), darea(nn, 0.0);
  SampleIntegrals out;
  for (std::size_t k = 0; k < nn; ++k) {
    if (!trace.active(k)) continue;
    ++out.nodes;
    const auto& sp = trace.spectra[sample][k];
    const auto nv = in_N_closure(sp);
    out.min_margin = std::min(out.min_margin, nv.margin);
    if (!nv.member) ++out.outside;
    if (sp[0] * sp[1] > 1.0 + kRegionTol) ++out.pairwise;
    if (w[k] == 0.0) continue;

    const auto& jac = trace.jacobians[sample][k];
    const Eigen::VectorXd v = mf.to_frame(jac.frame, trace.velocity[sample][k]);
    const Eigen::Matrix2d g = induced_metric(jac.matrix);
    const double vol = w[k] * std::sqrt(g.determinant());
    const std::optional<std::uint64_t> node_seed =
        tie_seed ? std::optional<std::uint64_t>(*tie_seed + k) : std::nullopt;
    const SingularFrame sf = singular_frame(jac.matrix, node_seed);
    const VariationTerms nt = node_terms(sf, dv[k], dw[k], v, kappa);
    ti[k] = vol * nt.i;
    tii[k] = vol * nt.ii;
    tiii[k] = vol * nt.iii;
    tiv[k] = vol * nt.iv;
    tv[k] = vol * nt.v;
    direct[k] = vol * node_second_derivative_direct(jac.matrix, dv[k], dw[k], v, kappa);
    area[k] = vol;
    const Eigen::Matrix2d gd = dv[k].transpose() * jac.matrix + jac.matrix.transpose() * dv[k];
    darea[k] = vol * 0.5 * (g.inverse() * gd).trace();
  }
  out.terms = {pairwise_sum(ti), pairwise_sum(tii), pairwise_sum(tiii), pairwise_sum(tiv),
               pairwise_sum(tv)};
  out.direct = pairwise_sum(direct);
  out.area = pairwise_sum(area);
  out.d_area = pairwise_sum(darea);
  return out;
}

}  // namespace

VariationReport second_variation_terms(const HomotopyTrace& trace, std::size_t sample,
                                       std::optional<std::uint64_t> tie_seed) {
  require_sample(trace, sample);
  VariationReport r;
  r.sample = sample;
  r.t = trace.t[sample];
  const SampleIntegrals si = integrate_sample(trace, sample, tie_seed);
  r.terms = si.terms;
  r.direct_total = si.direct;
  r.area = si.area;
  r.nodes = si.nodes;
  r.outside_N = si.outside;
  r.pairwise_violations = si.pairwise;
  r.min_N_margin = si.min_margin;
  const auto& d = trace.f0.domain;
  r.h = std::max(d.hx, d.hy);
  r.dt = trace.samples() > 1 ? trace.t[1] - trace.t[0] : kNaN;

  const auto a = area_samples(trace);
  r.fd_total = fd_second(trace.t, a, sample);
  r.fd_time_error = kNaN;
  const std::size_t ns = trace.samples();
  if (sample >= 2 && sample + 2 < ns) {
    const double h2 = trace.t[sample + 2] - trace.t[sample];
    const double coarse = (a[sample + 2] - 2.0 * a[sample] + a[sample - 2]) / (h2 * h2);
    r.fd_time_error = std::abs(r.fd_total - coarse) / 3.0;
  }
  return r;
}

AreaProfile area_derivatives(const HomotopyTrace& trace) {
  AreaProfile p;
  p.t = trace.t;
  p.area = area_samples(trace);
  const std::size_t ns = trace.samples();
  p.d_area.resize(ns);
  p.d_area_fd.resize(ns);
  p.d2_area.resize(ns);
  p.d2_area_fd.resize(ns);
  parallel_for(ns, [&](std::size_t s) {
    const SampleIntegrals si = integrate_sample(trace, s, std::nullopt);
    p.d_area[s] = si.d_area;
    p.d2_area[s] = si.terms.total();
  });
  for (std::size_t s = 0; s < ns; ++s) {
    p.d_area_fd[s] = fd_first(p.t, p.area, s);
    p.d2_area_fd[s] = fd_second(p.t, p.area, s);
  }
  return p;
}

std::string to_string(SignStatus s) {
  switch (s) {
    case SignStatus::Pass: return "pass";
    case SignStatus::Fail: return "fail";
    case SignStatus::HypothesisUnmet: return "hypothesis unmet";
  }
  return "?";
}

std::vector<SignCheck> sign_report(const VariationReport& r, double rel_tol) {
  const double thr = -rel_tol * std::max(r.area, 1e-300);
  auto make = [&](std::string name, double value, bool hypothesis) {
    SignCheck c{std::move(name), value, thr, SignStatus::Pass};
    if (!hypothesis) c.status = SignStatus::HypothesisUnmet;
    else if (value < thr) c.status = SignStatus::Fail;
    return c;
  };
  const bool in_n = r.outside_N == 0;
  const bool pairwise = r.pairwise_violations == 0;
  return {
      make("term_i", r.terms.i, in_n),
      make("term_ii", r.terms.ii, pairwise),
      make("term_iii", r.terms.iii, true),
      make("term_v", r.terms.v, true),
      make("total", r.terms.total(), in_n),
  };
}

}  // namespace mgl
