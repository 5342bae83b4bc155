#include "mgl/homotopy.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mgl/io.hpp"
#include "mgl/util.hpp"

namespace mgl {

double HomotopyTrace::max_spectrum() const {
  double m = 0.0;
  for (const auto& row : spectra)
    for (const auto& s : row)
      if (s.size() > 0) m = std::max(m, s[0]);
  return m;
}

std::vector<double> uniform_samples(int n) {
  if (n < 2) throw std::invalid_argument("need at least 2 t-samples");
  std::vector<double> t(n);
  for (int k = 0; k < n; ++k) t[k] = static_cast<double>(k) / (n - 1);
  t.back() = 1.0;
  return t;
}

HomotopyTrace build_homotopy(const GridMap& f0, const GridMap& f1,
                             const std::vector<double>& t_samples, BoundaryPolicy policy) {
  if (!(f0.domain == f1.domain)) throw std::invalid_argument("homotopy: grid mismatch");
  if (!(f0.target == f1.target)) throw std::invalid_argument("homotopy: target mismatch");
  f0.validate();
  f1.validate();
  if (t_samples.size() < 2 || t_samples.front() != 0.0 || t_samples.back() != 1.0)
    throw std::invalid_argument("homotopy: t-samples must start at 0 and end at 1");
  for (std::size_t k = 1; k < t_samples.size(); ++k)
    if (!(t_samples[k] > t_samples[k - 1]))
      throw std::invalid_argument("homotopy: t-samples must be strictly increasing");
  const double bd = boundary_distance(f0, f1);
  if (policy == BoundaryPolicy::Matching && bd > 1e-10)
    throw std::invalid_argument("homotopy: boundary values differ by " + std::to_string(bd));

  const ModelManifold mf(f0.target);
  const GridDomain& d = f0.domain;
  HomotopyTrace tr;
  tr.f0 = f0;
  tr.f1 = f1;
  tr.t = t_samples;
  const std::size_t ns = t_samples.size();
  tr.maps.resize(ns);
  tr.jacobians.resize(ns);
  tr.spectra.resize(ns);
  tr.velocity.resize(ns);

  parallel_for(ns, [&](std::size_t s) {
    double t = t_samples[s];
    GridMap ft(d, f0.target);
    std::vector<Vec> vel(d.size());
    for (std::size_t k = 0; k < d.size(); ++k) {
      if (!d.active(d.col(k), d.row(k))) continue;
      const Point& p = f0.values[k];
      const Point& q = f1.values[k];
      // Exact endpoints keep the trace bit-identical to its inputs.
      if (s == 0) ft.values[k] = p;
      else if (s + 1 == ns) ft.values[k] = q;
      else ft.values[k] = mf.geodesic_point(p, q, t);
      vel[k] = mf.geodesic_velocity(p, q, t);
    }
    std::vector<NodeJacobian> jac(d.size());
    std::vector<SquaredSpectrum> spec(d.size());
    for (std::size_t k = 0; k < d.size(); ++k) {
      int i = d.col(k), j = d.row(k);
      if (!d.active(i, j)) continue;
      jac[k] = jacobian(mf, ft, i, j);
      spec[k] = SquaredSpectrum::from_spectrum(spectrum_of(jac[k].matrix));
    }
    tr.maps[s] = std::move(ft);
    tr.jacobians[s] = std::move(jac);
    tr.spectra[s] = std::move(spec);
    tr.velocity[s] = std::move(vel);
  });
  return tr;
}

std::vector<double> InterpolantMu::operator()(double t) const {
  double s = (t2 == t1) ? 0.0 : (t - t1) / (t2 - t1);
  std::vector<double> mu(a1.size());
  for (std::size_t i = 0; i < mu.size(); ++i) mu[i] = (1.0 - s) * a1[i] + s * a2[i];
  return mu;
}

DominationReport partial_sum_domination(const HomotopyTrace& trace, int l, std::size_t i1,
                                        std::size_t i2, double tol) {
  if (l < 1 || l > kSourceDim) throw std::invalid_argument("partial sum index out of range");
  if (i1 >= i2 || i2 >= trace.samples())
    throw std::invalid_argument("domination interval must satisfy i1 < i2 < samples");
  DominationReport r;
  r.l = l;
  r.tolerance = tol >= 0.0 ? tol : 1e-6 * std::max(1.0, trace.max_spectrum());
  for (std::size_t k = 0; k < trace.nodes(); ++k) {
    if (!trace.active(k)) continue;
    InterpolantMu mu{trace.t[i1], trace.t[i2], trace.spectra[i1][k], trace.spectra[i2][k]};
    for (std::size_t s = i1 + 1; s < i2; ++s) {
      auto m = mu(trace.t[s]);
      const auto& a = trace.spectra[s][k];
      double lhs = 0.0, rhs = 0.0;
      for (int i = 0; i < l; ++i) {
        lhs += a[i];
        rhs += m[i];
      }
      double excess = lhs - rhs;
      ++r.checks;
      if (excess > r.tolerance) ++r.violations;
      if (r.checks == 1 || excess > r.worst_violation) {
        r.worst_violation = excess;
        r.worst_node = k;
        r.worst_t = trace.t[s];
      }
    }
  }
  return r;
}

namespace {

Eigen::MatrixXd midpoint_directions(const HomotopyTrace& trace, std::size_t node) {
  const auto& j = trace.jacobians[trace.samples() / 2][node].matrix;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(j, Eigen::ComputeFullV);
  return svd.matrixV();
}

}  // namespace

std::vector<double> fk_values(const HomotopyTrace& trace, std::size_t node, int k) {
  if (k < 1 || k > kSourceDim) throw std::invalid_argument("F_k index out of range");
  if (!trace.active(node)) throw std::invalid_argument("F_k at inactive node");
  Eigen::MatrixXd a = midpoint_directions(trace, node);
  std::vector<double> f(trace.samples());
  for (std::size_t s = 0; s < trace.samples(); ++s) {
    const auto& j = trace.jacobians[s][node].matrix;
    double sum = 0.0;
    for (int i = 0; i < k; ++i) sum += (j * a.col(i)).squaredNorm();
    f[s] = sum;
  }
  return f;
}

ConvexityReport fk_convexity(const HomotopyTrace& trace, int k, double tol) {
  if (trace.samples() < 3) throw std::invalid_argument("convexity needs 3 t-samples");
  ConvexityReport r;
  r.k = k;
  std::vector<std::vector<double>> all(trace.nodes());
  for (std::size_t n = 0; n < trace.nodes(); ++n) {
    if (!trace.active(n)) continue;
    all[n] = fk_values(trace, n, k);
    for (double v : all[n]) r.max_F = std::max(r.max_F, v);
  }
  r.tolerance = tol >= 0.0 ? tol : 1e-5 * std::max(1.0, r.max_F);
  bool first = true;
  const auto& t = trace.t;
  for (std::size_t n = 0; n < trace.nodes(); ++n) {
    if (all[n].empty()) continue;
    const auto& f = all[n];
    for (std::size_t s = 1; s + 1 < f.size(); ++s) {
      // Second divided difference scaled by the squared mean spacing; equal
      // to the centered second difference on uniform samples.
      double h0 = t[s] - t[s - 1], h1 = t[s + 1] - t[s];
      double dd = 2.0 * ((f[s + 1] - f[s]) / h1 - (f[s] - f[s - 1]) / h0) / (h0 + h1);
      double sd = dd * 0.25 * (h0 + h1) * (h0 + h1);
      if (sd < -r.tolerance) ++r.violations;
      if (first || sd < r.min_second_difference) {
        r.min_second_difference = sd;
        r.worst_node = n;
        first = false;
      }
    }
  }
  return r;
}

ConfinementTraceReport confinement_check(const HomotopyTrace& trace, const Region& c) {
  ConfinementTraceReport r;
  const std::size_t last = trace.samples() - 1;
  for (std::size_t k = 0; k < trace.nodes(); ++k) {
    if (!trace.active(k)) continue;
    ++r.nodes;
    bool met = c(trace.spectra[0][k]).member && c(trace.spectra[last][k]).member;
    if (!met) {
      ++r.hypothesis_unmet;
      continue;
    }
    ++r.hypothesis_met;
    bool bad = false, degenerate = false;
    for (std::size_t s = 0; s <= last; ++s) {
      const auto& a = trace.spectra[s][k];
      auto v = in_N_closure(a);
      if (!v.member) bad = true;
      else if (s > 0 && s < last && v.on_boundary && a[0] > 1.0) degenerate = true;
    }
    if (bad) ++r.violations;
    if (degenerate) ++r.degenerate_boundary_nodes;
  }
  if (r.hypothesis_met == 0) r.status = "hypothesis unmet";
  else if (r.violations > 0) r.status = "violated";
  else if (r.hypothesis_unmet > 0) r.status = "confined (hypothesis met on part of the grid)";
  else r.status = "confined";
  return r;
}

void write_trace_csv(const HomotopyTrace& trace, std::ostream& out) {
  const int m = kSourceDim;
  std::vector<std::string> header{"node_i", "node_j", "t"};
  for (int i = 1; i <= m; ++i) header.push_back("lambda" + std::to_string(i) + "_sq");
  for (int i = 1; i <= m; ++i) header.push_back("S_" + std::to_string(i));
  for (int i = 1; i <= m; ++i) header.push_back("mu_S_" + std::to_string(i));
  CsvWriter csv(out, header);
  const std::size_t last = trace.samples() - 1;
  const auto& d = trace.f0.domain;
  for (std::size_t k = 0; k < trace.nodes(); ++k) {
    if (!trace.active(k)) continue;
    InterpolantMu mu{0.0, 1.0, trace.spectra[0][k], trace.spectra[last][k]};
    for (std::size_t s = 0; s <= last; ++s) {
      const auto& a = trace.spectra[s][k];
      const auto mv = mu(trace.t[s]);
      csv << d.col(k) << d.row(k) << trace.t[s];
      for (int i = 0; i < m; ++i) csv << a[i];
      double ps = 0.0;
      for (int i = 0; i < m; ++i) csv << (ps += a[i]);
      ps = 0.0;
      for (int i = 0; i < m; ++i) csv << (ps += mv[i]);
      csv.end_row();
    }
  }
}

}  // namespace mgl
