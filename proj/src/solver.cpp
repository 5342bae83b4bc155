#include "mgl/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mgl/util.hpp"

namespace mgl {

namespace {

// sqrt(det(I + G)) with G the Gram matrix of the axis derivatives.
double area_density(const ModelManifold& mf, const GridMap& f, int i, int j) {
  const Vec dx = axis_derivative(mf, f, i, j, 0);
  const Vec dy = axis_derivative(mf, f, i, j, 1);
  const double gxx = 1.0 + mf.inner(dx, dx), gyy = 1.0 + mf.inner(dy, dy);
  const double gxy = mf.inner(dx, dy);
  return std::sqrt(std::max(0.0, gxx * gyy - gxy * gxy));
}

// Active nodes whose derivative stencils may reference node (i, j).
std::vector<std::pair<int, int>> stencil_support(const GridDomain& d, int i, int j) {
  std::vector<std::pair<int, int>> out{{i, j}};
  for (int k = -2; k <= 2; ++k) {
    if (k == 0) continue;
    if (d.active(i + k, j)) out.emplace_back(i + k, j);
    if (d.active(i, j + k)) out.emplace_back(i, j + k);
  }
  return out;
}

double local_volume(const ModelManifold& mf, const GridMap& f, const std::vector<double>& w,
                    const std::vector<std::pair<int, int>>& nodes) {
  double s = 0.0;
  for (auto [i, j] : nodes) {
    const double wk = w[f.domain.index(i, j)];
    if (wk != 0.0) s += wk * area_density(mf, f, i, j);
  }
  return s;
}

double discrete_volume(const ModelManifold& mf, const GridMap& f, const std::vector<double>& w) {
  std::vector<double> terms(f.domain.size(), 0.0);
  parallel_for(terms.size(), [&](std::size_t k) {
    if (w[k] != 0.0) terms[k] = w[k] * area_density(mf, f, f.domain.col(k), f.domain.row(k));
  });
  return pairwise_sum(terms);
}

void check_compatible(const BoundaryData& b, const GridMap& init) {
  if (!(b.domain == init.domain) || !(b.target == init.target))
    throw std::invalid_argument("initial map does not match the boundary grid/target");
  const ModelManifold mf(b.target);
  for (std::size_t k = 0; k < b.values.size(); ++k) {
    if (!b.values[k]) continue;
    if (mf.distance(*b.values[k], init.values[k]) > 1e-10)
      throw std::invalid_argument("initial map does not match the boundary data");
  }
}

double sor_omega_for(const GridDomain& d) {
  const double rho = 0.5 * (std::cos(M_PI / (d.nx - 1)) + std::cos(M_PI / (d.ny - 1)));
  return 2.0 / (1.0 + std::sqrt(std::max(0.0, 1.0 - rho * rho)));
}

}  // namespace

void SolverOptions::validate() const {
  if (max_outer < 0 || inner_sweeps < 1) throw std::invalid_argument("bad iteration counts");
  if (!(sor_omega > 0.0 && sor_omega < 2.0)) throw std::invalid_argument("sor_omega in (0,2)");
  if (!(tol_residual > 0.0)) throw std::invalid_argument("tol_residual must be positive");
  if (!(damping > 0.0 && damping <= 1.0)) throw std::invalid_argument("damping in (0,1]");
}

BoundaryData BoundaryData::from_map(const GridMap& f) {
  BoundaryData b{f.domain, f.target, std::vector<std::optional<Point>>(f.domain.size())};
  for (std::size_t k = 0; k < f.values.size(); ++k) {
    if (f.domain.boundary(f.domain.col(k), f.domain.row(k))) b.values[k] = f.values[k];
  }
  return b;
}

void BoundaryData::require_complete() const {
  domain.validate();
  if (values.size() != domain.size()) throw std::invalid_argument("boundary value count mismatch");
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (domain.boundary(domain.col(k), domain.row(k)) && !values[k])
      throw std::invalid_argument("missing boundary value at node (" +
                                  std::to_string(domain.col(k)) + ", " +
                                  std::to_string(domain.row(k)) + ")");
  }
}

void BoundaryData::impose(GridMap& f) const {
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (values[k] && domain.boundary(domain.col(k), domain.row(k))) f.values[k] = *values[k];
  }
}

GridMap harmonic_extension(const BoundaryData& boundary, double tol, int max_sweeps) {
  boundary.require_complete();
  const ModelManifold mf(boundary.target);
  const GridDomain& d = boundary.domain;
  GridMap f(d, boundary.target);

  // Start the interior at the normalized mean of the boundary values.
  Point mean = Point::Zero(mf.ambient_dim());
  int count = 0;
  for (std::size_t k = 0; k < boundary.values.size(); ++k) {
    if (boundary.values[k] && d.boundary(d.col(k), d.row(k))) {
      mean += *boundary.values[k];
      ++count;
    }
  }
  mean /= std::max(count, 1);
  if (mf.hyperbolic()) mean = mf.lift(mean.tail(mf.dim()));
  for (auto& v : f.values) v = mean;
  boundary.impose(f);

  const double wx = 1.0 / (d.hx * d.hx), wy = 1.0 / (d.hy * d.hy);
  const double omega = sor_omega_for(d);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double moved = 0.0;
    for (int color = 0; color < 2; ++color) {
      for (int j = 0; j < d.ny; ++j) {
        for (int i = 0; i < d.nx; ++i) {
          if ((i + j) % 2 != color || !d.interior(i, j)) continue;
          Point& c = f.at(i, j);
          const Vec step = (wx * (mf.log_map(c, f.at(i + 1, j)) + mf.log_map(c, f.at(i - 1, j))) +
                            wy * (mf.log_map(c, f.at(i, j + 1)) + mf.log_map(c, f.at(i, j - 1)))) /
                           (2.0 * (wx + wy));
          moved = std::max(moved, omega * mf.norm(step));
          c = mf.exp_map(c, omega * step);
        }
      }
    }
    if (moved < tol) break;
  }
  return f;
}

SolveOutcome solve_euclidean(const BoundaryData& boundary, const GridMap& init,
                             const SolverOptions& opts) {
  opts.validate();
  boundary.require_complete();
  if (boundary.target.kind != ManifoldKind::Euclidean)
    throw std::invalid_argument("solve_euclidean requires a euclidean target");
  check_compatible(boundary, init);

  SolveOutcome out;
  out.map = init;
  boundary.impose(out.map);
  GridMap& f = out.map;
  const GridDomain& d = f.domain;
  const int n = f.target.dim;

  std::vector<std::vector<double>> comp(n, std::vector<double>(d.size()));
  auto unpack = [&] {
    for (int a = 0; a < n; ++a)
      for (std::size_t k = 0; k < d.size(); ++k) comp[a][k] = f.values[k][a];
  };
  auto pack = [&] {
    for (std::size_t k = 0; k < d.size(); ++k) {
      if (!d.interior(d.col(k), d.row(k))) continue;
      for (int a = 0; a < n; ++a) f.values[k][a] = comp[a][k];
    }
  };

  std::vector<double> residual_history;
  out.final_residual = max_abs(ms_residual(f));
  out.volume_history.push_back(graph_volume(f));
  residual_history.push_back(out.final_residual);
  if (out.final_residual <= opts.tol_residual) {
    out.converged = true;
    out.message = "initial map already satisfies the tolerance";
    return out;
  }

  std::vector<Eigen::Matrix2d> coeff;
  for (int outer = 1; outer <= opts.max_outer; ++outer) {
    const auto fresh = area_coefficient_field(f);
    if (coeff.empty() || opts.damping == 1.0) {
      coeff = fresh;
    } else {
      for (std::size_t k = 0; k < coeff.size(); ++k)
        coeff[k] = opts.damping * fresh[k] + (1.0 - opts.damping) * coeff[k];
    }
    std::vector<double> center(d.size(), 0.0);
    for (int j = 0; j < d.ny; ++j)
      for (int i = 0; i < d.nx; ++i)
        if (d.interior(i, j)) center[d.index(i, j)] = divergence_center(d, coeff, i, j);

    unpack();
    for (int sweep = 0; sweep < opts.inner_sweeps; ++sweep) {
      for (int color = 0; color < 2; ++color) {
        for (int j = 0; j < d.ny; ++j) {
          for (int i = 0; i < d.nx; ++i) {
            if ((i + j) % 2 != color || !d.interior(i, j)) continue;
            const std::size_t k = d.index(i, j);
            for (int a = 0; a < n; ++a) {
              const double r = divergence_at(d, coeff, comp[a], i, j);
              comp[a][k] -= opts.sor_omega * r / center[k];
            }
          }
        }
      }
    }
    pack();

    out.iterations = outer;
    out.final_residual = max_abs(ms_residual(f));
    out.volume_history.push_back(graph_volume(f));
    residual_history.push_back(out.final_residual);
    if (!std::isfinite(out.final_residual)) {
      out.message = "residual is not finite";
      return out;
    }
    if (out.final_residual <= opts.tol_residual) {
      out.converged = true;
      out.message = "converged";
      return out;
    }
    if (outer >= 20 && out.final_residual > 10.0 * residual_history[outer - 20]) {
      out.message = "diverging: residual grew tenfold over 20 outer iterations";
      return out;
    }
  }
  out.message = "iteration limit reached";
  return out;
}

std::vector<Vec> volume_gradient(const GridMap& f) {
  const ModelManifold mf(f.target);
  const GridDomain& d = f.domain;
  const auto w = d.quadrature_weights();
  const double eps = 1e-5;
  std::vector<Vec> grad(d.size(), Vec::Zero(mf.ambient_dim()));
  parallel_for(d.size(), [&](std::size_t k) {
    const int i = d.col(k), j = d.row(k);
    if (!d.interior(i, j)) return;
    GridMap local = f;  // private copy; only node k is perturbed
    const auto support = stencil_support(d, i, j);
    const Point base = f.values[k];
    const Eigen::MatrixXd frame = mf.orthonormal_frame(base);
    Eigen::VectorXd g(mf.dim());
    for (int a = 0; a < mf.dim(); ++a) {
      local.values[k] = mf.exp_map(base, eps * frame.col(a));
      const double plus = local_volume(mf, local, w, support);
      local.values[k] = mf.exp_map(base, -eps * frame.col(a));
      const double minus = local_volume(mf, local, w, support);
      g[a] = (plus - minus) / (2.0 * eps);
    }
    grad[k] = mf.from_frame(frame, g);
  });
  return grad;
}

SolveOutcome solve_hyperbolic(const BoundaryData& boundary, const GridMap& init,
                              const SolverOptions& opts) {
  opts.validate();
  boundary.require_complete();
  check_compatible(boundary, init);
  const ModelManifold mf(boundary.target);

  SolveOutcome out;
  out.map = init;
  boundary.impose(out.map);
  const GridDomain& d = out.map.domain;
  const auto w = d.quadrature_weights();

  // Gradient in the lumped L2 metric, comparable to the euclidean residual.
  auto max_norm = [&](const std::vector<Vec>& g) {
    double m = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k)
      if (w[k] > 0.0 && d.interior(d.col(k), d.row(k))) m = std::max(m, mf.norm(g[k]) / w[k]);
    return m;
  };

  double volume = discrete_volume(mf, out.map, w);
  out.volume_history.push_back(volume);
  std::vector<Vec> grad = volume_gradient(out.map);
  out.final_residual = max_norm(grad);
  if (out.final_residual <= opts.tol_residual) {
    out.converged = true;
    out.message = "initial map already satisfies the tolerance";
    return out;
  }

  // Descent direction is the gradient scaled by the inverse lumped mass.
  auto direction_of = [&](const std::vector<Vec>& g) {
    std::vector<Vec> dir(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) dir[k] = w[k] > 0.0 ? Vec(-g[k] / w[k]) : g[k];
    return dir;
  };

  double step = std::min(d.hx, d.hy) * std::min(d.hx, d.hy) * 0.25;
  std::vector<Vec> dir = direction_of(grad);
  const double armijo = 1e-4;
  for (int iter = 1; iter <= opts.max_outer; ++iter) {
    double slope = 0.0;  // directional derivative, negative
    for (std::size_t k = 0; k < d.size(); ++k) {
      if (d.interior(d.col(k), d.row(k))) slope += mf.inner(grad[k], dir[k]);
    }
    GridMap trial = out.map;
    double trial_volume = volume;
    bool accepted = false;
    for (int halving = 0; halving < 60; ++halving) {
      for (std::size_t k = 0; k < d.size(); ++k) {
        if (d.interior(d.col(k), d.row(k)))
          trial.values[k] = mf.exp_map(out.map.values[k], step * dir[k]);
      }
      trial_volume = discrete_volume(mf, trial, w);
      if (trial_volume <= volume + armijo * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    out.iterations = iter;
    if (!accepted) {
      out.message = "line search failed";
      return out;
    }

    std::vector<Vec> new_grad = volume_gradient(trial);
    std::vector<Vec> new_dir = direction_of(new_grad);
    // Barzilai-Borwein estimate for the next trial step.
    double ss = 0.0, sy = 0.0;
    for (std::size_t k = 0; k < d.size(); ++k) {
      if (!d.interior(d.col(k), d.row(k))) continue;
      const Vec s = step * dir[k];
      const Vec y = dir[k] - new_dir[k];
      ss += w[k] * mf.inner(s, s);
      sy += w[k] * mf.inner(s, y);
    }
    const double previous = step;
    step = sy > 0.0 ? ss / sy : 2.0 * previous;
    step = std::clamp(step, 1e-3 * previous, 1e3 * previous);

    out.map = std::move(trial);
    volume = trial_volume;
    grad = std::move(new_grad);
    dir = std::move(new_dir);
    out.volume_history.push_back(volume);
    out.final_residual = max_norm(grad);
    if (out.final_residual <= opts.tol_residual) {
      out.converged = true;
      out.message = "converged";
      return out;
    }
  }
  out.message = "iteration limit reached";
  return out;
}

SolveOutcome solve_minimal(const BoundaryData& boundary, const GridMap& init,
                           const SolverOptions& opts) {
  if (boundary.target.kind == ManifoldKind::Euclidean)
    return solve_euclidean(boundary, init, opts);
  return solve_hyperbolic(boundary, init, opts);
}

double data_scale(const BoundaryData& boundary) {
  const ModelManifold mf(boundary.target);
  const Point* first = nullptr;
  double scale = 0.0;
  for (const auto& v : boundary.values) {
    if (!v) continue;
    if (!first) {
      first = &*v;
      continue;
    }
    scale = std::max(scale, mf.distance(*first, *v));
  }
  return scale > 0.0 ? scale : 1.0;
}

GridMap perturbed_initialization(const BoundaryData& boundary, double amplitude,
                                 std::uint64_t seed) {
  GridMap f = harmonic_extension(boundary);
  const ModelManifold mf(boundary.target);
  const GridDomain& d = f.domain;
  Rng rng(seed);
  // Two low sine modes per frame direction.
  const int n = mf.dim();
  Eigen::MatrixXd coef(n, 4);
  for (int a = 0; a < n; ++a)
    for (int m = 0; m < 4; ++m) coef(a, m) = rng.uniform(-1.0, 1.0);
  const double lx = (d.nx - 1) * d.hx, ly = (d.ny - 1) * d.hy;
  std::vector<Eigen::VectorXd> bump(d.size(), Eigen::VectorXd::Zero(n));
  double peak = 0.0;
  for (std::size_t k = 0; k < d.size(); ++k) {
    const int i = d.col(k), j = d.row(k);
    if (!d.interior(i, j)) continue;
    const double sx = d.x(i) / lx, sy = d.y(j) / ly;
    const double modes[4] = {std::sin(M_PI * sx) * std::sin(M_PI * sy),
                             std::sin(2 * M_PI * sx) * std::sin(M_PI * sy),
                             std::sin(M_PI * sx) * std::sin(2 * M_PI * sy),
                             std::sin(2 * M_PI * sx) * std::sin(2 * M_PI * sy)};
    for (int a = 0; a < n; ++a)
      for (int m = 0; m < 4; ++m) bump[k][a] += coef(a, m) * modes[m];
    peak = std::max(peak, bump[k].norm());
  }
  if (peak == 0.0) return f;
  for (std::size_t k = 0; k < d.size(); ++k) {
    if (!d.interior(d.col(k), d.row(k))) continue;
    const Eigen::MatrixXd frame = mf.orthonormal_frame(f.values[k]);
    f.values[k] = mf.exp_map(f.values[k], mf.from_frame(frame, bump[k] * (amplitude / peak)));
  }
  return f;
}

std::string to_string(UniquenessVerdict v) {
  switch (v) {
    case UniquenessVerdict::Unique: return "unique";
    case UniquenessVerdict::TheoremSilent: return "out of region — theorem silent";
    case UniquenessVerdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

UniquenessReport uniqueness_experiment(const BoundaryData& boundary, const Region& region,
                                       const SolverOptions& opts, int runs,
                                       double distance_tol) {
  if (runs < 2) throw std::invalid_argument("uniqueness experiment needs at least two runs");
  boundary.require_complete();
  const double amplitude = 0.1 * data_scale(boundary);
  UniquenessReport report;
  bool all_converged = true;
  report.in_region = true;
  for (int r = 0; r < runs; ++r) {
    const GridMap init = r == 0 ? harmonic_extension(boundary)
                                : perturbed_initialization(boundary, amplitude, opts.seed + r);
    SolveOutcome sol = solve_minimal(boundary, init, opts);
    UniquenessRun run;
    run.converged = sol.converged;
    run.iterations = sol.iterations;
    run.final_residual = sol.final_residual;
    const RegionField field = region_field(sol.map, region);
    run.in_region = field.all_member;
    run.min_margin = field.min_margin;
    run.non_members = field.non_members;
    for (std::size_t k = 0; k < field.spectra.size(); ++k) {
      if (sol.map.domain.active(sol.map.domain.col(k), sol.map.domain.row(k)))
        run.max_slope = std::max(run.max_slope, slope_from_squared(field.spectra[k]));
    }
    all_converged = all_converged && run.converged;
    report.in_region = report.in_region && run.in_region;
    report.runs.push_back(run);
    report.solutions.push_back(std::move(sol.map));
  }
  for (std::size_t a = 0; a < report.solutions.size(); ++a)
    for (std::size_t b = a + 1; b < report.solutions.size(); ++b)
      report.max_pair_distance =
          std::max(report.max_pair_distance, sup_distance(report.solutions[a], report.solutions[b]));

  if (!all_converged) {
    report.verdict = UniquenessVerdict::Inconclusive;
    report.conclusion = "inconclusive: a solve did not converge";
  } else if (!report.in_region) {
    report.verdict = UniquenessVerdict::TheoremSilent;
    report.conclusion = to_string(report.verdict);
  } else if (report.max_pair_distance <= distance_tol) {
    report.verdict = UniquenessVerdict::Unique;
    report.conclusion = to_string(report.verdict);
  } else {
    report.verdict = UniquenessVerdict::Inconclusive;
    report.conclusion = "inconclusive: in-region solutions differ beyond tolerance";
  }
  return report;
}

}  // namespace mgl
