#include "mgl/majorization.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace mgl {

namespace {

std::vector<double> sorted_desc(std::span<const double> v) {
  std::vector<double> s(v.begin(), v.end());
  std::sort(s.begin(), s.end(), std::greater<>());
  return s;
}

void require_same_length(std::size_t a, std::size_t b) {
  if (a != b) throw std::invalid_argument("majorization: length mismatch");
}

void require_extreme_dim(std::size_t m) {
  if (m > kMaxExtremeDim)
    throw std::length_error("extreme point enumeration limited to m <= 8");
}

// Distinct vectors whose entries are either 0 or a distinct element of x,
// one element of x used at most once.
void enumerate_partial_injections(const std::vector<double>& values, std::vector<int>& remaining,
                                  std::vector<double>& current, std::size_t pos,
                                  std::vector<std::vector<double>>& out) {
  if (pos == current.size()) {
    out.push_back(current);
    return;
  }
  current[pos] = 0.0;
  enumerate_partial_injections(values, remaining, current, pos + 1, out);
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (remaining[k] == 0) continue;
    --remaining[k];
    current[pos] = values[k];
    enumerate_partial_injections(values, remaining, current, pos + 1, out);
    ++remaining[k];
  }
}

// Phase-I simplex on A w = b, w >= 0 with b >= 0.  Columns of A are the
// extreme points with an appended 1 (weights sum to one).  Returns the
// minimal total infeasibility sum(b - A w).
double phase_one_infeasibility(const std::vector<std::vector<double>>& points,
                               std::span<const double> y) {
  const std::size_t m = y.size();
  const std::size_t rows = m + 1;
  const std::size_t p = points.size();
  const std::size_t cols = p + rows;  // structural + slack-like artificials
  // Dense tableau: rows x (cols + 1), last column holds the rhs.
  std::vector<double> tab(rows * (cols + 1), 0.0);
  auto at = [&](std::size_t r, std::size_t c) -> double& { return tab[r * (cols + 1) + c]; };
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t r = 0; r < m; ++r) at(r, j) = points[j][r];
    at(m, j) = 1.0;
  }
  for (std::size_t r = 0; r < rows; ++r) {
    at(r, p + r) = 1.0;
    at(r, cols) = r < m ? y[r] : 1.0;
  }
  std::vector<std::size_t> basis(rows);
  std::iota(basis.begin(), basis.end(), p);

  // Reduced cost of column j for objective sum(artificials): -sum_r A_rj over
  // rows whose basic variable is an artificial.  Maintained explicitly.
  std::vector<double> cost(cols + 1, 0.0);
  for (std::size_t j = 0; j <= cols; ++j) {
    if (j >= p && j < cols) continue;
    double s = 0.0;
    for (std::size_t r = 0; r < rows; ++r) s += at(r, j);
    cost[j] = -s;
  }

  const double eps = 1e-13;
  const std::size_t max_iter = 50 * (cols + rows);
  std::size_t stall = 0;
  double last_obj = -cost[cols];
  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    // Dantzig pricing; Bland's rule after a run of degenerate pivots.
    const bool bland = stall > 2 * rows;
    std::size_t enter = cols;
    double best = -eps;
    for (std::size_t j = 0; j < cols; ++j) {
      if (cost[j] < best) {
        enter = j;
        if (bland) break;
        best = cost[j];
      }
    }
    if (enter == cols) break;

    std::size_t leave = rows;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < rows; ++r) {
      const double a = at(r, enter);
      if (a > eps) {
        const double ratio = at(r, cols) / a;
        if (ratio < best_ratio - 1e-15 ||
            (ratio <= best_ratio + 1e-15 && leave < rows && basis[r] < basis[leave])) {
          best_ratio = ratio;
          leave = r;
        }
      }
    }
    if (leave == rows) break;  // unbounded direction; cannot happen for Phase I

    const double pivot = at(leave, enter);
    for (std::size_t c = 0; c <= cols; ++c) at(leave, c) /= pivot;
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == leave) continue;
      const double f = at(r, enter);
      if (f == 0.0) continue;
      for (std::size_t c = 0; c <= cols; ++c) at(r, c) -= f * at(leave, c);
    }
    const double fc = cost[enter];
    for (std::size_t c = 0; c <= cols; ++c) cost[c] -= fc * at(leave, c);
    basis[leave] = enter;

    const double obj = -cost[cols];
    stall = obj < last_obj - 1e-15 ? 0 : stall + 1;
    last_obj = obj;
  }
  return std::max(0.0, -cost[cols]);
}

}  // namespace

NonNegVector::NonNegVector(std::vector<double> values) : values_(std::move(values)) {
  for (double v : values_) {
    if (!std::isfinite(v) || v < 0.0)
      throw std::invalid_argument("NonNegVector entries must be finite and non-negative");
  }
}

std::vector<double> NonNegVector::sorted_desc() const { return mgl::sorted_desc(values_); }

double NonNegVector::sum() const { return std::accumulate(values_.begin(), values_.end(), 0.0); }

double majorization_slack(std::span<const double> y, std::span<const double> x, std::size_t l) {
  require_same_length(y.size(), x.size());
  if (l < 1 || l > x.size()) throw std::invalid_argument("majorization: l out of range");
  const auto ys = sorted_desc(y);
  const auto xs = sorted_desc(x);
  double sy = 0.0, sx = 0.0;
  double slack = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < l; ++k) {
    sy += ys[k];
    sx += xs[k];
    slack = std::min(slack, sx - sy);
  }
  return slack;
}

bool weakly_majorized(std::span<const double> y, std::span<const double> x, std::size_t l,
                      double tol) {
  return majorization_slack(y, x, l) >= -tol;
}

ExtremeSet extreme_points(const NonNegVector& x) {
  require_extreme_dim(x.size());
  // Multiset of positive values; zeros coincide with deletions.
  std::vector<double> values;
  std::vector<int> counts;
  for (double v : x.sorted_desc()) {
    if (v == 0.0) continue;
    if (!values.empty() && values.back() == v) {
      ++counts.back();
    } else {
      values.push_back(v);
      counts.push_back(1);
    }
  }
  ExtremeSet e{x, {}};
  std::vector<double> current(x.size(), 0.0);
  enumerate_partial_injections(values, counts, current, 0, e.points);
  return e;
}

bool hull_contains(const ExtremeSet& e, std::span<const double> y, double* residual) {
  require_same_length(e.source.size(), y.size());
  for (double v : y) {
    if (v < 0.0) {
      if (residual) *residual = -v;
      return false;
    }
  }
  const double r = phase_one_infeasibility(e.points, y);
  if (residual) *residual = r;
  return r <= kHullTol;
}

bool hull_contains(const NonNegVector& x, const NonNegVector& y, double* residual) {
  require_same_length(x.size(), y.size());
  return hull_contains(extreme_points(x), y.values(), residual);
}

bool w_contains(const NonNegVector& x, const NonNegVector& y) {
  require_same_length(x.size(), y.size());
  return weakly_majorized(y.values(), x.values(), x.size());
}

bool is_rearrangement(std::span<const double> y, std::span<const double> x, double tol) {
  require_same_length(y.size(), x.size());
  const auto ys = sorted_desc(y);
  const auto xs = sorted_desc(x);
  for (std::size_t i = 0; i < ys.size(); ++i) {
    if (std::abs(ys[i] - xs[i]) > tol) return false;
  }
  return true;
}

std::vector<std::vector<double>> sample_W(const NonNegVector& x, std::size_t count, Rng& rng) {
  const std::size_t m = x.size();
  const auto xs = x.values();
  const double top = xs.empty() ? 0.0 : *std::max_element(xs.begin(), xs.end());
  std::vector<std::vector<double>> out;
  out.reserve(count);

  auto random_permutation = [&]() {
    std::vector<double> v = xs;
    for (std::size_t i = m; i > 1; --i) std::swap(v[i - 1], v[rng.index(i)]);
    return v;
  };

  const std::size_t n_face = count / 8;
  const std::size_t n_vertex = count / 16;
  // Points on the face sum(y) = sum(x): convex combinations of rearrangements.
  for (std::size_t s = 0; s < n_face; ++s) {
    const std::size_t parts = 2 + rng.index(2);
    std::vector<double> w(parts);
    double total = 0.0;
    for (auto& wi : w) total += (wi = rng.uniform() + 1e-3);
    std::vector<double> y(m, 0.0);
    for (std::size_t k = 0; k < parts; ++k) {
      const auto perm = random_permutation();
      for (std::size_t i = 0; i < m; ++i) y[i] += w[k] / total * perm[i];
    }
    out.push_back(std::move(y));
  }
  // Vertices of H(x) and their scalings toward the origin.
  for (std::size_t s = 0; s < n_vertex; ++s) {
    auto v = random_permutation();
    for (auto& vi : v) {
      if (rng.uniform() < 0.25) vi = 0.0;
    }
    if (s % 2 == 1) {
      const double scale = rng.uniform();
      for (auto& vi : v) vi *= scale;
    }
    out.push_back(std::move(v));
  }
  // Rejection samples in the bounding box.
  const std::size_t max_attempts = 400 * count + 1000;
  std::size_t attempts = 0;
  std::vector<double> y(m);
  while (out.size() < count && attempts < max_attempts) {
    ++attempts;
    for (auto& yi : y) yi = rng.uniform(0.0, top);
    if (weakly_majorized(y, xs, m)) out.push_back(y);
  }
  // Low-acceptance bodies: fill with scaled face points.
  while (out.size() < count) {
    auto v = random_permutation();
    const double scale = rng.uniform();
    for (auto& vi : v) vi *= scale;
    out.push_back(std::move(v));
  }
  return out;
}

MirskyReport mirsky_agreement(const NonNegVector& x, const GridSampling& grid) {
  const std::size_t m = x.size();
  if (m > 3) throw std::invalid_argument("grid Mirsky check supports m <= 3");
  if (!(grid.step > 0.0)) throw std::invalid_argument("grid step must be positive");
  const ExtremeSet e = extreme_points(x);
  const auto ticks = static_cast<std::size_t>(std::floor(grid.upper / grid.step + 1e-9)) + 1;
  std::size_t total = 1;
  for (std::size_t i = 0; i < m; ++i) total *= ticks;

  std::vector<char> disagree(total, 0), band(total, 0);
  parallel_for(total, [&](std::size_t idx) {
    std::vector<double> y(m);
    std::size_t rest = idx;
    for (std::size_t i = 0; i < m; ++i) {
      y[i] = static_cast<double>(rest % ticks) * grid.step;
      rest /= ticks;
    }
    const bool w = weakly_majorized(y, x.values(), m);
    const bool h = hull_contains(e, y);
    if (w != h) {
      disagree[idx] = 1;
      band[idx] = std::abs(majorization_slack(y, x.values(), m)) <= kHullTol;
    }
  });

  MirskyReport report;
  report.samples = total;
  for (std::size_t idx = 0; idx < total; ++idx) {
    if (!disagree[idx]) continue;
    ++report.disagreements;
    if (band[idx]) ++report.in_band;
    if (report.witnesses.size() < 8) {
      std::vector<double> y(m);
      std::size_t rest = idx;
      for (std::size_t i = 0; i < m; ++i) {
        y[i] = static_cast<double>(rest % ticks) * grid.step;
        rest /= ticks;
      }
      report.witnesses.push_back(std::move(y));
    }
  }
  return report;
}

MirskyReport mirsky_agreement(const NonNegVector& x, const RandomSampling& random) {
  const std::size_t m = x.size();
  if (m > 6) throw std::invalid_argument("random Mirsky check supports m <= 6");
  const ExtremeSet e = extreme_points(x);
  Rng rng(random.seed);
  std::vector<std::vector<double>> ys(random.count, std::vector<double>(m));
  for (auto& y : ys) {
    for (auto& yi : y) yi = rng.uniform(0.0, random.upper);
  }
  std::vector<char> disagree(ys.size(), 0), band(ys.size(), 0);
  parallel_for(ys.size(), [&](std::size_t k) {
    const bool w = weakly_majorized(ys[k], x.values(), m);
    const bool h = hull_contains(e, ys[k]);
    if (w != h) {
      disagree[k] = 1;
      band[k] = std::abs(majorization_slack(ys[k], x.values(), m)) <= kHullTol;
    }
  });
  MirskyReport report;
  report.samples = ys.size();
  for (std::size_t k = 0; k < ys.size(); ++k) {
    if (!disagree[k]) continue;
    ++report.disagreements;
    if (band[k]) ++report.in_band;
    if (report.witnesses.size() < 8) report.witnesses.push_back(ys[k]);
  }
  return report;
}

MonotoneBoundReport lemma_monotone_bound(const ScalarFunction& f, const NonNegVector& x,
                                         std::span<const std::vector<double>> samples,
                                         const DomainPredicate& domain) {
  MonotoneBoundReport report;
  const double fx = f(x.values());
  for (const auto& y : samples) {
    if (domain && !domain(y)) throw std::domain_error("lemma_monotone_bound: sample outside D");
    ++report.samples;
    const double excess = f(y) - fx;
    report.max_excess = std::max(report.max_excess, excess);
    if (excess > kMajorizationTol) ++report.violations;
    if (std::abs(excess) <= kMajorizationTol) {
      ++report.equality_cases;
      if (!is_rearrangement(y, x.values())) ++report.equality_non_rearrangement;
    }
  }
  return report;
}

ConfinementReport confined_region_check(const Region& c, const NonNegVector& x,
                                        std::span<const std::vector<double>> samples,
                                        double sum_tol, double boundary_tol) {
  if (!c(SquaredSpectrum(x.values())).member)
    throw std::domain_error("confined_region_check: x is not in the region");
  ConfinementReport report;
  const double sx = x.sum();
  for (const auto& y : samples) {
    ++report.samples;
    const SquaredSpectrum a(y);
    if (!in_N_closure(a).member) {
      ++report.outside_N;
      continue;
    }
    if (a[0] > 1.0 && on_N_boundary(a, boundary_tol)) {
      ++report.boundary_samples;
      const double gap = std::abs(std::accumulate(y.begin(), y.end(), 0.0) - sx);
      report.max_boundary_sum_gap = std::max(report.max_boundary_sum_gap, gap);
      if (gap > sum_tol) ++report.sum_gap_violations;
    }
  }
  return report;
}

}  // namespace mgl
