#include "pdthreat/sublevel.hpp"

#include <algorithm>
#include <cmath>

#include "pdthreat/error.hpp"
#include "pdthreat/threat.hpp"

namespace pdthreat {

namespace {

// Relative violations below this are rounding noise and left alone.
constexpr double kShrinkThreshold = 1e-12;

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0)) {
    throw Error(ErrorCode::kNonPositiveEpsilon,
                "epsilon must be positive, got " + std::to_string(epsilon));
  }
}

// Largest s in (0,1] with s*point inside both the sublevel set and (when
// radius > 0) the l_inf ball. Both sets are convex and contain 0.
double feasible_scale(const SublevelSet& set, std::span<const double> point, double radius) {
  double s = 1.0;
  for (std::size_t j = 0; j < set.size(); ++j) {
    const double p = dot(point, set.normal(j));
    if (p > set.offsets[j] * (1.0 + kShrinkThreshold)) s = std::min(s, set.offsets[j] / p);
  }
  if (radius > 0.0) {
    const double m = norm_inf(point);
    if (m > radius * (1.0 + kShrinkThreshold)) s = std::min(s, radius / m);
  }
  return s;
}

// Solves the small dense system m z = r in place; false when (near) singular.
bool solve_dense(std::vector<double>& m, std::vector<double>& r) {
  const std::size_t n = r.size();
  double scale = 0.0;
  for (const double v : m) scale = std::max(scale, std::abs(v));
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t i = col + 1; i < n; ++i) {
      if (std::abs(m[i * n + col]) > std::abs(m[piv * n + col])) piv = i;
    }
    if (std::abs(m[piv * n + col]) <= 1e-12 * scale) return false;
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m[piv * n + j], m[col * n + j]);
      std::swap(r[piv], r[col]);
    }
    for (std::size_t i = col + 1; i < n; ++i) {
      const double f = m[i * n + col] / m[col * n + col];
      for (std::size_t j = col; j < n; ++j) m[i * n + j] -= f * m[col * n + j];
      r[i] -= f * r[col];
    }
  }
  for (std::size_t i = n; i-- > 0;) {
    double v = r[i];
    for (std::size_t j = i + 1; j < n; ++j) v -= m[i * n + j] * r[j];
    r[i] = v / m[i * n + i];
  }
  return true;
}

// Exact KKT solve on the support of lambda: the projection onto the affine
// set where those halfspaces are tight. Accepted only if every multiplier is
// nonnegative and the point satisfies all halfspaces, which certifies it as
// the Euclidean projection. Updates point and lambda on success.
bool polish(const SublevelSet& set, std::span<const double> delta, double tol, Vec& point,
            std::vector<double>& lambda) {
  std::vector<std::size_t> support;
  for (std::size_t j = 0; j < lambda.size(); ++j) {
    if (lambda[j] > 0.0) support.push_back(j);
  }
  const std::size_t s = support.size();
  if (s == 0 || s > set.dim) return false;
  std::vector<double> gram(s * s), rhs(s);
  for (std::size_t p = 0; p < s; ++p) {
    for (std::size_t q = 0; q < s; ++q) {
      gram[p * s + q] = dot(set.normal(support[p]), set.normal(support[q]));
    }
    rhs[p] = dot(delta, set.normal(support[p])) - set.offsets[support[p]];
  }
  if (!solve_dense(gram, rhs)) return false;
  if (std::any_of(rhs.begin(), rhs.end(), [](double mu) { return mu < 0.0; })) return false;
  Vec z(delta.begin(), delta.end());
  for (std::size_t p = 0; p < s; ++p) {
    const auto u = set.normal(support[p]);
    for (std::size_t i = 0; i < z.size(); ++i) z[i] -= rhs[p] * u[i];
  }
  for (std::size_t j = 0; j < set.size(); ++j) {
    if (dot(std::span<const double>(z), set.normal(j)) - set.offsets[j] > tol) return false;
  }
  point = std::move(z);
  std::fill(lambda.begin(), lambda.end(), 0.0);
  for (std::size_t p = 0; p < s; ++p) lambda[support[p]] = rhs[p];
  return true;
}

// Passes between polish attempts in corrected mode.
constexpr std::size_t kPolishInterval = 32;

void scale_in_place(Vec& v, double s) {
  if (s < 1.0) {
    for (auto& x : v) x *= s;
  }
}

}  // namespace

SublevelSet build_sublevel(const UnsafeDirectionSet& dirs, double epsilon) {
  check_epsilon(epsilon);
  if (dirs.empty()) throw Error(ErrorCode::kEmptyDirectionSet, "no unsafe directions");
  SublevelSet set;
  set.dim = dirs.dim;
  set.epsilon = epsilon;
  set.normals = dirs.units;
  set.offsets.reserve(dirs.size());
  for (const auto& d : dirs.directions) set.offsets.push_back(epsilon * d.g);
  set.x = dirs.x;
  set.label = dirs.label;
  return set;
}

bool contains(const SublevelSet& set, std::span<const double> delta, double tol) {
  check_dim(delta.size(), set.dim, "contains");
  for (std::size_t j = 0; j < set.size(); ++j) {
    if (dot(delta, set.normal(j)) > set.offsets[j] * (1.0 + tol)) return false;
  }
  return true;
}

double max_relative_violation(const SublevelSet& set, std::span<const double> delta) {
  check_dim(delta.size(), set.dim, "max_relative_violation");
  double worst = 0.0;
  for (std::size_t j = 0; j < set.size(); ++j) {
    worst = std::max(worst, (dot(delta, set.normal(j)) - set.offsets[j]) / set.offsets[j]);
  }
  return worst;
}

Vec lazy_project(const UnsafeDirectionSet& dirs, std::span<const double> delta,
                 double epsilon) {
  check_epsilon(epsilon);
  const double t = pd_threat(dirs, delta).threat;
  Vec out(delta.begin(), delta.end());
  if (t > epsilon) scale_in_place(out, epsilon / t);
  return out;
}

Vec halfspace_project(std::span<const double> u, double b, std::span<const double> delta) {
  check_dim(delta.size(), u.size(), "halfspace_project");
  if (std::abs(norm2(u) - 1.0) > 1e-6) {
    throw Error(ErrorCode::kNonUnitDirection, "halfspace normal is not unit length");
  }
  Vec out(delta.begin(), delta.end());
  const double excess = std::max(dot(delta, u) - b, 0.0);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= excess * u[i];
  return out;
}

double default_tolerance(std::span<const double> delta) {
  return 1e-7 * std::max(1.0, norm2(delta));
}

ProjectionResult greedy_project(const SublevelSet& set, std::span<const double> delta,
                                std::size_t max_iters, double tol, GreedyMode mode,
                                std::vector<Vec>* trace) {
  check_dim(delta.size(), set.dim, "greedy_project");
  if (max_iters == 0) throw Error(ErrorCode::kInvalidArgument, "max_iters must be >= 1");
  if (tol < 0.0) tol = default_tolerance(delta);
  const std::size_t m = set.size();
  const std::size_t d = set.dim;

  ProjectionResult result;
  result.point.assign(delta.begin(), delta.end());
  Vec& a = result.point;
  // Dual weights of the halfspaces; a = delta - sum_j lambda_j u_j.
  std::vector<double> lambda(m, 0.0);

  while (result.iterations < max_iters) {
    ++result.iterations;
    std::size_t pick = m;
    double pick_step = 0.0;
    double pick_move = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double v = dot(std::span<const double>(a), set.normal(j)) - set.offsets[j];
      double step = 0.0;
      if (mode == GreedyMode::kCorrected) {
        step = std::max(0.0, lambda[j] + v) - lambda[j];
      } else {
        step = std::max(v, 0.0);
      }
      if (std::abs(step) > pick_move) {
        pick_move = std::abs(step);
        pick_step = step;
        pick = j;
      }
    }
    if (pick == m || pick_move <= tol) {
      result.converged = true;
      break;
    }
    const auto u = set.normal(pick);
    for (std::size_t i = 0; i < d; ++i) a[i] -= pick_step * u[i];
    lambda[pick] += pick_step;
    if (trace) trace->push_back(a);
    if (mode == GreedyMode::kCorrected && result.iterations % kPolishInterval == 0 &&
        polish(set, delta, tol, a, lambda)) {
      if (trace) trace->push_back(a);
      result.converged = true;
      break;
    }
  }
  scale_in_place(a, feasible_scale(set, a, 0.0));
  result.residual = max_relative_violation(set, a);
  return result;
}

IntersectionResult project_intersection_linf(const SublevelSet& set,
                                             std::span<const double> delta,
                                             double linf_radius, std::size_t max_iters,
                                             double tol, IntersectionMode mode) {
  check_dim(delta.size(), set.dim, "project_intersection_linf");
  if (!(linf_radius > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "l_inf radius must be positive");
  }
  if (max_iters == 0) throw Error(ErrorCode::kInvalidArgument, "max_iters must be >= 1");
  if (tol < 0.0) tol = default_tolerance(delta);
  const std::size_t d = set.dim;
  auto clamp_box = [&](Vec& v) {
    for (auto& x : v) x = std::clamp(x, -linf_radius, linf_radius);
  };

  IntersectionResult result;
  if (mode == IntersectionMode::kSinglePass) {
    Vec y(delta.begin(), delta.end());
    clamp_box(y);
    auto inner = greedy_project(set, y, max_iters, tol);
    result.point = std::move(inner.point);
    result.iterations = 1;
    result.converged = inner.converged;
  } else {
    // Dykstra's alternating projections; p and q carry the correction terms
    // for the box and the sublevel set.
    Vec x(delta.begin(), delta.end());
    Vec p(d, 0.0), q(d, 0.0), y(d), z_in(d);
    while (result.iterations < max_iters) {
      ++result.iterations;
      for (std::size_t i = 0; i < d; ++i) y[i] = x[i] + p[i];
      for (std::size_t i = 0; i < d; ++i) {
        const double c = std::clamp(y[i], -linf_radius, linf_radius);
        p[i] = y[i] - c;
        y[i] = c;
      }
      for (std::size_t i = 0; i < d; ++i) z_in[i] = y[i] + q[i];
      auto inner = greedy_project(set, z_in, max_iters, tol);
      double change = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        q[i] = z_in[i] - inner.point[i];
        change = std::max(change, std::abs(inner.point[i] - x[i]));
      }
      x = std::move(inner.point);
      const double excess = norm_inf(std::span<const double>(x)) - linf_radius;
      if (change <= tol && excess <= tol) {
        result.converged = true;
        break;
      }
    }
    result.point = std::move(x);
  }
  scale_in_place(result.point, feasible_scale(set, result.point, linf_radius));
  result.residual = max_relative_violation(set, result.point);
  result.linf_excess =
      std::max(0.0, norm_inf(std::span<const double>(result.point)) - linf_radius);
  return result;
}

}  // namespace pdthreat
