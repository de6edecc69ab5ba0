#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pdthreat/unsafe_index.hpp"
#include "pdthreat/vec.hpp"

namespace pdthreat {

inline constexpr std::size_t kDefaultMaxIters = 1000;

// The set {delta : <delta, u_j> <= b_j for all j}, b_j = epsilon * g_j.
struct SublevelSet {
  std::size_t dim = 0;
  double epsilon = 0.0;
  std::vector<double> normals;  // size() x dim, unit rows
  std::vector<double> offsets;
  Vec x;
  std::uint32_t label = 0;

  std::size_t size() const { return offsets.size(); }
  std::span<const double> normal(std::size_t j) const {
    return std::span<const double>(normals).subspan(j * dim, dim);
  }
};

SublevelSet build_sublevel(const UnsafeDirectionSet& dirs, double epsilon);

// True iff <delta, u_j> <= b_j * (1 + tol) for every halfspace.
bool contains(const SublevelSet& set, std::span<const double> delta, double tol);

// Largest relative violation max_j (<delta,u_j> - b_j) / b_j, floored at 0.
double max_relative_violation(const SublevelSet& set, std::span<const double> delta);

// delta unchanged when pd_threat(delta) <= epsilon, otherwise rescaled to
// threat epsilon.
Vec lazy_project(const UnsafeDirectionSet& dirs, std::span<const double> delta,
                 double epsilon);

// Euclidean projection onto {<delta,u> <= b}; u must be unit norm.
Vec halfspace_project(std::span<const double> u, double b, std::span<const double> delta);

enum class GreedyMode {
  // Farthest-halfspace selection with Dykstra (Hildreth) correction terms,
  // plus a periodic exact solve on the current active set; converges to the
  // Euclidean projection.
  kCorrected,
  // Farthest-halfspace selection without corrections; converges to a
  // feasible point that is in general not the nearest one.
  kPlain,
};

struct ProjectionResult {
  Vec point;
  std::size_t iterations = 0;
  bool converged = false;
  // max_j relative violation of the returned point; contains(point, residual)
  // holds.
  double residual = 0.0;
};

// Default stopping tolerance: 1e-7 * max(1, ||delta||).
double default_tolerance(std::span<const double> delta);

// Repeatedly projects onto the halfspace farthest from the iterate until the
// largest move is <= tol (default_tolerance when tol < 0) or max_iters passes.
// The returned point is shrunk toward the origin if needed so it is feasible.
// When `trace` is given, the iterate after every pass is appended to it.
ProjectionResult greedy_project(const SublevelSet& set, std::span<const double> delta,
                                std::size_t max_iters = kDefaultMaxIters, double tol = -1.0,
                                GreedyMode mode = GreedyMode::kCorrected,
                                std::vector<Vec>* trace = nullptr);

enum class IntersectionMode {
  kIterated,    // Dykstra alternation between the box and the sublevel set
  kSinglePass,  // clamp to the box, then project onto the sublevel set once
};

struct IntersectionResult {
  Vec point;
  std::size_t iterations = 0;
  bool converged = false;
  double residual = 0.0;       // relative sublevel violation
  double linf_excess = 0.0;    // max(0, ||point||_inf - radius)
};

// Feasible point of the intersection of the sublevel set and the l_inf ball
// of the given radius, near delta.
IntersectionResult project_intersection_linf(const SublevelSet& set,
                                             std::span<const double> delta,
                                             double linf_radius,
                                             std::size_t max_iters = kDefaultMaxIters,
                                             double tol = -1.0,
                                             IntersectionMode mode = IntersectionMode::kIterated);

}  // namespace pdthreat
