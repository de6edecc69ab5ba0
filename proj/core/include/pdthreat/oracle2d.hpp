#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace pdthreat::oracle2d {

using Point2 = std::array<double, 2>;

struct Rect {
  double x_min = 0.0, y_min = 0.0, x_max = 0.0, y_max = 0.0;
  bool contains(const Point2& p) const {
    return p[0] >= x_min && p[0] <= x_max && p[1] >= y_min && p[1] <= y_max;
  }
};

// Oriented boundary segment; points on its left take `left_label`.
struct Segment {
  Point2 from{};
  Point2 to{};
  std::uint32_t left_label = 0;
  std::uint32_t right_label = 0;
};

// A bounded 2D domain (union of rectangles) labeled by a piecewise-linear
// rule: a point takes the side label of its nearest boundary segment.
class SyntheticTask2D {
 public:
  SyntheticTask2D(std::vector<Rect> domain, std::vector<Segment> segments,
                  std::size_t num_classes);

  static SyntheticTask2D from_json(const std::string& text);
  static SyntheticTask2D load(const std::string& path);
  std::string to_json() const;

  // Two-class task with a three-piece boundary across a 4 x 3 rectangle.
  static SyntheticTask2D reference_task();

  bool in_domain(const Point2& p) const;
  std::uint32_t label(const Point2& p) const;
  std::size_t num_classes() const { return num_classes_; }
  const Rect& bounds() const { return bounds_; }
  const std::vector<Rect>& domain() const { return domain_; }
  const std::vector<Segment>& segments() const { return segments_; }

 private:
  std::vector<Rect> domain_;
  std::vector<Segment> segments_;
  std::size_t num_classes_;
  Rect bounds_;
  // For each segment endpoint, the index of the segment sharing it (or -1).
  std::vector<std::array<long, 2>> neighbors_;
};

inline constexpr std::size_t kMinResolution = 16;
inline constexpr std::size_t kMinAngles = 64;
inline constexpr int kBisectionIters = 30;

// Discretization settings plus node labels over the bounding box, used to
// check that every class region is populated at grid scale.
class GridOracle {
 public:
  GridOracle(const SyntheticTask2D& task, std::size_t resolution, std::size_t angles);

  std::size_t resolution() const { return resolution_; }
  std::size_t angles() const { return angles_; }
  double step() const { return step_; }
  // Reported discretization tolerance on exact threat values.
  double tolerance() const { return tolerance_; }
  // Grid nodes per class (nodes outside the domain are not counted).
  const std::vector<std::size_t>& class_node_counts() const { return class_counts_; }
  std::int32_t node_label(std::size_t i, std::size_t j) const {
    return node_labels_[i * (resolution_ + 1) + j];
  }

 private:
  std::size_t resolution_;
  std::size_t angles_;
  double step_;
  double tolerance_;
  std::vector<std::int32_t> node_labels_;  // -1 outside the domain
  std::vector<std::size_t> class_counts_;
};

struct DirectionSample {
  Point2 u{};
  bool unsafe = false;
  double g_star = 0.0;          // bracket midpoint; meaningful when unsafe
  double g_bracket_width = 0.0;
};

// All sampled directions at x with their safe/unsafe status and g*.
std::vector<DirectionSample> exact_unsafe_directions(const SyntheticTask2D& task,
                                                     const GridOracle& oracle,
                                                     const Point2& x);

struct ExactThreat {
  double threat = 0.0;
  bool no_unsafe_directions = false;
};

ExactThreat exact_pd_threat(const std::vector<DirectionSample>& dirs, const Point2& delta);
ExactThreat exact_pd_threat(const SyntheticTask2D& task, const GridOracle& oracle,
                            const Point2& x, const Point2& delta);

struct PairRecord {
  Point2 x{};
  Point2 x_tilde{};
  std::uint32_t label_x = 0;
  std::uint32_t label_x_tilde = 0;
  double threat = 0.0;
};

struct Theorem1Report {
  std::size_t pairs_checked = 0;
  std::size_t skipped = 0;  // coincident pairs
  std::size_t violations = 0;
  double min_threat = 0.0;
  double tolerance = 0.0;
  std::vector<PairRecord> pairs;
};

// Samples cross-label pairs and checks exact threat(x, x_tilde - x) > 1 - tol.
Theorem1Report theorem1_check(const SyntheticTask2D& task, const GridOracle& oracle,
                              std::size_t num_pairs, std::uint64_t seed);

struct FieldPoint {
  double px = 0.0, py = 0.0, threat = 0.0;
};

struct SublevelField {
  Point2 x{};
  double epsilon = 1.0;
  std::size_t grid = 0;
  std::vector<FieldPoint> points;  // grid x grid over the bounding box
};

// Exact threat of p - x for p on a regular grid over the domain bounds.
SublevelField sublevel_field(const SyntheticTask2D& task, const GridOracle& oracle,
                             const Point2& x, double epsilon, std::size_t grid);

std::string field_to_csv(const SublevelField& field);

}  // namespace pdthreat::oracle2d
