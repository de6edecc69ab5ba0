#include "pdthreat/oracle2d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "pdthreat/error.hpp"
#include "pdthreat/io.hpp"

namespace pdthreat::oracle2d {

namespace {

using json = nlohmann::json;

double cross(const Point2& a, const Point2& b) { return a[0] * b[1] - a[1] * b[0]; }
Point2 sub(const Point2& a, const Point2& b) { return {a[0] - b[0], a[1] - b[1]}; }
double dot2(const Point2& a, const Point2& b) { return a[0] * b[0] + a[1] * b[1]; }

Point2 left_normal(const Segment& s) {
  const Point2 v = sub(s.to, s.from);
  const double len = std::hypot(v[0], v[1]);
  return {-v[1] / len, v[0] / len};
}

}  // namespace

SyntheticTask2D::SyntheticTask2D(std::vector<Rect> domain, std::vector<Segment> segments,
                                 std::size_t num_classes)
    : domain_(std::move(domain)), segments_(std::move(segments)), num_classes_(num_classes) {
  if (domain_.empty()) throw Error(ErrorCode::kInvalidArgument, "task domain is empty");
  if (segments_.empty()) throw Error(ErrorCode::kInvalidArgument, "task has no boundary");
  if (num_classes_ < 2) throw Error(ErrorCode::kInvalidArgument, "task needs >= 2 classes");
  bounds_ = domain_.front();
  for (const auto& r : domain_) {
    if (!(r.x_max > r.x_min && r.y_max > r.y_min)) {
      throw Error(ErrorCode::kInvalidArgument, "degenerate domain rectangle");
    }
    bounds_.x_min = std::min(bounds_.x_min, r.x_min);
    bounds_.y_min = std::min(bounds_.y_min, r.y_min);
    bounds_.x_max = std::max(bounds_.x_max, r.x_max);
    bounds_.y_max = std::max(bounds_.y_max, r.y_max);
  }
  for (const auto& s : segments_) {
    if (s.left_label >= num_classes_ || s.right_label >= num_classes_) {
      throw Error(ErrorCode::kLabelOutOfRange, "segment label >= num_classes");
    }
    if (s.from == s.to) throw Error(ErrorCode::kInvalidArgument, "zero-length segment");
  }
  // Polyline joints: segment i's `to` meeting segment j's `from`.
  neighbors_.assign(segments_.size(), {-1, -1});
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    for (std::size_t j = 0; j < segments_.size(); ++j) {
      if (i != j && segments_[i].to == segments_[j].from) {
        neighbors_[i][1] = static_cast<long>(j);
        neighbors_[j][0] = static_cast<long>(i);
      }
    }
  }
}

bool SyntheticTask2D::in_domain(const Point2& p) const {
  return std::any_of(domain_.begin(), domain_.end(),
                     [&](const Rect& r) { return r.contains(p); });
}

std::uint32_t SyntheticTask2D::label(const Point2& p) const {
  // Nearest segment decides; at a shared vertex the side is taken against the
  // sum of the two adjoining left normals.
  std::size_t best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  double best_t = 0.0;
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const auto& s = segments_[i];
    const Point2 v = sub(s.to, s.from);
    const double t = std::clamp(dot2(sub(p, s.from), v) / dot2(v, v), 0.0, 1.0);
    const Point2 q{s.from[0] + t * v[0], s.from[1] + t * v[1]};
    const double dist = std::hypot(p[0] - q[0], p[1] - q[1]);
    if (dist < best_dist) {
      best_dist = dist;
      best = i;
      best_t = t;
    }
  }
  const auto& s = segments_[best];
  double side = 0.0;
  const bool at_from = best_t == 0.0 && neighbors_[best][0] >= 0;
  const bool at_to = best_t == 1.0 && neighbors_[best][1] >= 0;
  if (at_from || at_to) {
    const auto& other = segments_[static_cast<std::size_t>(neighbors_[best][at_from ? 0 : 1])];
    const Point2 n1 = left_normal(s);
    const Point2 n2 = left_normal(other);
    const Point2 vertex = at_from ? s.from : s.to;
    side = dot2(sub(p, vertex), Point2{n1[0] + n2[0], n1[1] + n2[1]});
  } else {
    side = cross(sub(s.to, s.from), sub(p, s.from));
  }
  return side > 0.0 ? s.left_label : s.right_label;
}

SyntheticTask2D SyntheticTask2D::from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    std::vector<Rect> domain;
    for (const auto& r : j.at("domain")) {
      domain.push_back(Rect{r.at("x_min").get<double>(), r.at("y_min").get<double>(),
                            r.at("x_max").get<double>(), r.at("y_max").get<double>()});
    }
    std::vector<Segment> segments;
    for (const auto& s : j.at("segments")) {
      const auto from = s.at("from").get<std::vector<double>>();
      const auto to = s.at("to").get<std::vector<double>>();
      if (from.size() != 2 || to.size() != 2) {
        throw Error(ErrorCode::kInvalidArgument, "segment endpoints must be 2D");
      }
      segments.push_back(Segment{{from[0], from[1]}, {to[0], to[1]},
                                 s.at("left").get<std::uint32_t>(),
                                 s.at("right").get<std::uint32_t>()});
    }
    return SyntheticTask2D(std::move(domain), std::move(segments),
                           j.at("num_classes").get<std::size_t>());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("bad task JSON: ") + e.what());
  }
}

SyntheticTask2D SyntheticTask2D::load(const std::string& path) {
  return from_json(read_file(path));
}

std::string SyntheticTask2D::to_json() const {
  json j;
  j["num_classes"] = num_classes_;
  j["domain"] = json::array();
  for (const auto& r : domain_) {
    j["domain"].push_back(
        {{"x_min", r.x_min}, {"y_min", r.y_min}, {"x_max", r.x_max}, {"y_max", r.y_max}});
  }
  j["segments"] = json::array();
  for (const auto& s : segments_) {
    j["segments"].push_back({{"from", {s.from[0], s.from[1]}},
                             {"to", {s.to[0], s.to[1]}},
                             {"left", s.left_label},
                             {"right", s.right_label}});
  }
  return j.dump(2);
}

SyntheticTask2D SyntheticTask2D::reference_task() {
  std::vector<Rect> domain{{0.0, 0.0, 4.0, 3.0}};
  std::vector<Segment> segments{
      {{0.0, 1.0}, {1.5, 1.8}, 1, 0},
      {{1.5, 1.8}, {2.5, 1.2}, 1, 0},
      {{2.5, 1.2}, {4.0, 2.0}, 1, 0},
  };
  return SyntheticTask2D(std::move(domain), std::move(segments), 2);
}

GridOracle::GridOracle(const SyntheticTask2D& task, std::size_t resolution, std::size_t angles)
    : resolution_(resolution), angles_(angles) {
  if (resolution < kMinResolution) {
    throw Error(ErrorCode::kInvalidArgument,
                "grid resolution must be >= " + std::to_string(kMinResolution));
  }
  if (angles < kMinAngles) {
    throw Error(ErrorCode::kInvalidArgument,
                "angular samples must be >= " + std::to_string(kMinAngles));
  }
  const Rect& b = task.bounds();
  const double w = b.x_max - b.x_min;
  const double h = b.y_max - b.y_min;
  step_ = std::max(w, h) / static_cast<double>(resolution);
  tolerance_ = std::numbers::pi / static_cast<double>(angles) + 2.0 * step_ / std::hypot(w, h);

  const std::size_t nodes = resolution + 1;
  node_labels_.assign(nodes * nodes, -1);
  class_counts_.assign(task.num_classes(), 0);
  for (std::size_t i = 0; i < nodes; ++i) {
    for (std::size_t j = 0; j < nodes; ++j) {
      const Point2 p{b.x_min + w * static_cast<double>(i) / resolution,
                     b.y_min + h * static_cast<double>(j) / resolution};
      if (!task.in_domain(p)) continue;
      const auto l = task.label(p);
      node_labels_[i * nodes + j] = static_cast<std::int32_t>(l);
      ++class_counts_[l];
    }
  }
  for (std::size_t c = 0; c < class_counts_.size(); ++c) {
    if (class_counts_[c] == 0) {
      throw Error(ErrorCode::kInvalidArgument,
                  "class " + std::to_string(c) + " has an empty region at this resolution");
    }
  }
}

std::vector<DirectionSample> exact_unsafe_directions(const SyntheticTask2D& task,
                                                     const GridOracle& oracle,
                                                     const Point2& x) {
  if (!task.in_domain(x)) {
    throw Error(ErrorCode::kPointOutsideDomain,
                fmt::format("({}, {}) is outside the task domain", x[0], x[1]));
  }
  const std::uint32_t y = task.label(x);
  const Rect& b = task.bounds();
  const double h = oracle.step();
  auto in_region = [&](const Point2& p) { return task.in_domain(p) && task.label(p) == y; };

  std::vector<DirectionSample> out(oracle.angles());
  for (std::size_t a = 0; a < oracle.angles(); ++a) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(a) /
                         static_cast<double>(oracle.angles());
    DirectionSample& s = out[a];
    s.u = {std::cos(theta), std::sin(theta)};
    auto at = [&](double t) { return Point2{x[0] + t * s.u[0], x[1] + t * s.u[1]}; };

    bool left_region = false;
    double prev = 0.0;
    for (std::size_t i = 1;; ++i) {
      const double t = h * static_cast<double>(i);
      const Point2 p = at(t);
      if (!b.contains(p)) {
        if (!left_region) {
          // The region extends to the bounding box; bracket against its edge.
          double lo = prev, hi = t;
          for (int it = 0; it < kBisectionIters; ++it) {
            const double mid = 0.5 * (lo + hi);
            (in_region(at(mid)) ? lo : hi) = mid;
          }
          s.g_star = 0.5 * (lo + hi);
          s.g_bracket_width = hi - lo;
        }
        break;
      }
      const bool inside = task.in_domain(p);
      const bool same = inside && task.label(p) == y;
      if (!left_region && !same) {
        left_region = true;
        double lo = prev, hi = t;
        for (int it = 0; it < kBisectionIters; ++it) {
          const double mid = 0.5 * (lo + hi);
          (in_region(at(mid)) ? lo : hi) = mid;
        }
        s.g_star = 0.5 * (lo + hi);
        s.g_bracket_width = hi - lo;
      }
      if (inside && !same) {
        s.unsafe = true;
        break;
      }
      prev = t;
    }
  }
  return out;
}

ExactThreat exact_pd_threat(const std::vector<DirectionSample>& dirs, const Point2& delta) {
  ExactThreat out;
  out.no_unsafe_directions = true;
  for (const auto& s : dirs) {
    if (!s.unsafe) continue;
    out.no_unsafe_directions = false;
    const double p = dot2(delta, s.u);
    if (p > 0.0) out.threat = std::max(out.threat, p / s.g_star);
  }
  return out;
}

ExactThreat exact_pd_threat(const SyntheticTask2D& task, const GridOracle& oracle,
                            const Point2& x, const Point2& delta) {
  return exact_pd_threat(exact_unsafe_directions(task, oracle, x), delta);
}

Theorem1Report theorem1_check(const SyntheticTask2D& task, const GridOracle& oracle,
                              std::size_t num_pairs, std::uint64_t seed) {
  Theorem1Report report;
  report.tolerance = oracle.tolerance();
  report.min_threat = std::numeric_limits<double>::infinity();
  const Rect& b = task.bounds();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(b.x_min, b.x_max);
  std::uniform_real_distribution<double> uy(b.y_min, b.y_max);
  auto sample = [&] {
    for (;;) {
      const Point2 p{ux(rng), uy(rng)};
      if (task.in_domain(p)) return p;
    }
  };
  constexpr std::size_t kMaxAttempts = 1000;
  while (report.pairs_checked < num_pairs) {
    const Point2 x = sample();
    const std::uint32_t lx = task.label(x);
    Point2 xt{};
    std::uint32_t lt = lx;
    for (std::size_t attempt = 0; attempt < kMaxAttempts && lt == lx; ++attempt) {
      xt = sample();
      lt = task.label(xt);
    }
    if (lt == lx) continue;
    const Point2 delta = sub(xt, x);
    if (delta[0] == 0.0 && delta[1] == 0.0) {
      ++report.skipped;
      continue;
    }
    const double threat = exact_pd_threat(task, oracle, x, delta).threat;
    report.pairs.push_back(PairRecord{x, xt, lx, lt, threat});
    ++report.pairs_checked;
    report.min_threat = std::min(report.min_threat, threat);
    if (!(threat > 1.0 - report.tolerance)) ++report.violations;
  }
  if (report.pairs_checked == 0) report.min_threat = 0.0;
  return report;
}

SublevelField sublevel_field(const SyntheticTask2D& task, const GridOracle& oracle,
                             const Point2& x, double epsilon, std::size_t grid) {
  if (grid < 2) throw Error(ErrorCode::kInvalidArgument, "field grid must be >= 2");
  const auto dirs = exact_unsafe_directions(task, oracle, x);
  const Rect& b = task.bounds();
  SublevelField field;
  field.x = x;
  field.epsilon = epsilon;
  field.grid = grid;
  field.points.reserve(grid * grid);
  for (std::size_t i = 0; i < grid; ++i) {
    for (std::size_t j = 0; j < grid; ++j) {
      const double px = b.x_min + (b.x_max - b.x_min) * static_cast<double>(i) / (grid - 1);
      const double py = b.y_min + (b.y_max - b.y_min) * static_cast<double>(j) / (grid - 1);
      field.points.push_back(
          FieldPoint{px, py, exact_pd_threat(dirs, Point2{px - x[0], py - x[1]}).threat});
    }
  }
  return field;
}

std::string field_to_csv(const SublevelField& field) {
  std::string out = "px,py,threat\n";
  for (const auto& p : field.points) out += fmt::format("{},{},{}\n", p.px, p.py, p.threat);
  return out;
}

}  // namespace pdthreat::oracle2d
