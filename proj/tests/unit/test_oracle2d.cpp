#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "pdthreat/error.hpp"
#include "pdthreat/oracle2d.hpp"

namespace pdthreat::oracle2d {
namespace {

// Vertical boundary x = 2 across [0,4]^2; class 0 on the left.
SyntheticTask2D linear_task() {
  return SyntheticTask2D({Rect{0, 0, 4, 4}}, {Segment{{2, -10}, {2, 10}, 0, 1}}, 2);
}

std::size_t angle_index(const GridOracle& o, double theta) {
  return static_cast<std::size_t>(std::llround(theta / (2 * std::numbers::pi) * o.angles())) %
         o.angles();
}

TEST(Task, ReferenceLabels) {
  const auto task = SyntheticTask2D::reference_task();
  EXPECT_EQ(task.num_classes(), 2u);
  EXPECT_EQ(task.label({2.0, 0.5}), 0u);
  EXPECT_EQ(task.label({2.0, 2.5}), 1u);
  EXPECT_EQ(task.label({0.2, 2.9}), 1u);
  EXPECT_EQ(task.label({3.9, 0.1}), 0u);
  EXPECT_TRUE(task.in_domain({4, 3}));
  EXPECT_FALSE(task.in_domain({4.01, 1}));
}

TEST(Task, JsonRoundTrip) {
  const auto task = SyntheticTask2D::reference_task();
  const auto back = SyntheticTask2D::from_json(task.to_json());
  EXPECT_EQ(back.to_json(), task.to_json());
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> ux(0, 4), uy(0, 3);
  for (int i = 0; i < 200; ++i) {
    const Point2 p{ux(rng), uy(rng)};
    EXPECT_EQ(back.label(p), task.label(p));
  }
  EXPECT_THROW(SyntheticTask2D::from_json("{\"num_classes\": 2}"), std::exception);
}

TEST(GridOracle, Settings) {
  const auto task = linear_task();
  const GridOracle o(task, 64, 128);
  EXPECT_DOUBLE_EQ(o.step(), 4.0 / 64);
  EXPECT_NEAR(o.tolerance(), std::numbers::pi / 128 + 2 * (4.0 / 64) / std::sqrt(32.0), 1e-15);
  EXPECT_EQ(o.class_node_counts().size(), 2u);
  EXPECT_GT(o.class_node_counts()[0], 0u);
  EXPECT_GT(o.class_node_counts()[1], 0u);
  EXPECT_THROW(GridOracle(task, 8, 128), Error);
  EXPECT_THROW(GridOracle(task, 64, 32), Error);
  EXPECT_LE(GridOracle(SyntheticTask2D::reference_task(), 512, 720).tolerance(), 0.02);
}

TEST(GridOracle, EmptyClassRegionRejected) {
  // boundary outside the domain: class 1 has no points
  const SyntheticTask2D task({Rect{0, 0, 1, 1}}, {Segment{{5, -10}, {5, 10}, 0, 1}}, 2);
  EXPECT_THROW(GridOracle(task, 32, 64), Error);
}

TEST(ExactDirections, LinearBoundaryDistance) {
  const auto task = linear_task();
  const GridOracle o(task, 128, 360);
  const Point2 x{1.0, 2.0};
  const auto dirs = exact_unsafe_directions(task, o, x);
  const auto& n = dirs[angle_index(o, 0.0)];
  ASSERT_TRUE(n.unsafe);
  EXPECT_NEAR(n.g_star, 1.0, o.step());
  EXPECT_LE(n.g_bracket_width, o.step() * 1e-6);
  // parallel to the boundary: leaves the domain without a label change
  EXPECT_FALSE(dirs[angle_index(o, std::numbers::pi / 2)].unsafe);
  EXPECT_FALSE(dirs[angle_index(o, std::numbers::pi)].unsafe);
  // oblique: distance 1 / cos(theta)
  const auto& ob = dirs[angle_index(o, std::numbers::pi / 4)];
  ASSERT_TRUE(ob.unsafe);
  EXPECT_NEAR(ob.g_star, std::sqrt(2.0), o.step());
}

TEST(ExactDirections, OutsideDomainThrows) {
  const auto task = linear_task();
  const GridOracle o(task, 32, 64);
  try {
    exact_unsafe_directions(task, o, {5, 5});
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kPointOutsideDomain);
  }
}

TEST(ExactDirections, MarchingCrossesDomainGaps) {
  const SyntheticTask2D task({Rect{0, 0, 1, 1}, Rect{2, 0, 3, 1}},
                             {Segment{{2.5, -10}, {2.5, 10}, 0, 1}}, 2);
  const GridOracle o(task, 64, 64);
  const auto dirs = exact_unsafe_directions(task, o, {0.5, 0.5});
  const auto& e = dirs[0];
  EXPECT_TRUE(e.unsafe);
  EXPECT_NEAR(e.g_star, 0.5, o.step());
}

TEST(ExactThreat, Examples) {
  const auto task = linear_task();
  const GridOracle o(task, 128, 360);
  const Point2 x{1.0, 2.0};
  EXPECT_EQ(exact_pd_threat(task, o, x, {0, 0}).threat, 0.0);
  const auto at_boundary = exact_pd_threat(task, o, x, {1, 0});
  EXPECT_NEAR(at_boundary.threat, 1.0, o.tolerance());
  EXPECT_FALSE(at_boundary.no_unsafe_directions);
  EXPECT_EQ(exact_pd_threat(task, o, x, {-1, 0}).threat, 0.0);
}

TEST(ExactThreat, NoUnsafeDirectionsFlag) {
  std::vector<DirectionSample> safe(4);
  const auto t = exact_pd_threat(safe, {1, 1});
  EXPECT_TRUE(t.no_unsafe_directions);
  EXPECT_EQ(t.threat, 0.0);
}

TEST(Refinement, UnsafeSetAgreesWithHalfResolution) {
  const auto task = SyntheticTask2D::reference_task();
  const GridOracle fine(task, 256, 360), coarse(task, 128, 360);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> ux(0, 4), uy(0, 3);
  std::size_t agree = 0, total = 0;
  for (int i = 0; i < 20; ++i) {
    const Point2 x{ux(rng), uy(rng)};
    const auto a = exact_unsafe_directions(task, fine, x);
    const auto b = exact_unsafe_directions(task, coarse, x);
    for (std::size_t k = 0; k < a.size(); ++k) {
      agree += a[k].unsafe == b[k].unsafe;
      ++total;
    }
  }
  EXPECT_GE(static_cast<double>(agree), 0.99 * static_cast<double>(total));
}

TEST(Refinement, GStarConvergesUnderDoubling) {
  const auto task = SyntheticTask2D::reference_task();
  const GridOracle coarse(task, 128, 180), fine(task, 256, 180);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ux(0, 4), uy(0, 3);
  std::size_t ok = 0, total = 0;
  for (int i = 0; i < 20; ++i) {
    const Point2 x{ux(rng), uy(rng)};
    const auto a = exact_unsafe_directions(task, coarse, x);
    const auto b = exact_unsafe_directions(task, fine, x);
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (!a[k].unsafe || !b[k].unsafe) continue;
      ok += std::abs(a[k].g_star - b[k].g_star) < coarse.step();
      ++total;
    }
  }
  ASSERT_GT(total, 0u);
  EXPECT_GE(static_cast<double>(ok), 0.95 * static_cast<double>(total));
}

TEST(Theorem1, LinearBoundaryPairs) {
  const auto task = linear_task();
  const GridOracle o(task, 128, 360);
  const auto report = theorem1_check(task, o, 40, 5);
  EXPECT_EQ(report.pairs_checked, 40u);
  EXPECT_EQ(report.violations, 0u);
  EXPECT_GT(report.min_threat, 1.0 - report.tolerance);
  for (const auto& p : report.pairs) EXPECT_NE(p.label_x, p.label_x_tilde);
}

TEST(Theorem1, SameClassControlHasNoGuarantee) {
  // Within one class, displacements can have threat well below 1.
  const auto task = linear_task();
  const GridOracle o(task, 128, 360);
  EXPECT_LT(exact_pd_threat(task, o, {0.5, 2.0}, {0.2, 0}).threat, 1.0);
}

TEST(Field, ZeroAtOriginAndHomogeneousAlongRays) {
  const auto task = SyntheticTask2D::reference_task();
  const GridOracle o(task, 64, 180);
  const Point2 x{1.0, 1.0};
  const auto field = sublevel_field(task, o, x, 1.0, 9);
  ASSERT_EQ(field.points.size(), 81u);
  const auto csv = field_to_csv(field);
  EXPECT_EQ(csv.substr(0, 13), "px,py,threat\n");

  const auto dirs = exact_unsafe_directions(task, o, x);
  EXPECT_EQ(exact_pd_threat(dirs, {0, 0}).threat, 0.0);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g(0, 1);
  for (int i = 0; i < 100; ++i) {
    const Point2 d{g(rng), g(rng)};
    const double t = std::abs(g(rng)) * 3;
    const double base = exact_pd_threat(dirs, d).threat;
    EXPECT_NEAR(exact_pd_threat(dirs, {t * d[0], t * d[1]}).threat, t * base,
                1e-9 * std::max(1.0, t * base));
  }
  // along a safe ray every displacement has zero threat
  for (const auto& s : dirs) {
    bool any_positive = false;
    for (const auto& other : dirs) {
      if (other.unsafe && s.u[0] * other.u[0] + s.u[1] * other.u[1] > 0) any_positive = true;
    }
    if (!any_positive) {
      EXPECT_EQ(exact_pd_threat(dirs, {2 * s.u[0], 2 * s.u[1]}).threat, 0.0);
    }
  }
}

}  // namespace
}  // namespace pdthreat::oracle2d
