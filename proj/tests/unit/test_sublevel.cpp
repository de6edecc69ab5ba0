#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "pdthreat/error.hpp"
#include "pdthreat/sublevel.hpp"
#include "pdthreat/threat.hpp"

namespace pdthreat {
namespace {

UnsafeDirectionSet make_dirs(const std::vector<oracle::Vec>& units, const std::vector<double>& gs) {
  UnsafeDirectionSet s;
  s.dim = units.front().size();
  s.x.assign(s.dim, 0.0);
  for (std::size_t i = 0; i < units.size(); ++i) {
    const double n = oracle::norm(units[i]);
    for (const double v : units[i]) s.units.push_back(v / n);
    s.directions.push_back({gs[i], 1, i, static_cast<std::uint32_t>(i)});
  }
  return s;
}

UnsafeDirectionSet random_dirs(std::size_t d, std::size_t m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> g(0.2, 2.0);
  std::vector<oracle::Vec> units;
  std::vector<double> gs;
  for (std::size_t i = 0; i < m; ++i) {
    units.push_back(oracle::random_vec(d, rng));
    gs.push_back(g(rng));
  }
  return make_dirs(units, gs);
}

void to_constraints(const SublevelSet& set, std::vector<oracle::Vec>& a, oracle::Vec& b) {
  for (std::size_t j = 0; j < set.size(); ++j) {
    a.emplace_back(set.normal(j).begin(), set.normal(j).end());
    b.push_back(set.offsets[j]);
  }
}

TEST(BuildSublevel, Examples) {
  const auto dirs = make_dirs({{1, 0}}, {2});
  const auto set = build_sublevel(dirs, 1.0);
  ASSERT_EQ(set.size(), 1u);
  EXPECT_DOUBLE_EQ(set.offsets[0], 2.0);
  const auto smaller = build_sublevel(dirs, 0.25);
  EXPECT_DOUBLE_EQ(smaller.offsets[0], 0.5);
  const std::vector<double> zero = {0, 0};
  EXPECT_TRUE(contains(build_sublevel(dirs, 1e-9), zero, 0.0));
  EXPECT_THROW(build_sublevel(dirs, 0.0), Error);
  EXPECT_THROW(build_sublevel(UnsafeDirectionSet{}, 1.0), Error);
}

TEST(Contains, ExamplesAndThreatEquivalence) {
  const auto dirs = make_dirs({{1, 0}}, {2});
  const auto set = build_sublevel(dirs, 1.0);
  const std::vector<double> zero = {0, 0}, out = {3, 0}, wrong = {1, 2, 3};
  EXPECT_TRUE(contains(set, zero, 0.0));
  EXPECT_FALSE(contains(set, out, 0.0));
  EXPECT_THROW(contains(set, wrong, 0.0), Error);

  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const auto r = random_dirs(4, 6, rng);
    const auto s = build_sublevel(r, 0.7);
    const auto delta = oracle::random_vec(4, rng);
    EXPECT_EQ(contains(s, delta, 1e-6), pd_threat(r, delta).threat <= 0.7 * (1 + 1e-6));
  }
}

TEST(Contains, Nesting) {
  std::mt19937_64 rng(2);
  const auto r = random_dirs(3, 5, rng);
  const auto big = build_sublevel(r, 1.0);
  const auto small = build_sublevel(r, 0.5);
  for (int trial = 0; trial < 500; ++trial) {
    const auto delta = oracle::random_vec(3, rng);
    if (contains(small, delta, 0.0)) EXPECT_TRUE(contains(big, delta, 0.0));
  }
}

TEST(LazyProject, Examples) {
  const auto dirs = make_dirs({{1, 0}}, {1});
  const std::vector<double> inside = {0.5, 3}, twice = {2, 4};
  EXPECT_EQ(lazy_project(dirs, inside, 1.0), oracle::Vec(inside.begin(), inside.end()));
  const auto half = lazy_project(dirs, twice, 1.0);
  EXPECT_DOUBLE_EQ(half[0], 1.0);
  EXPECT_DOUBLE_EQ(half[1], 2.0);
}

TEST(LazyProject, ThreatAndMembership) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const auto r = random_dirs(5, 4, rng);
    const auto delta = oracle::random_vec(5, rng, 2.0);
    const double eps = 0.3;
    const auto p = lazy_project(r, delta, eps);
    const double before = pd_threat(r, delta).threat;
    EXPECT_NEAR(pd_threat(r, p).threat, std::min(before, eps), 1e-6 * eps);
    EXPECT_TRUE(contains(build_sublevel(r, eps), p, 1e-6));
  }
}

TEST(HalfspaceProject, ClosedForm) {
  const std::vector<double> u = {0, 1}, inside = {5, 0.5}, far = {0, 4};
  EXPECT_EQ(halfspace_project(u, 1.0, inside), oracle::Vec(inside.begin(), inside.end()));
  const auto p = halfspace_project(u, 1.0, far);
  EXPECT_DOUBLE_EQ(p[1], 1.0);
  const std::vector<double> not_unit = {0, 2};
  try {
    halfspace_project(not_unit, 1.0, far);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonUnitDirection);
  }

  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    auto uu = oracle::random_vec(4, rng);
    const double n = oracle::norm(uu);
    for (auto& v : uu) v /= n;
    const auto delta = oracle::random_vec(4, rng);
    const auto q = halfspace_project(uu, 0.3, delta);
    EXPECT_LE(oracle::dot(q, uu), 0.3 + 1e-12);
    EXPECT_NEAR(oracle::dist(q, delta), std::max(oracle::dot(delta, uu) - 0.3, 0.0), 1e-12);
  }
}

TEST(GreedyProject, InsideIsUnchangedInOneIteration) {
  const auto set = build_sublevel(make_dirs({{1, 0}, {0, 1}}, {1, 1}), 1.0);
  const std::vector<double> inside = {0.2, -3};
  const auto r = greedy_project(set, inside);
  EXPECT_EQ(r.point, oracle::Vec(inside.begin(), inside.end()));
  EXPECT_EQ(r.iterations, 1u);
  EXPECT_TRUE(r.converged);
}

TEST(GreedyProject, SingleHalfspaceMatchesClosedForm) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto dirs = random_dirs(3, 1, rng);
    const auto set = build_sublevel(dirs, 1.0);
    const auto delta = oracle::random_vec(3, rng, 3.0);
    const auto expect = halfspace_project(set.normal(0), set.offsets[0], delta);
    const auto got = greedy_project(set, delta);
    EXPECT_LT(oracle::dist(got.point, expect), 1e-12);
  }
}

TEST(GreedyProject, MatchesExhaustiveOracle) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    const auto dirs = random_dirs(3, 4, rng);
    const auto set = build_sublevel(dirs, 0.5);
    const auto delta = oracle::random_vec(3, rng, 3.0);
    std::vector<oracle::Vec> a;
    oracle::Vec b;
    to_constraints(set, a, b);
    const auto exact = oracle::exact_polytope_projection(a, b, delta);
    const auto got = greedy_project(set, delta);
    EXPECT_TRUE(got.converged);
    EXPECT_LE(oracle::dist(got.point, exact), 1e-4) << "trial " << trial;
    EXPECT_TRUE(contains(set, got.point, 1e-6));
  }
}

// Without correction terms the farthest-set iteration stops at a feasible
// point that is not the nearest one. Halfspaces <z,e1> <= 1 and
// <z,(e1+e2)/sqrt2> <= 1 meet at c = (1, sqrt2 - 1); from c + (2,1) the plain
// iteration ends at c + (0,-1/2) while the projection is c itself.
TEST(GreedyProject, PlainModeFeasibleButNotNearest) {
  const double s = std::sqrt(0.5);
  const auto set = build_sublevel(make_dirs({{1, 0}, {s, s}}, {1, 1}), 1.0);
  const double cy = std::sqrt(2.0) - 1.0;
  const std::vector<double> delta = {3, cy + 1};
  const auto plain = greedy_project(set, delta, 1000, 1e-12, GreedyMode::kPlain);
  EXPECT_NEAR(plain.point[0], 1.0, 1e-9);
  EXPECT_NEAR(plain.point[1], cy - 0.5, 1e-9);
  EXPECT_TRUE(contains(set, plain.point, 1e-9));
  const auto corrected = greedy_project(set, delta, 1000, 1e-12, GreedyMode::kCorrected);
  EXPECT_NEAR(corrected.point[0], 1.0, 1e-9);
  EXPECT_NEAR(corrected.point[1], cy, 1e-9);
}

TEST(GreedyProject, PlainModeIsFejerMonotone) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const auto dirs = random_dirs(4, 5, rng);
    const auto set = build_sublevel(dirs, 0.5);
    const auto delta = oracle::random_vec(4, rng, 3.0);
    std::vector<oracle::Vec> a;
    oracle::Vec b;
    to_constraints(set, a, b);
    const auto exact = oracle::exact_polytope_projection(a, b, delta);
    std::vector<Vec> trace;
    const auto r = greedy_project(set, delta, 500, -1.0, GreedyMode::kPlain, &trace);
    EXPECT_TRUE(contains(set, r.point, 1e-6));
    double prev_anchor = oracle::dist(delta, exact);
    double prev_set = oracle::dist(delta, oracle::exact_polytope_projection(a, b, delta));
    for (const auto& it : trace) {
      // distance to any feasible point (here: the projection) never grows
      const double anchor = oracle::dist(it, exact);
      EXPECT_LE(anchor, prev_anchor + 1e-9);
      prev_anchor = anchor;
      const double to_set = oracle::dist(it, oracle::exact_polytope_projection(a, b, it));
      EXPECT_LE(to_set, prev_set + 1e-9);
      prev_set = to_set;
    }
  }
}

TEST(GreedyProject, Idempotent) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const auto dirs = random_dirs(4, 6, rng);
    const auto set = build_sublevel(dirs, 0.5);
    const auto delta = oracle::random_vec(4, rng, 3.0);
    const auto once = greedy_project(set, delta);
    const auto twice = greedy_project(set, once.point);
    EXPECT_LE(oracle::dist(once.point, twice.point), default_tolerance(once.point));
  }
}

TEST(GreedyProject, ReportsNonConvergence) {
  std::mt19937_64 rng(9);
  const auto dirs = random_dirs(6, 12, rng);
  const auto set = build_sublevel(dirs, 0.05);
  const auto delta = oracle::random_vec(6, rng, 10.0);
  const auto r = greedy_project(set, delta, 1, 0.0);
  EXPECT_EQ(r.iterations, 1u);
  EXPECT_FALSE(r.converged);
  EXPECT_TRUE(contains(set, r.point, r.residual + 1e-12));
  EXPECT_THROW(greedy_project(set, delta, 0), Error);
}

TEST(IntersectionLinf, InsideBothIsIdentity) {
  const auto set = build_sublevel(make_dirs({{1, 0}}, {1}), 1.0);
  const std::vector<double> delta = {0.1, -0.2};
  const auto r = project_intersection_linf(set, delta, 0.5);
  EXPECT_EQ(r.point, oracle::Vec(delta.begin(), delta.end()));
  EXPECT_TRUE(r.converged);
}

TEST(IntersectionLinf, HugeEpsilonIsClamp) {
  std::mt19937_64 rng(10);
  const auto dirs = random_dirs(5, 4, rng);
  const auto set = build_sublevel(dirs, 1e9);
  const auto delta = oracle::random_vec(5, rng, 2.0);
  const auto r = project_intersection_linf(set, delta, 0.3);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(r.point[i], std::clamp(delta[i], -0.3, 0.3), 1e-12);
}

TEST(IntersectionLinf, MatchesOracleOnTinyInstances) {
  std::mt19937_64 rng(11);
  for (const auto mode : {IntersectionMode::kIterated, IntersectionMode::kSinglePass}) {
    for (int trial = 0; trial < 30; ++trial) {
      const std::size_t d = 5;
      const auto dirs = random_dirs(d, 4, rng);
      const auto set = build_sublevel(dirs, 0.5);
      const auto delta = oracle::random_vec(d, rng, 2.0);
      const double radius = 0.4;
      std::vector<oracle::Vec> a;
      oracle::Vec b;
      to_constraints(set, a, b);
      for (std::size_t i = 0; i < d; ++i) {
        oracle::Vec e(d, 0.0);
        e[i] = 1.0;
        a.push_back(e);
        b.push_back(radius);
        e[i] = -1.0;
        a.push_back(e);
        b.push_back(radius);
      }
      const auto exact = oracle::exact_polytope_projection(a, b, delta);
      const auto r = project_intersection_linf(set, delta, radius, 1000, -1.0, mode);
      EXPECT_TRUE(contains(set, r.point, 1e-5));
      EXPECT_LE(r.linf_excess, 1e-5 * radius);
      for (const double v : r.point) EXPECT_LE(std::abs(v), radius * (1 + 1e-5));
      const double best = oracle::dist(exact, delta);
      if (mode == IntersectionMode::kIterated) {
        EXPECT_LE(oracle::dist(r.point, delta), 1.1 * best + 1e-9) << "trial " << trial;
      }
    }
  }
}

}  // namespace
}  // namespace pdthreat
