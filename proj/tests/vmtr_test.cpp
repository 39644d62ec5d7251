#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"

using namespace topoforge;
using namespace tf_test;

namespace {

FeasibleInterval iv(DemandId k, Rational lo, std::optional<Rational> hi) {
  return {k, lo, hi};
}

// Smallest number of points stabbing every interval, by trying each subset of
// candidate points (interval endpoints are enough).
std::size_t brute_force_stabbing(const std::vector<FeasibleInterval>& ivs) {
  std::vector<Rational> cand;
  for (const auto& x : ivs) {
    cand.push_back(x.lambda_min);
    if (x.lambda_max) cand.push_back(*x.lambda_max);
  }
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
  std::size_t best = ivs.size();
  for (std::uint32_t mask = 0; mask < (1u << cand.size()); ++mask) {
    const auto used = static_cast<std::size_t>(std::popcount(mask));
    if (used >= best) continue;
    bool ok = std::all_of(ivs.begin(), ivs.end(), [&](const FeasibleInterval& x) {
      for (std::size_t i = 0; i < cand.size(); ++i) {
        if ((mask >> i & 1u) && x.contains(cand[i])) return true;
      }
      return false;
    });
    if (ok) best = used;
  }
  return best;
}

}  // namespace

TEST(FeasibleIntervalTest, FixtureD) {
  FixtureD d;
  const auto got = feasible_interval(d.net, d.ms, d.k0);
  ASSERT_TRUE(got);
  EXPECT_EQ(got->lambda_min, Rational(1, 5));
  ASSERT_TRUE(got->lambda_max);
  EXPECT_EQ(*got->lambda_max, Rational(5));
  EXPECT_TRUE(got->contains(Rational(1)));
  EXPECT_FALSE(got->contains(Rational(6)));
}

TEST(FeasibleIntervalTest, LooseDelayBoundIsUnbounded) {
  FixtureD d;
  const auto got = feasible_interval(d.net, d.ms, make_demand(0, 0, 3, {50.0, 9.0}));
  ASSERT_TRUE(got);
  EXPECT_FALSE(got->lambda_max);
  EXPECT_FALSE(feasible_interval(d.net, d.ms, make_demand(0, 0, 3, {1.0, 1.0})));
}

TEST(CheckLambdaTest, FixtureD) {
  FixtureD d;
  const auto at_one = check_lambda(d.net, d.ms, d.k0, Rational(1));
  ASSERT_TRUE(at_one);
  EXPECT_EQ(at_one->arcs, (std::vector<ArcId>{FixtureD::kDirect}));
  // At the lower end fast and direct tie; one step up breaks the tie.
  const auto at_edge = check_lambda(d.net, d.ms, d.k0, Rational(1, 5));
  ASSERT_TRUE(at_edge);
  EXPECT_EQ(at_edge->arcs, (std::vector<ArcId>{FixtureD::kDirect}));
  EXPECT_FALSE(check_lambda(d.net, d.ms, d.k0, Rational(1, 20)));
  EXPECT_FALSE(check_lambda(d.net, d.ms, d.k0, Rational(1, 5), -1));
  EXPECT_THROW(check_lambda(d.net, d.ms, d.k0, Rational(-1)), InvalidInputError);
}

TEST(CoverTest, ThreeIntervalsTwoPoints) {
  const auto cover = min_multiplier_cover(
      {iv(0, 1, Rational(3)), iv(1, 2, Rational(5)), iv(2, 4, Rational(6))});
  EXPECT_EQ(cover.points, (std::vector<Rational>{3, 6}));
  EXPECT_EQ(cover.covered[0], (std::vector<DemandId>{0, 1}));
  EXPECT_EQ(cover.covered[1], (std::vector<DemandId>{2}));
  EXPECT_EQ(cover.anchors, (std::vector<DemandId>{0, 2}));
}

TEST(CoverTest, SixIntervalsThreePoints) {
  const auto cover = min_multiplier_cover({
      iv(0, Rational(1, 10), Rational(1, 2)), iv(1, Rational(1, 4), Rational(1)),
      iv(2, Rational(3, 4), Rational(2)), iv(3, Rational(3, 2), Rational(4)),
      iv(4, Rational(3), std::nullopt), iv(5, Rational(5), std::nullopt)});
  EXPECT_EQ(cover.points, (std::vector<Rational>{Rational(1, 2), Rational(2), Rational(5)}));
  EXPECT_EQ(cover.covered[2], (std::vector<DemandId>{4, 5}));
}

TEST(CoverTest, EdgeCases) {
  EXPECT_TRUE(min_multiplier_cover({}).points.empty());
  const auto single = min_multiplier_cover({iv(7, 2, Rational(2))});
  EXPECT_EQ(single.points, (std::vector<Rational>{2}));
  EXPECT_EQ(single.anchors, (std::vector<DemandId>{7}));
  EXPECT_THROW(min_multiplier_cover({iv(0, 3, Rational(1))}), InvalidInputError);
}

TEST(CoverProperty, MinimumAndComplete) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 150; ++trial) {
    std::vector<FeasibleInterval> ivs;
    const int n = uniform_int(rng, 1, 8);
    for (int i = 0; i < n; ++i) {
      const int lo = uniform_int(rng, 0, 10);
      const int roll = uniform_int(rng, 0, 5);
      std::optional<Rational> hi;
      if (roll == 0) hi = Rational(lo);
      else if (roll != 1) hi = Rational(lo + uniform_int(rng, 0, 6));
      ivs.push_back(iv(i, lo, hi));
    }
    const auto cover = min_multiplier_cover(ivs);
    ASSERT_EQ(cover.points.size(), brute_force_stabbing(ivs)) << "trial " << trial;
    std::vector<int> hits(n, 0);
    for (std::size_t p = 0; p < cover.points.size(); ++p) {
      for (DemandId k : cover.covered[p]) {
        ASSERT_TRUE(ivs[k].contains(cover.points[p]));
        ++hits[k];
      }
    }
    ASSERT_EQ(std::count(hits.begin(), hits.end(), 1), n);
  }
}

TEST(PlacementTest, CandidatesMoveInward) {
  const auto from_max =
      detail::placement_candidates(Rational(1), Rational(2), LambdaPlacement::kMax);
  EXPECT_EQ(from_max.front(), Rational(2));
  EXPECT_LT(from_max[1], Rational(2));
  EXPECT_EQ(from_max.size(), static_cast<std::size_t>(kPerturbationSteps) + 1);
  const auto mid =
      detail::placement_candidates(Rational(1), Rational(2), LambdaPlacement::kMidpoint);
  EXPECT_EQ(mid.front(), Rational(3, 2));
  EXPECT_GT(mid[1], Rational(3, 2));
  // A point interval has nowhere to move but the perturbation still runs.
  const auto point =
      detail::placement_candidates(Rational(1), Rational(1), LambdaPlacement::kMax);
  EXPECT_EQ(point.front(), Rational(1));
  // A tiny interval stops at its midpoint.
  const Rational lo(1), hi = Rational(1) + Rational(1, 1 << 22);
  const auto tiny = detail::placement_candidates(lo, hi, LambdaPlacement::kMax);
  EXPECT_EQ(tiny.back(), (lo + hi) / 2);
  EXPECT_LT(tiny.size(), 10u);
}

TEST(DesignVmtrTest, FixtureD) {
  FixtureD d;
  const auto plan = design_vmtr(d.net, d.ms, {d.k0}, VmtrConfig{});
  ASSERT_EQ(plan.virtual_topologies.size(), 1u);
  EXPECT_TRUE(plan.real_topologies.empty());
  const auto& vt = plan.virtual_topologies[0];
  EXPECT_EQ(vt.stab_point, Rational(5));
  EXPECT_EQ(vt.assigned, (std::vector<DemandId>{0}));
  ASSERT_EQ(vt.lambda.size(), 2u);
  EXPECT_EQ(vt.lambda[0], 1);
  // The clean route ties at 5; the deployed multiplier sits just inside.
  EXPECT_LT(vt.lambda[1], Rational(5));
  EXPECT_GT(vt.lambda[1], Rational(1, 5));
  EXPECT_TRUE(lambda_serves(d.net, d.ms, d.k0, vt.lambda[1]));
  EXPECT_FALSE(lambda_serves(d.net, d.ms, d.k0, Rational(5)));
}

TEST(DesignVmtrTest, EmptyDemandSet) {
  FixtureD d;
  const auto plan = design_vmtr(d.net, d.ms, {}, VmtrConfig{});
  EXPECT_EQ(plan.num_topologies(), 0u);
}

TEST(DesignVmtrTest, PointIntervalFallsBackToReal) {
  FixtureGap g;
  const auto interval = feasible_interval(g.net, g.ms, g.k);
  ASSERT_TRUE(interval);
  EXPECT_EQ(interval->lambda_min, Rational(1));
  EXPECT_EQ(interval->lambda_max, Rational(1));
  VmtrStats stats;
  const auto plan = design_vmtr(g.net, g.ms, {g.k}, VmtrConfig{}, &stats);
  EXPECT_TRUE(plan.virtual_topologies.empty());
  ASSERT_EQ(plan.real_topologies.size(), 1u);
  EXPECT_EQ(plan.discarded_to_mtr, (std::vector<DemandId>{0}));
  EXPECT_EQ(stats.demoted, 1u);
}

TEST(DesignVmtrTest, RejectsThreeMetrics) {
  const Network net = make_network(2, {{0, 1}});
  const MetricSet ms({"a", "b", "c"}, {{1}, {1}, {1}});
  EXPECT_THROW(design_vmtr(net, ms, {}, VmtrConfig{}), InvalidInputError);
}

TEST(VirtualWeightsTest, CombinesExactly) {
  FixtureD d;
  const auto w = virtual_weights(d.ms, lambda_coefficients(Rational(1, 2)));
  EXPECT_EQ(w[FixtureD::kFastA], Rational(6));
  EXPECT_EQ(w[FixtureD::kCleanA], Rational(21, 2));
  const auto scaled = scaled_virtual_weights(d.ms, lambda_coefficients(Rational(1, 2)));
  EXPECT_EQ(scaled[FixtureD::kFastA] * 21, scaled[FixtureD::kCleanA] * 12);
  EXPECT_THROW(virtual_weights(d.ms, {Rational(1)}), InvalidInputError);
}

// Every demand a design places on a virtual topology is served by it, and
// each demand is placed once.
TEST(DesignVmtrProperty, VirtualAssignmentsAreServed) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 10; ++trial) {
    const Network net = connected_geometric(rng, uniform_int(rng, 4, 8));
    const MetricSet ms = random_metrics(rng, net.num_arcs(), 1, 20);
    const auto demands = feasible_random_demands(rng, net, ms, 8);
    VmtrConfig cfg;
    cfg.mtr.max_iterations = 10;
    cfg.placement = trial % 2 ? LambdaPlacement::kMidpoint : LambdaPlacement::kMax;
    const auto plan = design_vmtr(net, ms, demands, cfg);
    std::vector<int> hits(demands.size(), 0);
    for (const auto& vt : plan.virtual_topologies) {
      for (DemandId k : vt.assigned) {
        ASSERT_TRUE(lambda_serves(net, ms, demands[k], vt.lambda[1])) << trial;
        ++hits[k];
      }
    }
    for (const auto& rt : plan.real_topologies) {
      for (DemandId k : rt.assigned) ++hits[k];
    }
    ASSERT_EQ(std::count(hits.begin(), hits.end(), 1),
              static_cast<std::ptrdiff_t>(demands.size()));
    ASSERT_EQ(design_vmtr(net, ms, demands, cfg), plan);
  }
}
