#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"

using namespace gridjam;
using gridjam::testing::e1_graph;
using gridjam::testing::e1_system;
using gridjam::testing::random_system;

TEST(Oracle, E1Values) {
  const auto hg = optimal_cost(e1_graph(), {1, .5, .25}, AttackType::HiddenGeneralized);
  ASSERT_TRUE(hg);
  EXPECT_DOUBLE_EQ(hg->cost, 1.25);
  const auto dg = optimal_cost(e1_graph(), {1, .8, .6}, AttackType::DetectableGeneralized);
  ASSERT_TRUE(dg);
  EXPECT_DOUBLE_EQ(dg->cost, 1.6);
  const auto hi = optimal_cost(e1_graph(), {1, .5, .25}, AttackType::HiddenInjection);
  ASSERT_TRUE(hi);
  EXPECT_DOUBLE_EQ(hi->cost, 2.0);
  EXPECT_EQ(hi->plan.cut.edges, (std::vector<MeasurementId>{1, 3}));
}

TEST(Oracle, AllSecureHasNoAttack) {
  MeasurementSystem sys = e1_system();
  for (auto& m : sys.measurements) m.secure = true;
  const MeasurementGraph g = build_graph(sys);
  for (AttackType type : kAllAttackTypes) EXPECT_FALSE(optimal_cost(g, {1, .5, .25}, type)) << to_string(type);
}

TEST(Oracle, SplitAdmissibility) {
  // Two secure, one insecure: detectable needs the secure edges jammed down to a minority.
  EXPECT_FALSE(admissible(AttackType::DetectableInjection, 2, 1, {1, 0, 0}));
  EXPECT_TRUE(admissible(AttackType::DetectableGeneralized, 2, 1, {1, 0, 2}));
  EXPECT_FALSE(admissible(AttackType::DetectableGeneralized, 2, 1, {1, 0, 1}));
  EXPECT_FALSE(admissible(AttackType::DetectableJamming, 2, 1, {1, 0, 2}));
  EXPECT_FALSE(admissible(AttackType::HiddenJamming, 0, 2, {1, 0, 0}));
  EXPECT_TRUE(admissible(AttackType::HiddenJamming, 0, 2, {1, 1, 0}));
  EXPECT_FALSE(admissible(AttackType::HiddenGeneralized, 1, 1, {0, 1, 1}));
}

TEST(Oracle, BestSplitExamples) {
  const auto s = best_split(AttackType::DetectableGeneralized, {1, .8, .6}, 2, 2);
  ASSERT_TRUE(s);
  EXPECT_DOUBLE_EQ(s->first, 2.8);
  EXPECT_EQ(s->second.inject, 2);
  EXPECT_EQ(s->second.jam_secure, 1);
  const auto j = best_split(AttackType::DetectableJamming, {1, .8, .25}, 0, 3);
  ASSERT_TRUE(j);
  EXPECT_DOUBLE_EQ(j->first, 1.5);
}

TEST(Oracle, TooLarge) {
  const CaseFile cf = load_case("ieee14");
  const MeasurementGraph g = build_graph(place_measurements(cf, 0.6, 0.0, 1));
  EXPECT_THROW(CutCatalog(g, kOracleNodeCap), TooLarge);
}

// The oracle's plan is itself a valid attack of the requested type.
TEST(OracleProperty, OraclePlansVerify) {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 40; ++t) {
    const int nodes = 3 + static_cast<int>(rng() % 5);
    const MeasurementSystem sys = random_system(rng, nodes, nodes + 2 + static_cast<int>(rng() % 6), 0.4);
    const MeasurementGraph g = build_graph(sys);
    const CutCatalog catalog(g);
    Eigen::VectorXd truth = Eigen::VectorXd::Zero(sys.num_nodes());
    for (AttackType type : kAllAttackTypes) {
      const auto o = optimal_cost(catalog, {1, .7, .4}, type);
      if (!o) continue;
      EXPECT_TRUE(execute(sys, truth, o->plan).matches_declared_type) << to_string(type);
    }
  }
}
