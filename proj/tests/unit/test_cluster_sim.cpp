#include <algorithm>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "approxifer/cluster_sim.hpp"
#include "approxifer/harness/dataset.hpp"
#include "fixtures.hpp"

using namespace approxifer;
using namespace approxifer::sim;

namespace {

RowBlock fixture_batch(std::size_t k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> labels;
  return harness::sample_batch(support::blobs_dataset(), k, rng, labels);
}

LatencyModel exp_latency() { return LatencyModel{10.0, LatencyModel::Tail::exponential, 5.0, 0.0, 0.0}; }

}  // namespace

TEST(LatencyModel, Tails) {
  std::mt19937_64 rng(1);
  EXPECT_EQ(LatencyModel{}.sample(rng), 10.0);
  const auto m = exp_latency();
  double sum = 0;
  for (int i = 0; i < 20000; ++i) {
    const double v = m.sample(rng);
    EXPECT_GE(v, 10.0);
    sum += v;
  }
  EXPECT_NEAR(sum / 20000, 15.0, 0.2);
  const LatencyModel ln{1.0, LatencyModel::Tail::lognormal, 0.0, 0.0, 0.5};
  EXPECT_GT(ln.sample(rng), 1.0);
}

TEST(ForEachSubset, CountsAndOrder) {
  std::vector<std::set<std::size_t>> seen;
  for_each_subset(5, 2, [&](const std::set<std::size_t>& s) { seen.push_back(s); });
  ASSERT_EQ(seen.size(), 10u);
  EXPECT_EQ(seen.front(), (std::set<std::size_t>{0, 1}));
  EXPECT_EQ(seen.back(), (std::set<std::size_t>{3, 4}));
  std::size_t n0 = 0;
  for_each_subset(4, 0, [&](const std::set<std::size_t>& s) { n0 += s.empty(); });
  EXPECT_EQ(n0, 1u);
}

TEST(Corruption, NoiseIsKeyedBySeedAndRequest) {
  const auto a = corruption_noise(1, request_id(3, 4), 10, 2.0);
  EXPECT_EQ(a, corruption_noise(1, request_id(3, 4), 10, 2.0));
  EXPECT_NE(a, corruption_noise(2, request_id(3, 4), 10, 2.0));
  EXPECT_NE(a, corruption_noise(1, request_id(3, 5), 10, 2.0));
  EXPECT_EQ(request_id(3, 4), (3u << 16) | 4u);
}

TEST(RandomPlan, SizesAndDeterminism) {
  const auto p = random_plan(20, 3, 2, 5.0, 9);
  EXPECT_EQ(p.byzantine_ids.size(), 3u);
  EXPECT_EQ(p.straggler_ids.size(), 2u);
  EXPECT_EQ(p.noise_sigma, 5.0);
  const auto q = random_plan(20, 3, 2, 5.0, 9);
  EXPECT_EQ(p.byzantine_ids, q.byzantine_ids);
  EXPECT_EQ(p.straggler_ids, q.straggler_ids);
  EXPECT_THROW(random_plan(2, 3, 0, 1.0, 1), std::invalid_argument);
}

TEST(RunRound, SeedDeterminismBitIdentical) {
  const auto config = make_config(8, 1, 2);
  const auto f = support::blobs_predictor();
  const auto batch = fixture_batch(8, 1);
  const auto workers = make_workers(config.workers(), exp_latency());
  const auto plan = random_plan(config.workers(), 2, 1, 10.0, 77);
  const auto a = run_round(batch, config, *f, workers, plan, {5, 0});
  const auto b = run_round(batch, config, *f, workers, plan, {5, 0});
  EXPECT_EQ(a.decoded, b.decoded);
  EXPECT_EQ(a.latencies_ms, b.latencies_ms);
  EXPECT_EQ(a.arrival_order, b.arrival_order);
  EXPECT_EQ(a.excluded, b.excluded);
  EXPECT_EQ(a.wall_clock_ms, b.wall_clock_ms);
  const auto c = run_round(batch, config, *f, workers, plan, {6, 0});
  EXPECT_NE(a.latencies_ms, c.latencies_ms);
}

TEST(RunRound, WallClockIsQuorumOrderStatisticFixedLatency) {
  const auto config = make_config(4, 2, 0);
  auto workers = make_workers(config.workers());
  const std::vector<double> lat{30, 5, 12, 50, 7, 20};  // sorted: 5 7 12 20 30 50
  for (std::size_t i = 0; i < workers.size(); ++i) workers[i].latency = LatencyModel{lat[i]};
  const auto f = constant_predictor({1.0, 0.0});
  const auto batch = support::random_batch(4, 2, *std::make_unique<std::mt19937_64>(1));
  const auto r = run_round(batch, config, *f, workers, AdversaryPlan{}, {1, 0});
  EXPECT_EQ(r.wall_clock_ms, 20.0);  // 4th fastest
  EXPECT_EQ(r.returned, (std::vector<std::size_t>{1, 4, 2, 5}));
  EXPECT_EQ(r.arrival_order, (std::vector<std::size_t>{1, 4, 2, 5, 0, 3}));
  // Planned stragglers arrive last regardless of sampled latency.
  AdversaryPlan plan;
  plan.straggler_ids = {1, 4};
  const auto s = run_round(batch, config, *f, workers, plan, {1, 0});
  EXPECT_EQ(s.returned, (std::vector<std::size_t>{2, 5, 0, 3}));
  EXPECT_EQ(s.wall_clock_ms, 50.0);
}

TEST(RunRound, StragglerOrderInvarianceAtEZero) {
  const auto config = make_config(6, 2, 0);
  const auto f = support::blobs_predictor();
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto batch = fixture_batch(6, seed);
    const auto plan = random_plan(config.workers(), 0, 2, 1.0, seed);
    std::set<std::size_t> survivors;
    for (std::size_t i = 0; i < config.workers(); ++i)
      if (!plan.straggler_ids.contains(i)) survivors.insert(i);
    const auto reference = replay_round(batch, config, *f, survivors, plan, {seed, 0});
    // Different latency draws reorder the survivors' arrivals.
    for (std::uint64_t shuffle = 0; shuffle < 5; ++shuffle) {
      const auto r = run_round(batch, config, *f, make_workers(config.workers(), exp_latency()), plan,
                               {seed * 100 + shuffle, 0});
      EXPECT_EQ(std::set<std::size_t>(r.returned.begin(), r.returned.end()), survivors);
      EXPECT_EQ(r.decoded, reference.decoded);
    }
  }
}

TEST(RunRound, ByzantineAmongStragglersMissesQuorum) {
  const auto config = make_config(4, 1, 1);
  const auto f = support::blobs_predictor();
  const auto batch = fixture_batch(4, 3);
  AdversaryPlan plan;
  plan.byzantine_ids = {2};
  plan.straggler_ids = {2};
  plan.noise_sigma = 10.0;
  const auto r = run_round(batch, config, *f, make_workers(config.workers(), exp_latency()), plan, {1, 0});
  EXPECT_TRUE(r.planted.empty());
  EXPECT_EQ(std::count(r.returned.begin(), r.returned.end(), 2u), 0);
  EXPECT_TRUE(r.locator_exact_hit());
  EXPECT_EQ(r.excluded.size(), 1u);  // E is a fixed budget
}

TEST(RunRound, HonestWorkersWithErrorBudgetStillDecode) {
  const auto f = support::blobs_predictor();
  for (std::size_t k : {2u, 5u, 8u})
    for (std::size_t e : {1u, 2u, 3u}) {
      const auto config = make_config(k, 0, e);
      const auto r = run_round(fixture_batch(k, k * 10 + e), config, *f, make_workers(config.workers()),
                               AdversaryPlan{}, {1, 0});
      EXPECT_EQ(r.excluded.size(), e);
      EXPECT_GE(r.returned.size() - r.excluded.size(), 2 * k + e);
      EXPECT_EQ(r.decoded.size(), k);
    }
}

TEST(RunRound, LocatesPlantedWorkersOnFixture) {
  const auto config = make_config(8, 0, 2);
  const auto f = support::blobs_predictor();
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto plan = random_plan(config.workers(), 2, 0, 10.0, seed);
    const auto r = run_round(fixture_batch(8, seed), config, *f, make_workers(config.workers()), plan, {seed, 0});
    hits += r.locator_exact_hit() ? 1 : 0;
  }
  EXPECT_GE(hits, 49);
}

TEST(RunRound, SizingErrors) {
  const auto config = make_config(4, 1, 0);
  const auto f = constant_predictor({1.0});
  const auto batch = support::random_batch(4, 1, *std::make_unique<std::mt19937_64>(1));
  EXPECT_THROW(run_round(batch, config, *f, make_workers(3), {}, {}), std::invalid_argument);
  AdversaryPlan plan;
  plan.straggler_ids = {0, 1};
  EXPECT_THROW(run_round(batch, config, *f, make_workers(5), plan, {}), InsufficientResults);
}

TEST(Replication, WorkerCountsAndMajority) {
  EXPECT_EQ(replication_workers(12, 2), 60u);
  EXPECT_EQ(make_config(12, 0, 2).workers(), 28u);
  const auto f = support::blobs_predictor();
  const std::size_t k = 5, e = 2;
  const auto batch = fixture_batch(k, 4);
  // E corrupted replicas of query 0 with large noise.
  AdversaryPlan plan;
  plan.byzantine_ids = {0, 1};
  plan.noise_sigma = 100.0;
  const auto r = replication_round(batch, e, *f, make_workers(replication_workers(k, e), exp_latency()), plan, {1, 0});
  for (bool a : r.agreement) EXPECT_TRUE(a);
  EXPECT_EQ(r.decoded.size(), k);
  EXPECT_EQ(r.planted.size(), 2u);
  EXPECT_EQ(r.wall_clock_ms, *std::max_element(r.latencies_ms.begin(), r.latencies_ms.end()));

  const auto single = replication_round(batch, 0, *f, make_workers(k), {}, {1, 0});
  EXPECT_EQ(single.decoded, single.base);
  EXPECT_THROW(replication_round(batch, 1, *f, make_workers(k), {}, {}), std::invalid_argument);
}
