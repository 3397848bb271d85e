#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "loadseg/parallel.hpp"
#include "loadseg/random.hpp"
#include "loadseg/stats.hpp"

using namespace loadseg;

TEST(Stats, QuantileType7) {
  std::vector<double> v{4, 1, 3, 2};
  EXPECT_DOUBLE_EQ(quantile(v, 0), 1);
  EXPECT_DOUBLE_EQ(quantile(v, 100), 4);
  EXPECT_DOUBLE_EQ(quantile(v, 50), 2.5);
  EXPECT_DOUBLE_EQ(quantile(v, 10), 1.3);
  EXPECT_DOUBLE_EQ(median(std::vector<double>{5, 1, 3}), 3);
}

TEST(Stats, MeanAndPopulationStd) {
  std::vector<double> v{2, 4, 4, 4, 5, 5, 7, 9};
  EXPECT_DOUBLE_EQ(mean(v), 5);
  EXPECT_DOUBLE_EQ(stddev(v), 2);
  RunningStats rs;
  for (double x : v) rs.push(x);
  EXPECT_DOUBLE_EQ(rs.mean(), 5);
  EXPECT_NEAR(rs.stddev(), 2, 1e-15);
}

TEST(Stats, RunningStatsConstantHasZeroStd) {
  RunningStats rs;
  for (int i = 0; i < 1000; ++i) rs.push(0.1234567);
  EXPECT_EQ(rs.stddev(), 0.0);
}

TEST(Random, Deterministic) {
  Rng a(42), b(42), c(43);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next();
    EXPECT_EQ(x, b.next());
    EXPECT_NE(x, c.next());
  }
  EXPECT_NE(mix_seed(1, 0), mix_seed(1, 1));
  EXPECT_NE(mix_seed(1, 0), mix_seed(2, 0));
}

TEST(Random, DistributionsInRange) {
  Rng r(9);
  RunningStats u, n;
  for (int i = 0; i < 20000; ++i) {
    const double x = r.uniform();
    ASSERT_GE(x, 0.0);
    ASSERT_LT(x, 1.0);
    u.push(x);
    n.push(r.normal());
    const auto k = r.index(7);
    ASSERT_LT(k, 7u);
    const auto j = r.integer(-3, 3);
    ASSERT_GE(j, -3);
    ASSERT_LE(j, 3);
  }
  EXPECT_NEAR(u.mean(), 0.5, 0.02);
  EXPECT_NEAR(n.mean(), 0.0, 0.03);
  EXPECT_NEAR(n.stddev(), 1.0, 0.03);
  RunningStats p;
  for (int i = 0; i < 5000; ++i) p.push(r.poisson(3.0));
  EXPECT_NEAR(p.mean(), 3.0, 0.1);
}

TEST(Parallel, CoversEveryIndexOnce) {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(hits.size(), 4, [&](std::size_t i) { ++hits[i]; });
  for (auto& h : hits) EXPECT_EQ(h.load(), 1);
}

TEST(Parallel, RethrowsTaskError) {
  EXPECT_THROW(parallel_for(50, 3,
                            [](std::size_t i) {
                              if (i == 17) throw std::runtime_error("x");
                            }),
               std::runtime_error);
  EXPECT_THROW(parallel_for(5, 1,
                            [](std::size_t i) {
                              if (i == 2) throw std::runtime_error("x");
                            }),
               std::runtime_error);
}
