#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "mlgate/metrics.hpp"

using namespace mlgate::metrics;

namespace {

ConfusionMatrix example() {
  const std::vector<std::uint64_t> counts{3, 1, 2, 4};
  return ConfusionMatrix::from_counts(counts);
}

ConfusionMatrix random_matrix(std::mt19937_64& rng, std::size_t k) {
  std::uniform_int_distribution<std::uint64_t> d(0, 20);
  ConfusionMatrix cm(k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) cm.add(i, j, d(rng));
  cm.add(0, 0);
  return cm;
}

}  // namespace

TEST(Metrics, TwoClassExample) {
  const auto cm = example();
  EXPECT_NEAR(accuracy(cm), 0.7, 1e-12);
  const auto pc = per_class(cm);
  EXPECT_NEAR(pc[0].precision, 0.6, 1e-12);
  EXPECT_NEAR(pc[1].precision, 0.8, 1e-12);
  EXPECT_NEAR(pc[0].recall, 0.75, 1e-12);
  EXPECT_NEAR(pc[1].recall, 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(pc[0].f1, 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(pc[1].f1, 8.0 / 11.0, 1e-12);
  const auto m = macro_prf(cm);
  EXPECT_NEAR(m.precision, 0.7, 1e-12);
  EXPECT_NEAR(m.recall, 17.0 / 24.0, 1e-12);
  EXPECT_NEAR(m.f1, 23.0 / 33.0, 1e-12);
}

TEST(Metrics, PerfectDiagonal) {
  ConfusionMatrix cm(3);
  for (std::size_t c = 0; c < 3; ++c) cm.add(c, c, 5);
  const auto m = macro_prf(cm);
  EXPECT_EQ(m.precision, 1.0);
  EXPECT_EQ(m.recall, 1.0);
  EXPECT_EQ(m.f1, 1.0);
}

TEST(Metrics, AbsentClassScoresZero) {
  ConfusionMatrix cm(3);
  cm.add(0, 0, 4);
  cm.add(1, 1, 4);
  const auto pc = per_class(cm);
  EXPECT_EQ(pc[2].precision, 0.0);
  EXPECT_EQ(pc[2].recall, 0.0);
  EXPECT_EQ(pc[2].f1, 0.0);
  EXPECT_NEAR(macro_prf(cm).f1, 2.0 / 3.0, 1e-12);
}

TEST(Metrics, EmptyAndMalformedInputs) {
  EXPECT_THROW(accuracy(ConfusionMatrix(2)), std::invalid_argument);
  const std::vector<std::uint64_t> three{1, 2, 3};
  EXPECT_THROW(ConfusionMatrix::from_counts(three), std::invalid_argument);
  ConfusionMatrix cm(2);
  EXPECT_THROW(cm.add(2, 0), std::out_of_range);
  EXPECT_THROW(cm.merge(ConfusionMatrix(3)), std::invalid_argument);
}

TEST(Metrics, MergeAddsCounts) {
  auto a = example();
  a.merge(example());
  EXPECT_EQ(a.total(), 20u);
  EXPECT_EQ(a.at(1, 0), 4u);
  EXPECT_NEAR(accuracy(a), 0.7, 1e-12);
}

TEST(Metrics, AccuracyEqualsMicroRecall) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 100; ++t) {
    const auto cm = random_matrix(rng, 2 + t % 9);
    std::uint64_t tp = 0, fn = 0;
    for (std::size_t c = 0; c < cm.classes(); ++c) {
      tp += cm.at(c, c);
      for (std::size_t j = 0; j < cm.classes(); ++j)
        if (j != c) fn += cm.at(c, j);
    }
    EXPECT_NEAR(accuracy(cm), static_cast<double>(tp) / static_cast<double>(tp + fn), 1e-15);
    const auto m = macro_prf(cm);
    EXPECT_GE(m.f1, 0.0);
    EXPECT_LE(m.f1, 1.0);
  }
}

TEST(Metrics, PermutationInvariance) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 50; ++t) {
    const std::size_t k = 2 + t % 8;
    const auto cm = random_matrix(rng, k);
    std::vector<std::size_t> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    ConfusionMatrix pm(k);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) pm.add(perm[i], perm[j], cm.at(i, j));
    const auto a = per_class(cm);
    const auto b = per_class(pm);
    for (std::size_t i = 0; i < k; ++i) {
      EXPECT_EQ(a[i].precision, b[perm[i]].precision);
      EXPECT_EQ(a[i].f1, b[perm[i]].f1);
    }
    const auto ma = macro_prf(cm), mb = macro_prf(pm);
    EXPECT_NEAR(ma.precision, mb.precision, 1e-14);
    EXPECT_NEAR(ma.recall, mb.recall, 1e-14);
    EXPECT_NEAR(ma.f1, mb.f1, 1e-14);
  }
}

TEST(EarlyStop, TruthTable) {
  std::vector<double> h(10, 0.9);
  EXPECT_FALSE(f1_early_stop(h));
  h.push_back(0.9);
  EXPECT_TRUE(f1_early_stop(h));

  std::vector<double> g{0.5, 0.51};
  for (int i = 0; i < 10; ++i) g.push_back(g.back() + 0.0005);
  EXPECT_TRUE(f1_early_stop(g));
  // Dropping one small step leaves the 0.01 jump inside the window.
  g.pop_back();
  EXPECT_FALSE(f1_early_stop(g));

  std::vector<double> exact{0.9, 0.901};
  EXPECT_FALSE(f1_early_stop(exact, 0.001, 1));
  EXPECT_TRUE(f1_early_stop(std::vector<double>{0.9, 0.9005}, 0.001, 1));
  EXPECT_FALSE(f1_early_stop(std::vector<double>{0.9, 0.9}, 0.001, 0));
  EXPECT_FALSE(f1_early_stop(std::vector<double>{}));
}
