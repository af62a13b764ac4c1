#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "recomb/crossover.hpp"

namespace recomb {
namespace {

std::vector<CrossoverLaw> named_laws(int n) {
  return {CrossoverLaw::single_site(n), CrossoverLaw::one_point(n), CrossoverLaw::uniform(n),
          CrossoverLaw::bernoulli(n, 0.1), CrossoverLaw::bernoulli(n, 0.25), CrossoverLaw::bernoulli(n, 0.5)};
}

double binomial(int n, int k) {
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

TEST(CrossoverLaw, SupportExamples) {
  const auto ss = CrossoverLaw::single_site(3).support();
  ASSERT_EQ(ss.size(), 3u);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(ss[i].subset, SiteSubset::of({i}));
    EXPECT_DOUBLE_EQ(ss[i].weight, 1.0 / 3.0);
  }
  const auto op = CrossoverLaw::one_point(2).support();
  ASSERT_EQ(op.size(), 3u);
  EXPECT_EQ(op[0].subset, SiteSubset::empty());
  EXPECT_EQ(op[1].subset, SiteSubset::of({0}));
  EXPECT_EQ(op[2].subset, SiteSubset::of({0, 1}));
  for (const auto& e : op) EXPECT_DOUBLE_EQ(e.weight, 1.0 / 3.0);
  for (const auto& e : CrossoverLaw::bernoulli(5, 0.5).support()) EXPECT_DOUBLE_EQ(e.weight, 1.0 / 32.0);
}

TEST(CrossoverLaw, SupportSumsToOne) {
  for (int n = 1; n <= 12; ++n) {
    for (const auto& law : named_laws(n)) {
      double total = 0.0;
      for (const auto& e : law.support()) total += e.weight;
      EXPECT_NEAR(total, 1.0, 1e-12) << law.name() << " n=" << n;
    }
  }
}

TEST(CrossoverLaw, MixedMomentMatchesSupportSum) {
  const double grid[] = {0.0, 0.25, 0.5, 1.0};
  for (int n = 1; n <= 12; ++n) {
    for (const auto& law : named_laws(n)) {
      const auto support = law.support();
      for (double u : grid) {
        for (double v : grid) {
          double direct = 0.0;
          for (const auto& e : support) {
            direct += e.weight * std::pow(u, e.subset.size()) * std::pow(v, n - e.subset.size());
          }
          EXPECT_NEAR(law.mixed_moment(u, v), direct, 1e-12) << law.name() << " n=" << n;
        }
      }
      EXPECT_NEAR(law.mixed_moment(1.0, 1.0), 1.0, 1e-12);
    }
  }
}

TEST(CrossoverLaw, MomentClosedForms) {
  for (int n = 1; n <= 12; ++n) {
    for (double q : {0.0, 0.1, 0.3, 0.5}) {
      const auto law = CrossoverLaw::bernoulli(n, q);
      EXPECT_NEAR(law.mixed_moment(0.5, 1.0), std::pow(1.0 - q / 2.0, n), 1e-14);
      EXPECT_NEAR(law.delta(), std::pow(1.0 - q / 2.0, n) + std::pow(1.0 + q, n) / std::pow(2.0, n), 1e-14);
    }
    // Binomial-sum oracle for the uniform law.
    double m = 0.0;
    for (int k = 0; k <= n; ++k) m += binomial(n, k) * std::pow(0.5, n) * std::pow(0.5, k);
    EXPECT_NEAR(CrossoverLaw::uniform(n).mixed_moment(0.5, 1.0), m, 1e-14);
    EXPECT_NEAR(m, std::pow(0.75, n), 1e-14);
    EXPECT_NEAR(CrossoverLaw::uniform(n).delta(), 2.0 * m, 1e-14);
    EXPECT_NEAR(CrossoverLaw::single_site(n).delta(), 0.5 + std::pow(2.0, 1 - n), 1e-14);
  }
}

TEST(CrossoverLaw, ExplicitLaw) {
  const auto law = CrossoverLaw::explicit_law(3, {{SiteSubset::of({0}), 0.25},
                                                  {SiteSubset::of({1, 2}), 0.25},
                                                  {SiteSubset::of({0}), 0.5}});
  EXPECT_EQ(law.support().size(), 2u);
  EXPECT_DOUBLE_EQ(law.weight(SiteSubset::of({0})), 0.75);
  EXPECT_FALSE(law.nondegenerate());  // sites 1 and 2 are never separated
  EXPECT_NEAR(law.mixed_moment(0.5, 1.0), 0.75 * 0.5 + 0.25 * 0.25, 1e-15);
  EXPECT_THROW(CrossoverLaw::explicit_law(3, {{SiteSubset::of({0}), 0.5}}), InvalidArgument);
  EXPECT_THROW(CrossoverLaw::explicit_law(2, {{SiteSubset::of({2}), 1.0}}), InvalidArgument);
  EXPECT_THROW(CrossoverLaw::explicit_law(2, {{SiteSubset::of({0}), 1.5}, {SiteSubset::of({1}), -0.5}}),
               InvalidArgument);
}

TEST(CrossoverLaw, ValidationAndDegeneracy) {
  EXPECT_THROW(CrossoverLaw::bernoulli(4, 0.6), InvalidArgument);
  EXPECT_THROW(CrossoverLaw::bernoulli(4, -0.1), InvalidArgument);
  EXPECT_THROW(CrossoverLaw::uniform(0), InvalidArgument);
  EXPECT_THROW(CrossoverLaw::uniform(21).support(), CapExceeded);
  EXPECT_NO_THROW(CrossoverLaw::single_site(40).support());
  for (int n = 2; n <= 10; ++n) {
    for (const auto& law : named_laws(n)) EXPECT_TRUE(law.nondegenerate());
    EXPECT_FALSE(CrossoverLaw::bernoulli(n, 0.0).nondegenerate());
  }
}

TEST(CrossoverLaw, Sampling) {
  std::mt19937_64 rng(99);
  const int samples = 100000;
  for (int k = 0; k < 1000; ++k) EXPECT_EQ(CrossoverLaw::single_site(7).sample(rng).size(), 1);

  const double q = 0.3;
  const auto bern = CrossoverLaw::bernoulli(6, q);
  std::vector<int> hits(6, 0);
  for (int k = 0; k < samples; ++k) {
    const auto a = bern.sample(rng);
    for (int i = 0; i < 6; ++i) hits[i] += a.contains(i);
  }
  const double sigma = std::sqrt(q * (1 - q) / samples);
  for (int h : hits) EXPECT_LE(std::abs(static_cast<double>(h) / samples - q), 3.0 * sigma);

  const auto uni = CrossoverLaw::uniform(9);
  double total = 0.0;
  for (int k = 0; k < samples; ++k) total += uni.sample(rng).size();
  EXPECT_LE(std::abs(total / samples - 4.5), 3.0 * std::sqrt(9 * 0.25 / samples));

  std::mt19937_64 a(5), b(5);
  for (int k = 0; k < 100; ++k) EXPECT_EQ(uni.sample(a), uni.sample(b));
}

}  // namespace
}  // namespace recomb
