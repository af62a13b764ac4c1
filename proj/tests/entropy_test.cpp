#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "recomb/entropy.hpp"
#include "recomb/random.hpp"
#include "test_support.hpp"

namespace recomb {
namespace {

const double kLog2 = std::log(2.0);

// Density of (Z0, ..., Z0) with Z0 uniform on {0, 1}, against the uniform measure.
Density binary_copies(int n) {
  const auto space = ProductSpace::binary(n);
  std::vector<double> f(space.size(), 0.0);
  f.front() = f.back() = std::pow(2.0, n - 1);
  return Density(f);
}

TEST(Ent, SmallExamples) {
  const auto mu1 = ProductMeasure::uniform(ProductSpace::binary(1));
  EXPECT_NEAR(ent(Density({2.0, 0.0}), mu1), kLog2, 1e-15);
  const auto mu3 = ProductMeasure::uniform(ProductSpace::binary(3));
  EXPECT_EQ(ent(Density(std::vector<double>(8, 1.0)), mu3), 0.0);
  EXPECT_NEAR(ent(Density(std::vector<double>(8, 3.0)), mu3), 0.0, 1e-15);
  for (int n = 1; n <= 6; ++n) {
    const auto mu = ProductMeasure::uniform(ProductSpace::binary(n));
    EXPECT_NEAR(ent(binary_copies(n), mu), (n - 1) * kLog2, 1e-13);
  }
}

TEST(Ent, MatchesDefinition) {
  const ProductSpace space({3, 2, 2});
  std::mt19937_64 rng(8);
  for (int k = 0; k < 20; ++k) {
    const auto mu = random_product_measure(space, rng);
    auto g = sample_dirichlet(space.size(), 0.7, rng);
    for (double& x : g) x *= 5.0;
    EXPECT_NEAR(ent(Density(g), mu), testing::brute_ent(g, mu.joint()), 1e-13);
  }
}

TEST(RelativeEntropy, Examples) {
  const auto space = ProductSpace::uniform_alphabet(2, 3);
  const auto u = Distribution::uniform(space);
  EXPECT_EQ(relative_entropy(u, u), 0.0);
  EXPECT_NEAR(relative_entropy(Distribution::point_mass(space, 4), u), std::log(9.0), 1e-14);
  EXPECT_EQ(relative_entropy(u, Distribution::point_mass(space, 4)), std::numeric_limits<double>::infinity());
  std::mt19937_64 rng(4);
  for (int k = 0; k < 50; ++k) {
    const auto p = random_distribution(space, rng, 0.5);
    const auto q = random_distribution(space, rng, 0.5);
    EXPECT_LE(total_variation(p.weights(), q.weights()), std::sqrt(relative_entropy(p, q) / 2.0) + 1e-15);
  }
}

TEST(ConditionalDecomposition, Parts) {
  const auto space = ProductSpace::binary(4);
  std::mt19937_64 rng(12);
  const auto mu = random_product_measure(space, rng);
  const auto f = density_of(random_distribution(space, rng), mu);
  const double total = ent(f, mu);
  auto full = conditional_decomposition(f, SiteSubset::full(4), mu);
  EXPECT_NEAR(full.marginal, total, 1e-14);
  EXPECT_NEAR(full.conditional, 0.0, 1e-14);
  auto none = conditional_decomposition(f, SiteSubset::empty(), mu);
  EXPECT_NEAR(none.marginal, 0.0, 1e-14);
  EXPECT_NEAR(none.conditional, total, 1e-14);
  for (std::uint64_t bits = 0; bits < 16; ++bits) {
    const auto parts = conditional_decomposition(f, SiteSubset{bits}, mu);
    EXPECT_GE(parts.marginal, 0.0);
    EXPECT_GE(parts.conditional, 0.0);
    EXPECT_NEAR(parts.marginal + parts.conditional, total, 1e-12);
  }
}

TEST(ShannonBridge, Examples) {
  const auto space = ProductSpace::binary(3);
  const auto mu = ProductMeasure::uniform(space);
  for (std::uint64_t bits = 0; bits < 8; ++bits) {
    const SiteSubset a{bits};
    const auto b = shannon_bridge(binary_copies(3), a, mu);
    const double expected = std::max(0, a.size() - 1) * kLog2;
    EXPECT_NEAR(b.shannon_side, expected, 1e-13);
    EXPECT_NEAR(b.entropy_side, expected, 1e-13);
  }
  std::mt19937_64 rng(31);
  const auto mu2 = random_product_measure(space, rng);
  const auto product = density_of(random_product_measure(space, rng).as_distribution(), mu2);
  const auto pb = shannon_bridge(product, SiteSubset::full(3), mu2);
  EXPECT_NEAR(pb.shannon_side, 0.0, 1e-13);
  EXPECT_NEAR(pb.entropy_side, 0.0, 1e-13);
  for (int k = 0; k < 10; ++k) {
    const auto f = density_of(random_distribution(space, rng), mu2);
    for (std::uint64_t bits = 0; bits < 8; ++bits) {
      const auto b = shannon_bridge(f, SiteSubset{bits}, mu2);
      EXPECT_NEAR(b.shannon_side, b.entropy_side, 1e-10);
    }
  }
}

TEST(EntropyInequalities, TensorizationSubadditivityMonotonicity) {
  const ProductSpace space({2, 3, 2, 2});
  std::mt19937_64 rng(17);
  for (int k = 0; k < 20; ++k) {
    const auto mu = random_product_measure(space, rng);
    const auto f = density_of(random_distribution(space, rng, 0.4), mu);
    const double total = ent(f, mu);
    for (std::uint64_t bits = 0; bits < 16; ++bits) {
      const SiteSubset a{bits};
      const SiteSubset ac = a.complement(4);
      const auto pa = conditional_decomposition(f, a, mu);
      const auto pc = conditional_decomposition(f, ac, mu);
      EXPECT_LE(total, pa.conditional + pc.conditional + 1e-12);
      EXPECT_LE(pa.marginal + pc.marginal, total + 1e-12);
      EXPECT_LE(pa.marginal, total + 1e-12);
    }
  }
}

TEST(EntropyInequalities, CrossTermIdentity) {
  // mu[f_A f_{A^c} log f] = -H(q|p) + H(p_A|mu_A) + H(p_{A^c}|mu_{A^c}), q = p_A (x) p_{A^c}.
  const auto space = ProductSpace::binary(4);
  std::mt19937_64 rng(23);
  const auto mu = random_product_measure(space, rng);
  const auto p = random_distribution(space, rng);
  const auto f = density_of(p, mu);
  for (std::uint64_t bits = 0; bits < 16; ++bits) {
    const SiteSubset a{bits};
    const SiteSubset ac = a.complement(4);
    const auto fa = marginal_density(f, a, mu).lift(space);
    const auto fc = marginal_density(f, ac, mu).lift(space);
    double lhs = 0.0;
    for (std::size_t i = 0; i < space.size(); ++i) lhs += mu[i] * fa[i] * fc[i] * std::log(f[i]);
    const auto q = product_of_marginals(p, a);
    const double rhs = -relative_entropy(q, p) + relative_entropy(p.marginal(a), mu.marginal(a)) +
                       relative_entropy(p.marginal(ac), mu.marginal(ac));
    EXPECT_NEAR(lhs, rhs, 1e-12);
  }
}

TEST(EntropyProfile, MatchesPerSubsetEvaluation) {
  const ProductSpace space({2, 3, 2, 3});
  std::mt19937_64 rng(41);
  const auto mu = random_product_measure(space, rng);
  const auto f = density_of(random_distribution(space, rng), mu);
  const auto profile = entropy_profile(f, mu);
  ASSERT_EQ(profile.size(), 16u);
  for (std::uint64_t bits = 0; bits < 16; ++bits) {
    const auto oracle = testing::brute_marginal_density(space, f.vector(), mu.joint(), SiteSubset{bits});
    EXPECT_NEAR(profile[bits], testing::brute_ent(oracle, mu.joint()), 1e-13);
  }
}

}  // namespace
}  // namespace recomb
