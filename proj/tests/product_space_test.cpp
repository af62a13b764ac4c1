#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "recomb/product_space.hpp"
#include "recomb/random.hpp"
#include "test_support.hpp"

namespace recomb {
namespace {

using testing::brute_marginal;
using testing::brute_marginal_density;
using testing::digits_of;

TEST(ProductSpace, EncodeDecodeRoundTrip) {
  for (const auto& radix : {std::vector<int>{2, 3, 4}, std::vector<int>(10, 2), std::vector<int>{5, 1, 3}}) {
    const ProductSpace space(radix);
    for (std::size_t idx = 0; idx < space.size(); ++idx) {
      const auto c = space.decode(idx);
      EXPECT_EQ(c.values, digits_of(space, idx));
      EXPECT_EQ(space.encode(c), idx);
    }
  }
}

TEST(ProductSpace, RejectsBadInput) {
  EXPECT_THROW(ProductSpace(std::vector<int>{}), InvalidArgument);
  EXPECT_THROW(ProductSpace(std::vector<int>{2, 0}), InvalidArgument);
  EXPECT_THROW(ProductSpace::binary(21), CapExceeded);
  EXPECT_NO_THROW(ProductSpace::binary(21, std::size_t{1} << 21));
  const auto space = ProductSpace::binary(3);
  EXPECT_THROW(space.encode(Configuration{{0, 2, 0}}), InvalidArgument);
  EXPECT_THROW(space.decode(8), InvalidArgument);
}

TEST(SiteSubset, ComplementIsInvolutive) {
  for (std::uint64_t bits = 0; bits < 32; ++bits) {
    const SiteSubset a{bits};
    EXPECT_EQ(a.complement(5).complement(5), a);
    EXPECT_EQ((a & a.complement(5)).bits(), 0u);
    EXPECT_EQ((a | a.complement(5)), SiteSubset::full(5));
  }
  EXPECT_EQ(SiteSubset::of({0, 2}).sites(), (std::vector<int>{0, 2}));
}

TEST(Recombine, ForcedExamples) {
  const auto space = ProductSpace::binary(2);
  const Configuration s{{0, 0}}, e{{1, 1}};
  auto [t, t2] = recombine(space, s, e, SiteSubset::empty());
  EXPECT_EQ(t, s);
  EXPECT_EQ(t2, e);
  std::tie(t, t2) = recombine(space, s, e, SiteSubset::full(2));
  EXPECT_EQ(t, e);
  EXPECT_EQ(t2, s);
  // Site "1" of the one-based description is site 0 here.
  std::tie(t, t2) = recombine(space, s, e, SiteSubset::of({0}));
  EXPECT_EQ(t.values, (std::vector<int>{1, 0}));
  EXPECT_EQ(t2.values, (std::vector<int>{0, 1}));
}

TEST(Recombine, InvolutiveAndPreservesSymbols) {
  const ProductSpace space({2, 3, 2});
  EXPECT_THROW(recombine(space, Configuration{{0, 0}}, Configuration{{0, 0, 0}}, SiteSubset{}), InvalidArgument);
  for (std::size_t s = 0; s < space.size(); ++s) {
    for (std::size_t e = 0; e < space.size(); ++e) {
      for (std::uint64_t bits = 0; bits < 8; ++bits) {
        const SiteSubset a{bits};
        const auto [t, t2] = recombine(space, space.decode(s), space.decode(e), a);
        const auto [u, u2] = recombine(space, t, t2, a);
        EXPECT_EQ(space.encode(u), s);
        EXPECT_EQ(space.encode(u2), e);
        for (int i = 0; i < 3; ++i) {
          std::vector<int> before{space.digit(s, i), space.digit(e, i)};
          std::vector<int> after{t.values[i], t2.values[i]};
          std::sort(before.begin(), before.end());
          std::sort(after.begin(), after.end());
          EXPECT_EQ(before, after);
        }
      }
    }
  }
}

TEST(Distribution, Invariants) {
  const auto space = ProductSpace::binary(2);
  EXPECT_THROW(Distribution(space, {0.5, 0.5, 0.1, -0.1}), InvalidArgument);
  EXPECT_THROW(Distribution(space, {0.5, 0.5, 0.1, 0.0}), InvalidArgument);
  EXPECT_THROW(Distribution(space, {1.0}), InvalidArgument);
  EXPECT_TRUE(Distribution::uniform(space).full_support());
  EXPECT_FALSE(Distribution::point_mass(space, 2).full_support());
}

TEST(MarginalDensity, EmptySubsetIsMass) {
  const auto space = ProductSpace::binary(3);
  std::mt19937_64 rng(3);
  const auto mu = random_product_measure(space, rng);
  const auto f = density_of(random_distribution(space, rng), mu);
  const auto m = marginal_density(f, SiteSubset::empty(), mu);
  ASSERT_EQ(m.values.size(), 1u);
  EXPECT_NEAR(m.values[0], 1.0, 1e-14);
}

TEST(MarginalDensity, ProductFactorization) {
  const ProductSpace space({2, 3, 2});
  const ProductMeasure mu(space, {{0.3, 0.7}, {0.2, 0.5, 0.3}, {0.6, 0.4}});
  // Site factors with mu_i[f_i] = 1.
  const std::vector<std::vector<double>> fi{{2.0, (1.0 - 0.6) / 0.7}, {1.5, 0.8, 1.0}, {0.5, 0.7 / 0.4}};
  std::vector<double> f(space.size());
  for (std::size_t idx = 0; idx < space.size(); ++idx) {
    f[idx] = fi[0][space.digit(idx, 0)] * fi[1][space.digit(idx, 1)] * fi[2][space.digit(idx, 2)];
  }
  const Density fd(f);
  const SiteSubset a = SiteSubset::of({0, 2});
  const auto fa = marginal_density(fd, a, mu).lift(space);
  for (std::size_t idx = 0; idx < space.size(); ++idx) {
    EXPECT_NEAR(fa[idx], fi[0][space.digit(idx, 0)] * fi[2][space.digit(idx, 2)], 1e-13);
  }
}

TEST(MarginalDensity, MatchesBruteForceAndIsConsistent) {
  const ProductSpace space({2, 3, 2, 2});
  std::mt19937_64 rng(11);
  const auto mu = random_product_measure(space, rng);
  const auto f = density_of(random_distribution(space, rng), mu);
  for (std::uint64_t bits = 0; bits < 16; ++bits) {
    const SiteSubset a{bits};
    const auto fa = marginal_density(f, a, mu).lift(space);
    const auto oracle = brute_marginal_density(space, f.vector(), mu.joint(), a);
    for (std::size_t idx = 0; idx < space.size(); ++idx) EXPECT_NEAR(fa[idx], oracle[idx], 1e-13);
    // (f_A)_B = f_B for B inside A.
    for (std::uint64_t sub = bits;; sub = (sub - 1) & bits) {
      const SiteSubset b{sub};
      const auto fab = marginal_density(Density(fa), b, mu).values;
      const auto fb = marginal_density(f, b, mu).values;
      for (std::size_t k = 0; k < fb.size(); ++k) EXPECT_NEAR(fab[k], fb[k], 1e-13);
      if (sub == 0) break;
    }
  }
}

TEST(ProductOfMarginals, Examples) {
  const auto space = ProductSpace::binary(2);
  const Distribution p(space, {0.5, 0.0, 0.0, 0.5});
  const auto q = product_of_marginals(p, SiteSubset::of({0}));
  for (double x : q.weights()) EXPECT_NEAR(x, 0.25, 1e-15);

  const ProductMeasure prod(space, {{0.2, 0.8}, {0.6, 0.4}});
  const auto r = product_of_marginals(prod.as_distribution(), SiteSubset::of({1}));
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(r[i], prod[i], 1e-15);
}

TEST(ProductOfMarginals, PreservesSiteMarginalsAndIsIdempotent) {
  const ProductSpace space({2, 3, 2});
  std::mt19937_64 rng(5);
  const auto p = random_distribution(space, rng);
  for (std::uint64_t bits = 0; bits < 8; ++bits) {
    const SiteSubset a{bits};
    const auto q = product_of_marginals(p, a);
    for (int i = 0; i < 3; ++i) {
      const SiteSubset si = SiteSubset::of({i});
      const auto mp = brute_marginal(space, p.vector(), si);
      const auto mq = brute_marginal(space, q.vector(), si);
      for (const auto& [k, v] : mp) EXPECT_NEAR(mq.at(k), v, 1e-14);
    }
    const auto qq = product_of_marginals(q, a);
    for (std::size_t i = 0; i < q.size(); ++i) EXPECT_NEAR(qq[i], q[i], 1e-15);
  }
}

TEST(Ipf, DerivedExample) {
  const auto space = ProductSpace::binary(2);
  const auto mu = ProductMeasure::uniform(space);
  const auto f = ipf_project(Density({4.0, 1.0, 1.0, 4.0}), mu, mu.sites());
  const std::vector<double> expected{1.6, 0.4, 0.4, 1.6};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(f[i], expected[i], 1e-12);
}

TEST(Ipf, FixedPointAndRandomTargets) {
  const auto space = ProductSpace::binary(4);
  std::mt19937_64 rng(21);
  const auto mu = random_product_measure(space, rng);
  const auto f = random_balanced_density(mu, rng);
  for (int i = 0; i < 4; ++i) {
    const auto fi = marginal_density(f, SiteSubset::of({i}), mu).values;
    for (double x : fi) EXPECT_NEAR(x, 1.0, 1e-9);
  }
  const auto again = ipf_project(f, mu, mu.sites());
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_NEAR(again[i], f[i], 1e-12 * std::max(1.0, f[i]));
}

TEST(Ipf, ReportsNonConvergence) {
  const auto space = ProductSpace::binary(3);
  std::mt19937_64 rng(2);
  const auto mu = ProductMeasure::uniform(space);
  auto g = sample_dirichlet(space.size(), 0.3, rng);
  try {
    ipf_project(Density(g), mu, {{0.1, 0.9}, {0.5, 0.5}, {0.3, 0.7}}, IpfOptions{1e-15, 1});
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_GT(e.final_deviation(), 0.0);
  }
  EXPECT_THROW(ipf_project(Density({0.0, 1, 1, 1, 1, 1, 1, 1}), mu, mu.sites()), InvalidArgument);
}

}  // namespace
}  // namespace recomb
