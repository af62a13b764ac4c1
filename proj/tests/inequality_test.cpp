#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "recomb/dynamics.hpp"
#include "recomb/entropy.hpp"
#include "recomb/inequality.hpp"
#include "recomb/kernels.hpp"
#include "recomb/random.hpp"
#include "recomb/rational.hpp"
#include "recomb/rqs.hpp"
#include "test_support.hpp"

namespace recomb {
namespace {

const double kLog2 = std::log(2.0);

std::vector<CrossoverLaw> laws(int n) {
  return {CrossoverLaw::single_site(n), CrossoverLaw::one_point(n), CrossoverLaw::uniform(n),
          CrossoverLaw::bernoulli(n, 0.25)};
}

ProductMeasure fair_coins(int n) { return ProductMeasure::uniform(ProductSpace::binary(n)); }

TEST(Rational, Arithmetic) {
  const Rational half(1, 2), third(1, 3);
  EXPECT_EQ(half + third, Rational(5, 6));
  EXPECT_EQ(half - third, Rational(1, 6));
  EXPECT_EQ(half * third, Rational(1, 6));
  EXPECT_EQ(half / third, Rational(3, 2));
  EXPECT_EQ(Rational(4, -8), Rational(-1, 2));
  EXPECT_TRUE(third < half);
  EXPECT_EQ(Rational(7, 3).to_string(), "7/3");
  EXPECT_DOUBLE_EQ(Rational(7, 4).to_double(), 1.75);
  EXPECT_THROW(Rational(1, 0), InvalidArgument);
}

TEST(Rational, OverflowIsAnError) {
  const Rational big(Rational::Int{1} << 100);
  EXPECT_THROW(big * big, Error);
  EXPECT_EQ(binomial(40, 20), Rational::Int{137846528820});
  EXPECT_EQ(binomial(5, 7), 0);
}

TEST(ShearerCoefficients, ThreeSites) {
  const auto sc = shearer_coefficients(3);
  EXPECT_EQ(sc.c_at(1), Rational(0));
  EXPECT_EQ(sc.c_at(2), Rational(3, 2));
  EXPECT_EQ(sc.c_at(3), Rational(1));
  EXPECT_EQ(sc.d_at(1), Rational(1));
  EXPECT_EQ(sc.d_at(2), Rational(1, 2));
  EXPECT_EQ(sc.d_at(3), Rational(0));
  EXPECT_EQ(sc.c_at(1) + sc.c_at(2) + sc.c_at(3), Rational(5, 2));
}

TEST(ShearerCoefficients, ExactIdentitiesUpToForty) {
  for (int n = 2; n <= 40; ++n) {
    const auto sc = shearer_coefficients(n);
    Rational c_sum, d_sum;
    for (int k = 1; k <= n; ++k) {
      c_sum += sc.c_at(k);
      d_sum += sc.d_at(k);
      // d(k, n) = (n-2)! / (k! (n-k-1)!) = C(n-1, k) / (n-1).
      EXPECT_EQ(sc.d_at(k), Rational(binomial(n - 1, k), n - 1)) << n << " " << k;
    }
    const Rational::Int pow2 = Rational::Int{1} << (n - 1);
    EXPECT_EQ(c_sum, Rational((n - 2) * pow2 + 1, n - 1)) << n;
    EXPECT_EQ(d_sum, Rational(pow2 - 1, n - 1)) << n;
    EXPECT_EQ(sc.c_at(1), Rational(0));
    EXPECT_EQ(sc.c_at(n), Rational(1));
    EXPECT_EQ(sc.c_at(n - 1), Rational(n) - Rational(n, n - 1)) << n;
  }
  EXPECT_THROW(shearer_coefficients(41), CapExceeded);
  EXPECT_THROW(shearer_coefficients(1), InvalidArgument);
}

TEST(ShearerCoefficients, WeightedSumsMatchClosedForms) {
  for (int n : {2, 5, 9, 17}) {
    const auto sc = shearer_coefficients(n);
    for (double g : {0.3, 1.0, 2.5}) {
      double cs = 0.0, ds = 0.0;
      for (int k = 1; k <= n; ++k) {
        cs += std::pow(g, k) * sc.c_at(k).to_double();
        ds += std::pow(g, k) * sc.d_at(k).to_double();
      }
      const double grow = std::pow(1.0 + g, n - 1);
      EXPECT_NEAR(cs, (grow * (g * (n - 1) - 1.0) + 1.0) / (n - 1), 1e-10 * grow * n);
      EXPECT_NEAR(ds, (grow - 1.0) / (n - 1), 1e-10 * grow);
    }
  }
}

TEST(ShearerCoefficients, BernoulliFactor) {
  for (int n = 2; n <= 12; ++n) {
    for (double q : {0.1, 0.25, 0.5}) {
      const double expected = 1.0 - (1.0 - std::pow(q, n) - std::pow(1.0 - q, n)) / (n - 1);
      EXPECT_NEAR(bernoulli_weighted_factor(q, n), expected, 1e-12) << n << " " << q;
      EXPECT_NEAR(1.0 - expected, kappa_theoretical(CrossoverLaw::bernoulli(n, q)), 1e-12);
    }
  }
  EXPECT_THROW(bernoulli_weighted_factor(0.0, 4), InvalidArgument);
}

TEST(ShearerBound, ComplementPairIsSubadditivity) {
  const auto mu = fair_coins(4);
  std::mt19937_64 rng(3);
  const auto f = random_balanced_density(mu, rng);
  const SiteSubset a = SiteSubset::of({0, 2});
  const auto sb = shearer_bound(f, {a, a.complement(4)}, mu);
  EXPECT_EQ(sb.max_degree, 1);
  EXPECT_EQ(sb.min_degree, 1);
  EXPECT_GE(sb.slack, -1e-12);
}

TEST(ShearerBound, KSetCoverOnIdenticalCopies) {
  const int n = 5;
  const auto mu = fair_coins(n);
  const auto f = identical_copies_density(n, {0.5, 0.5});
  for (int k = 1; k <= n; ++k) {
    const auto sb = shearer_bound(f, k_set_cover(n, k), mu);
    const double choose_nk = static_cast<double>(binomial(n, k));
    const double choose_deg = static_cast<double>(binomial(n - 1, k - 1));
    EXPECT_EQ(sb.max_degree, static_cast<int>(choose_deg));
    EXPECT_NEAR(sb.lhs, choose_nk * (k - 1) * kLog2, 1e-12);
    EXPECT_NEAR(sb.rhs, choose_deg * (n - 1) * kLog2, 1e-12);
  }
}

TEST(ShearerBound, RandomCoversHold) {
  const ProductSpace space({2, 3, 2, 2});
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::uint64_t> pick(1, 15);
  for (int trial = 0; trial < 30; ++trial) {
    const auto mu = random_product_measure(space, rng);
    const auto f = random_balanced_density(mu, rng);
    std::vector<SiteSubset> cover;
    for (int j = 0; j < 5; ++j) cover.emplace_back(pick(rng));
    EXPECT_GE(shearer_bound(f, cover, mu).slack, -1e-10);
  }
}

TEST(Submodularity, ProductDensityIsModular) {
  const auto mu = fair_coins(4);
  const Density one(std::vector<double>(16, 1.0));
  const auto rep = check_submodular(one, mu);
  EXPECT_TRUE(rep.holds);
  EXPECT_NEAR(rep.worst_slack, 0.0, 1e-14);
  EXPECT_EQ(rep.pairs_checked, 16u * 15u / 2u);
}

TEST(Submodularity, IdenticalCopiesTightOnOverlaps) {
  const int n = 4;
  const auto mu = fair_coins(n);
  const auto f = identical_copies_density(n, {0.5, 0.5});
  const auto h = [&](std::uint64_t bits) { return -marginal_entropy(f, SiteSubset{bits}, mu); };
  for (std::uint64_t a = 0; a < 16; ++a) {
    for (std::uint64_t b = 0; b < 16; ++b) {
      const double slack = h(a) + h(b) - h(a & b) - h(a | b);
      if ((a & b) != 0) {
        EXPECT_NEAR(slack, 0.0, 1e-12);
      } else {
        EXPECT_GE(slack, -1e-12);
      }
    }
  }
  EXPECT_TRUE(check_submodular(f, mu).holds);
}

TEST(Submodularity, RandomDensities) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto mu = random_product_measure(ProductSpace({2, 3, 2, 2}), rng);
    const auto f = random_balanced_density(mu, rng);
    const auto rep = check_submodular(f, mu);
    EXPECT_TRUE(rep.holds) << rep.worst_slack;
  }
}

TEST(Submodularity, SampledAboveSixSites) {
  const auto mu = fair_coins(7);
  std::mt19937_64 rng(8);
  const auto f = random_balanced_density(mu, rng);
  const auto rep = check_submodular(f, mu, 1e-10, 200, 1);
  EXPECT_EQ(rep.pairs_checked, 200u);
  EXPECT_TRUE(rep.holds);
}

TEST(ImprovedShearer, IdenticalCopiesSaturate) {
  for (int n = 2; n <= 6; ++n) {
    const auto mu = fair_coins(n);
    const auto f = identical_copies_density(n, {0.5, 0.5});
    EXPECT_NEAR(improved_shearer_check(f, mu).slack, 0.0, 1e-10) << n;
    for (double g : {0.2, 1.0, 3.0}) {
      EXPECT_NEAR(weighted_shearer_check(f, g, mu).slack, 0.0, 1e-10) << n << " " << g;
    }
  }
}

TEST(ImprovedShearer, ProductDensityBothSidesZero) {
  const auto mu = fair_coins(4);
  const Density one(std::vector<double>(16, 1.0));
  const auto s = improved_shearer_check(one, mu);
  EXPECT_NEAR(s.lhs, 0.0, 1e-15);
  EXPECT_NEAR(s.rhs, 0.0, 1e-15);
}

TEST(ImprovedShearer, RandomDensitiesAndUnitWeight) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 40; ++trial) {
    const auto mu = random_product_measure(ProductSpace({3, 2, 2, 2}), rng);
    const auto f = random_balanced_density(mu, rng);
    const auto plain = improved_shearer_check(f, mu);
    const auto unit = weighted_shearer_check(f, 1.0, mu);
    EXPECT_GE(plain.slack, -1e-10);
    EXPECT_EQ(plain.lhs, unit.lhs);
    EXPECT_EQ(plain.rhs, unit.rhs);
    EXPECT_EQ(plain.slack, unit.slack);
    EXPECT_GE(weighted_shearer_check(f, 0.4, mu).slack, -1e-10);
    EXPECT_GE(weighted_shearer_check(f, 2.2, mu).slack, -1e-10);
  }
  const auto mu = fair_coins(3);
  EXPECT_THROW(weighted_shearer_check(Density(std::vector<double>(8, 1.0)), 0.0, mu), InvalidArgument);
  EXPECT_THROW(improved_shearer_check(Density(std::vector<double>(128, 1.0)), fair_coins(7)), InvalidArgument);
}

TEST(ImprovedShearer, BeatsNaiveShearer) {
  EXPECT_DOUBLE_EQ(naive_shearer_kappa_uniform(2), kappa_theoretical(CrossoverLaw::uniform(2)));
  for (int n = 3; n <= 30; ++n) {
    EXPECT_NEAR(naive_shearer_kappa_uniform(n), std::ldexp(1.0, 1 - n), 1e-15);
    EXPECT_LT(naive_shearer_kappa_uniform(n), kappa_theoretical(CrossoverLaw::uniform(n))) << n;
  }
}

TEST(Kappa, ClosedForms) {
  EXPECT_DOUBLE_EQ(kappa_theoretical(CrossoverLaw::single_site(2)), 1.0);
  EXPECT_DOUBLE_EQ(kappa_theoretical(CrossoverLaw::uniform(3)), 3.0 / 8.0);
  EXPECT_DOUBLE_EQ(kappa_theoretical(CrossoverLaw::one_point(5)), 1.0 / 6.0);
  for (int n = 2; n <= 10; ++n) {
    EXPECT_DOUBLE_EQ(kappa_theoretical(CrossoverLaw::bernoulli(n, 0.5)),
                     kappa_theoretical(CrossoverLaw::uniform(n)));
  }
  EXPECT_THROW(kappa_theoretical(CrossoverLaw::explicit_law(3, {{SiteSubset::of({0}), 1.0}})), InvalidArgument);
  EXPECT_THROW(kappa_theoretical(CrossoverLaw::uniform(1)), InvalidArgument);
}

TEST(IdenticalCopies, SmallCases) {
  const auto one = identical_copies_density(1, {0.3, 0.7});
  EXPECT_EQ(one.vector(), (std::vector<double>{1.0, 1.0}));
  const auto f = identical_copies_density(3, {0.5, 0.5});
  EXPECT_EQ(f.vector(), (std::vector<double>{4, 0, 0, 0, 0, 0, 0, 4}));
  EXPECT_NEAR(ent(f, fair_coins(3)), 2.0 * kLog2, 1e-14);
  EXPECT_THROW(identical_copies_density(3, {1.0, 0.0}), InvalidArgument);
}

TEST(IdenticalCopies, ProfileMatchesEntropyOfBase) {
  const std::vector<double> mu0{0.2, 0.5, 0.3};
  const int n = 4;
  const auto space = ProductSpace::uniform_alphabet(n, 3);
  const ProductMeasure mu(space, std::vector<std::vector<double>>(n, mu0));
  const auto f = identical_copies_density(n, mu0);
  const double h0 = shannon_entropy(mu0);
  const auto profile = entropy_profile(f, mu);
  for (std::uint64_t a = 0; a < 16; ++a) {
    EXPECT_NEAR(profile[a], std::max(std::popcount(a) - 1, 0) * h0, 1e-12);
  }
}

TEST(KappaScan, IdenticalCopiesWitnessRatios) {
  for (int n = 3; n <= 6; ++n) {
    const auto mu = fair_coins(n);
    const auto f = identical_copies_density(n, {0.5, 0.5});
    EXPECT_NEAR(subadditivity_ratio(f, CrossoverLaw::single_site(n), mu), (n - 2.0) / (n - 1.0), 1e-12);
    EXPECT_NEAR(subadditivity_ratio(f, CrossoverLaw::one_point(n), mu), n / (n + 1.0), 1e-12);
    for (const auto& nu : laws(n)) {
      EXPECT_NEAR(subadditivity_ratio(f, nu, mu), 1.0 - kappa_theoretical(nu), 1e-12) << nu.name() << n;
    }
  }
}

TEST(KappaScan, RandomDensitiesStayBelowBound) {
  const auto mu = fair_coins(4);
  for (const auto& nu : laws(4)) {
    const auto scan = kappa_scan(nu, mu, 200, 17);
    ASSERT_EQ(scan.ratios.size(), 200u);
    for (double r : scan.ratios) EXPECT_LE(r, scan.bound + 1e-9) << nu.name();
    EXPECT_TRUE(scan.witness_is_identical_copies) << nu.name();
    EXPECT_NEAR(scan.max_ratio, scan.bound, 1e-12);
  }
}

TEST(KappaScan, DeterministicAcrossThreadCounts) {
  const auto mu = fair_coins(4);
  const auto nu = CrossoverLaw::uniform(4);
  const int saved = kernels::thread_count();
  kernels::set_thread_count(1);
  const auto a = kappa_scan(nu, mu, 64, 3);
  kernels::set_thread_count(4);
  const auto b = kappa_scan(nu, mu, 64, 3);
  kernels::set_thread_count(saved);
  EXPECT_EQ(a.ratios, b.ratios);
}

TEST(SharpTest, DensityStructure) {
  const int n = 6;
  const auto f = sharp_test_density(n);
  const auto mu = sharp_test_measure(n);
  EXPECT_TRUE(f.strictly_positive());
  for (int i = 0; i < n; ++i) {
    const auto fi = marginal_density(f, SiteSubset::of({i}), mu).values;
    EXPECT_NEAR(fi[0], 1.0, 1e-12);
    EXPECT_NEAR(fi[1], 1.0, 1e-12);
  }
  const auto r = sharp_test_closed_form(n, CrossoverLaw::uniform(n));
  EXPECT_NEAR(r.a + r.b + (std::ldexp(1.0, n) - 2.0) * r.c, 1.0, 1e-15);
  EXPECT_NEAR(mass(f, mu), 1.0, 1e-13);
}

TEST(SharpTest, ClosedFormMatchesExhaustiveAtEight) {
  const int n = 8;
  const auto f = sharp_test_density(n);
  const auto mu = sharp_test_measure(n);
  const double ent_exhaustive = testing::brute_ent(f.vector(), mu.joint());
  for (const auto& nu : laws(n)) {
    const auto r = sharp_test_closed_form(n, nu);
    EXPECT_NEAR(r.ent, ent_exhaustive, 1e-12);
    const auto g = make_recombination_generator(nu, mu.space());
    const double d_pairs = entropy_production(f.values(), f.values(), g, mu.joint());
    EXPECT_NEAR(r.production / d_pairs, 1.0, 1e-9) << nu.name();
    EXPECT_NEAR(recombination_entropy_production(f, nu, mu) / d_pairs, 1.0, 1e-9) << nu.name();
  }
}

TEST(SharpTest, MixtureCoefficientAsymptotics) {
  for (int n = 10; n <= 40; ++n) {
    for (const auto& nu : laws(n)) {
      const auto r = sharp_test_closed_form(n, nu);
      EXPECT_LE(std::abs(r.alpha_0 - (1.0 - 4.0 * r.w + 2.0 * r.w * r.delta_nu)), 100.0 * r.w * r.w);
      EXPECT_LE(r.alpha_n, 100.0 * r.w * r.w);
      EXPECT_LE(std::abs(r.beta - (-2.0 * r.w + 2.0 * r.w * r.delta_nu)), 100.0 * r.w * r.w);
      EXPECT_GE(r.ratio, r.kappa) << nu.name() << n;
    }
  }
  EXPECT_THROW(sharp_test_closed_form(41, CrossoverLaw::single_site(41)), InvalidArgument);
}

TEST(SharpTest, DeltaMatchesModelFormulas) {
  const int n = 12;
  const double q = 0.25;
  const double expected = std::pow(1.0 - q / 2.0, n) + std::pow((1.0 + q) / 2.0, n);
  EXPECT_NEAR(CrossoverLaw::bernoulli(n, q).delta(), expected, 1e-15);
  EXPECT_NEAR(CrossoverLaw::single_site(n).delta(), 0.5 + std::ldexp(1.0, 1 - n), 1e-15);
}

TEST(DiscreteDecay, EquilibriumIsFixed) {
  const auto pi = ProductMeasure(ProductSpace({2, 3}), {{0.3, 0.7}, {0.2, 0.3, 0.5}}).as_distribution();
  const auto d = discrete_decay_check(pi, CrossoverLaw::uniform(2));
  EXPECT_NEAR(d.before, 0.0, 1e-15);
  EXPECT_NEAR(d.after, 0.0, 1e-15);
  EXPECT_TRUE(d.holds(1e-14));
}

TEST(DiscreteDecay, IdenticalCopiesUniformThree) {
  const auto space = ProductSpace::binary(3);
  const Distribution p(space, {0.5, 0, 0, 0, 0, 0, 0, 0.5});
  const auto d = discrete_decay_check(p, CrossoverLaw::uniform(3));
  const double expected = (0.625 * std::log(2.5) - 0.375 * kLog2) / (2.0 * kLog2);
  EXPECT_NEAR(d.factor, expected, 1e-14);
  EXPECT_LE(d.factor, 5.0 / 8.0);
  EXPECT_TRUE(d.holds(1e-14));
}

TEST(DiscreteDecay, SharpTestSandwich) {
  const int n = 8;
  const auto mu = sharp_test_measure(n);
  const auto p = distribution_of(sharp_test_density(n), mu);
  for (const auto& nu : laws(n)) {
    const auto d = discrete_decay_check(p, nu);
    const double gamma = sharp_test_closed_form(n, nu).ratio;
    EXPECT_GE(d.after, (1.0 - gamma) * d.before * (1.0 - 1e-9)) << nu.name();
    EXPECT_LE(d.after, d.upper) << nu.name();
    EXPECT_TRUE(d.holds(1e-12));
  }
}

TEST(AdmissibleDirection, OrthogonalAndNormalized) {
  const auto space = ProductSpace::binary(3);
  std::mt19937_64 rng(2);
  const auto mu = random_product_measure(space, rng);
  const auto basis = ConservedBasis::single_site(space, mu.joint());
  const auto phi = admissible_direction(basis, mu.joint(), rng);
  double norm = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) norm += mu[i] * phi[i] * phi[i];
  EXPECT_NEAR(norm, 1.0, 1e-12);
  for (const auto& v : basis.vectors()) {
    double dot = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) dot += mu[i] * phi[i] * v[i];
    EXPECT_NEAR(dot, 0.0, 1e-12);
  }
}

}  // namespace
}  // namespace recomb
