#pragma once

// Entropy inequalities behind the recombination decay constants: Shearer-type
// bounds and their submodular refinements, the generalized subadditivity
// constant kappa, and the explicit witnesses that make the bounds tight.
//
// Throughout, h(A) = -Ent(f_A) and f is a density against a product measure.

#include <cstdint>
#include <random>
#include <vector>

#include "recomb/crossover.hpp"
#include "recomb/product_space.hpp"
#include "recomb/rational.hpp"
#include "recomb/rqs.hpp"

namespace recomb {

inline constexpr int kExhaustiveSubsetSites = 6;
inline constexpr int kMaxShearerSites = 40;

struct SubmodularityReport {
  bool holds = true;
  /// Smallest h(A) + h(B) - h(A & B) - h(A | B) seen.
  double worst_slack = 0.0;
  SiteSubset a, b;
  std::size_t pairs_checked = 0;
};

/// Checks h(A) + h(B) >= h(A & B) + h(A | B) within `tolerance`. All pairs for
/// n <= 6, otherwise `sampled_pairs` random pairs drawn from `seed`.
SubmodularityReport check_submodular(const Density& f, const ProductMeasure& mu, double tolerance = 1e-10,
                                     std::size_t sampled_pairs = 4096, std::uint64_t seed = 0);

struct ShearerBound {
  double lhs = 0.0;  // sum over the cover of Ent(f_A)
  double rhs = 0.0;  // max_degree * Ent(f)
  double slack = 0.0;
  int max_degree = 0;
  int min_degree = 0;
};

/// sum_{A in cover} Ent(f_A) <= n_+ Ent(f), where n_+ and n_- are the largest
/// and smallest number of cover members containing a site.
ShearerBound shearer_bound(const Density& f, const std::vector<SiteSubset>& cover, const ProductMeasure& mu);

/// All subsets of size k.
std::vector<SiteSubset> k_set_cover(int n, int k);

/// Coefficients with phi_k >= c(k,n) phi_n + d(k,n) phi_1, where phi_k is the
/// sum of h over subsets of size k.
struct ShearerCoefficients {
  int n = 0;
  std::vector<Rational> c;  // c[k - 1] = c(k, n)
  std::vector<Rational> d;  // d[k - 1] = d(k, n)
  Rational c_at(int k) const { return c.at(k - 1); }
  Rational d_at(int k) const { return d.at(k - 1); }
};

/// Exact coefficients for 2 <= n <= 40.
ShearerCoefficients shearer_coefficients(int n);

struct ShearerSlack {
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // lhs - rhs, nonnegative when the bound holds
};

/// sum_A h(A) >= ((n-2)2^(n-1)+1)/(n-1) h([n]) + (2^(n-1)-1)/(n-1) sum_i h({i}). n <= 6.
ShearerSlack improved_shearer_check(const Density& f, const ProductMeasure& mu);

/// The gamma^|A| weighted version; gamma = 1 gives improved_shearer_check bit for bit.
ShearerSlack weighted_shearer_check(const Density& f, double gamma, const ProductMeasure& mu);

/// Same two checks on a precomputed profile[A.bits()] = Ent(f_A).
ShearerSlack improved_shearer_from_profile(const std::vector<double>& profile, int n);
ShearerSlack weighted_shearer_from_profile(const std::vector<double>& profile, int n, double gamma);

/// Bound on sum_A nu(A)[Ent f_A + Ent f_A^c] / Ent f for Bernoulli(q) crossover,
/// assembled from the two weighted sums of c(k, n) with gamma = q/(1-q) and its
/// reciprocal. q in (0, 1/2].
double bernoulli_weighted_factor(double q, int n);

/// Contraction obtained from the plain Shearer bound on the k-set covers for
/// uniform crossover: 1 - 2^(1-n) sum_{k>=2} n_+(A_k).
double naive_shearer_kappa_uniform(int n);

/// Closed-form kappa(nu) for the four named models, n >= 2.
double kappa_theoretical(const CrossoverLaw& nu);

/// sum_A nu(A)[Ent f_A + Ent f_A^c] from an entropy profile.
double subadditivity_lhs(const std::vector<double>& profile, const CrossoverLaw& nu);

/// sum_A nu(A)[Ent f_A + Ent f_A^c] / Ent(f). Requires Ent(f) > 0.
double subadditivity_ratio(const Density& f, const CrossoverLaw& nu, const ProductMeasure& mu);

/// Density of n identical copies of Z0 ~ mu0 against mu0^n.
Density identical_copies_density(int n, const std::vector<double>& mu0);

struct KappaScan {
  double max_ratio = 0.0;
  double bound = 0.0;  // 1 - kappa(nu), or NaN for explicit laws
  Density witness;
  bool witness_is_identical_copies = false;
  /// Ratio of the identical-copies density, NaN when mu is not i.i.d.
  double identical_copies_ratio = 0.0;
  std::vector<double> ratios;  // one per random sample, in sample order
};

/// Max of the subadditivity ratio over `samples` random elements of S_mu plus
/// the identical-copies witness. Samples run in parallel with per-index seeds.
KappaScan kappa_scan(const CrossoverLaw& nu, const ProductMeasure& mu, int samples, std::uint64_t seed);

/// f = p / mu for p = w^2 B(1) + (1-w)^2 B(0) + 2w(1-w) B(1/2), mu = B(w)^n, w = 2^-n.
Density sharp_test_density(int n);
ProductMeasure sharp_test_measure(int n);

struct SharpTestReport {
  int n = 0;
  std::string model;
  double q = 0.0;
  double w = 0.0;
  double ent = 0.0;
  double production = 0.0;  // D(f, f)
  double ratio = 0.0;
  double delta_nu = 0.0;
  double asymptote = 0.0;  // 4(1 - delta_nu)/n
  double kappa = 0.0;
  double a = 0.0, b = 0.0, c = 0.0;
  double alpha_0 = 0.0, alpha_n = 0.0;
  double one_minus_alpha_0 = 0.0;
  double beta = 0.0, gamma = 0.0;
};

/// Ent(f) and D(f, f) of the sharp-test density from closed-form sums, without
/// touching the 2^n configurations. 2 <= n <= 40, named models only.
SharpTestReport sharp_test_closed_form(int n, const CrossoverLaw& nu);

struct DecayCheck {
  double before = 0.0;  // H(p | pi)
  double after = 0.0;   // H(Psi[p] | pi)
  double upper = 0.0;   // (1 - kappa) H(p | pi)
  double lower = 0.0;   // H(p | pi) - D(f, f), from the variational principle
  double factor = 0.0;  // after / before, 0 when before = 0
  bool holds(double slack) const { return after <= upper + slack && after >= lower - slack; }
};

/// One discrete step against pi = (x) p_i. The lower bound needs p > 0 and is
/// set to -infinity otherwise.
DecayCheck discrete_decay_check(const Distribution& p, const CrossoverLaw& nu);

/// Random phi with mu[phi] = 0, orthogonal to the basis, and mu[phi^2] = 1.
std::vector<double> admissible_direction(const ConservedBasis& basis, std::span<const double> mu,
                                         std::mt19937_64& rng);

}  // namespace recomb
