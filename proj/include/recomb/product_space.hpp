#pragma once

// Finite product spaces X_1 x ... x X_n, dense distributions on them, product
// reference measures, densities and subset marginals.
//
// Configurations are stored as mixed-radix integers: site i is the i-th digit
// (site 0 least significant) with radix a_i. Sites are 0-based throughout.

#include <bit>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

#include "recomb/errors.hpp"

namespace recomb {

inline constexpr std::size_t kDefaultSizeCap = std::size_t{1} << 20;
inline constexpr int kMaxSites = 63;
inline constexpr double kProbabilityTolerance = 1e-12;
inline constexpr double kDensityTolerance = 1e-10;

/// A subset A of the sites [n], stored as a bitmask (bit i <=> site i).
class SiteSubset {
 public:
  constexpr SiteSubset() = default;
  constexpr explicit SiteSubset(std::uint64_t bits) : bits_(bits) {}

  static SiteSubset of(std::initializer_list<int> sites);
  static constexpr SiteSubset empty() { return SiteSubset{}; }
  static SiteSubset full(int n);

  constexpr std::uint64_t bits() const { return bits_; }
  constexpr bool contains(int site) const { return (bits_ >> site) & 1u; }
  constexpr int size() const { return std::popcount(bits_); }
  constexpr bool is_empty() const { return bits_ == 0; }
  constexpr bool is_subset_of(SiteSubset other) const { return (bits_ & ~other.bits_) == 0; }

  SiteSubset complement(int n) const;
  std::vector<int> sites() const;

  constexpr SiteSubset operator&(SiteSubset o) const { return SiteSubset{bits_ & o.bits_}; }
  constexpr SiteSubset operator|(SiteSubset o) const { return SiteSubset{bits_ | o.bits_}; }
  constexpr bool operator==(const SiteSubset&) const = default;

 private:
  std::uint64_t bits_ = 0;
};

/// A configuration sigma = (sigma_0, ..., sigma_{n-1}) with sigma_i in [0, a_i).
struct Configuration {
  std::vector<int> values;
  bool operator==(const Configuration&) const = default;
};

class ProductSpace {
 public:
  explicit ProductSpace(std::vector<int> alphabet_sizes, std::size_t size_cap = kDefaultSizeCap);

  static ProductSpace binary(int n, std::size_t size_cap = kDefaultSizeCap);
  static ProductSpace uniform_alphabet(int n, int a, std::size_t size_cap = kDefaultSizeCap);

  int sites() const { return static_cast<int>(radix_.size()); }
  int alphabet(int site) const { return radix_[site]; }
  const std::vector<int>& alphabet_sizes() const { return radix_; }
  std::size_t size() const { return size_; }
  std::size_t stride(int site) const { return stride_[site]; }

  int digit(std::size_t index, int site) const {
    return static_cast<int>((index / stride_[site]) % static_cast<std::size_t>(radix_[site]));
  }

  std::size_t encode(const Configuration& c) const;
  Configuration decode(std::size_t index) const;

  /// Number of configurations of the sub-space X_A.
  std::size_t subset_size(SiteSubset a) const;

  /// Full-space index contribution of the A-digits of `index` (other digits zeroed).
  std::size_t extract(std::size_t index, SiteSubset a) const;

  /// Index of sigma_A inside X_A (A's sites in increasing order, mixed radix).
  std::size_t project(std::size_t index, SiteSubset a) const;

  /// embedding(A)[k] is the full index whose A-digits encode k in X_A and whose
  /// other digits are zero. Full index = embedding(A)[i_A] + embedding(A^c)[i_Ac].
  std::vector<std::size_t> embedding(SiteSubset a) const;

  /// The product space X_A over A's sites (in increasing order).
  ProductSpace subspace(SiteSubset a) const;

  SiteSubset all_sites() const { return SiteSubset::full(sites()); }

  bool operator==(const ProductSpace& o) const { return radix_ == o.radix_; }

 private:
  std::vector<int> radix_;
  std::vector<std::size_t> stride_;
  std::size_t size_ = 1;
};

/// Returns (eta_A sigma_{A^c}, sigma_A eta_{A^c}).
std::pair<Configuration, Configuration> recombine(const ProductSpace& space,
                                                  const Configuration& sigma,
                                                  const Configuration& eta, SiteSubset a);

/// Index form of recombine.
inline std::pair<std::size_t, std::size_t> recombine_index(const ProductSpace& space,
                                                           std::size_t sigma, std::size_t eta,
                                                           SiteSubset a) {
  const std::size_t sa = space.extract(sigma, a);
  const std::size_t ea = space.extract(eta, a);
  return {sigma - sa + ea, eta - ea + sa};
}

/// A probability vector over a ProductSpace.
class Distribution {
 public:
  Distribution(const ProductSpace& space, std::vector<double> weights,
               double tolerance = kProbabilityTolerance);

  static Distribution uniform(const ProductSpace& space);
  static Distribution point_mass(const ProductSpace& space, std::size_t index);
  /// Normalizes nonnegative weights; throws if they are all zero.
  static Distribution normalized(const ProductSpace& space, std::vector<double> weights);

  const ProductSpace& space() const { return space_; }
  std::span<const double> weights() const { return weights_; }
  const std::vector<double>& vector() const { return weights_; }
  double operator[](std::size_t i) const { return weights_[i]; }
  std::size_t size() const { return weights_.size(); }
  bool full_support() const;

  /// Marginal probabilities on X_A.
  std::vector<double> marginal(SiteSubset a) const;
  std::vector<double> site_marginal(int site) const;

 private:
  ProductSpace space_;
  std::vector<double> weights_;
};

/// mu = mu_0 x ... x mu_{n-1}.
class ProductMeasure {
 public:
  ProductMeasure(const ProductSpace& space, std::vector<std::vector<double>> site_measures);

  static ProductMeasure uniform(const ProductSpace& space);
  /// mu_i = Bernoulli(w) on {0,1} for every site of a binary space.
  static ProductMeasure bernoulli(int n, double w);

  const ProductSpace& space() const { return space_; }
  const std::vector<double>& site(int i) const { return sites_[i]; }
  const std::vector<std::vector<double>>& sites() const { return sites_; }
  /// Dense mu(sigma) over the full space.
  const std::vector<double>& joint() const { return joint_; }
  double operator[](std::size_t index) const { return joint_[index]; }
  bool strictly_positive() const;

  /// mu_A over X_A.
  std::vector<double> marginal(SiteSubset a) const;

  Distribution as_distribution() const { return Distribution(space_, joint_); }

 private:
  ProductSpace space_;
  std::vector<std::vector<double>> sites_;
  std::vector<double> joint_;
};

/// A nonnegative function f on the space, read as a density against some
/// reference measure supplied alongside it.
class Density {
 public:
  Density() = default;
  explicit Density(std::vector<double> values);

  std::span<const double> values() const { return values_; }
  const std::vector<double>& vector() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }
  bool strictly_positive() const;

 private:
  std::vector<double> values_;
};

/// f = p / mu.
Density density_of(const Distribution& p, std::span<const double> reference);
Density density_of(const Distribution& p, const ProductMeasure& mu);
/// p = f mu (must have unit mass within kDensityTolerance).
Distribution distribution_of(const Density& f, const ProductMeasure& mu);

/// mu[f] against an arbitrary reference vector.
double mass(std::span<const double> f, std::span<const double> reference);
inline double mass(const Density& f, const ProductMeasure& mu) { return mass(f.values(), mu.joint()); }

/// f_A(sigma_A) = sum_eta mu(eta) f(sigma_A eta_{A^c}), stored over X_A.
struct MarginalDensity {
  SiteSubset subset;
  std::vector<double> values;

  /// f_A regarded as a function on the full space (constant in the A^c digits).
  std::vector<double> lift(const ProductSpace& space) const;
};

MarginalDensity marginal_density(const Density& f, SiteSubset a, const ProductMeasure& mu);

/// p_A (x) p_{A^c}.
Distribution product_of_marginals(const Distribution& p, SiteSubset a);

struct IpfOptions {
  double tolerance = 1e-10;
  int max_iterations = 10000;
};

/// Iterative proportional fitting: rescales g mu cyclically per site until the
/// single-site marginals of (f mu) equal `targets` within tolerance, and returns
/// f normalized so mu[f] = 1. Throws ConvergenceError carrying the final
/// deviation if max_iterations is exhausted.
Density ipf_project(const Density& g, const ProductMeasure& mu,
                    const std::vector<std::vector<double>>& targets, IpfOptions options = {});

/// IPF on raw nonnegative weights; returns a probability vector with the given
/// single-site marginals.
std::vector<double> ipf_fit_weights(const ProductSpace& space, std::vector<double> weights,
                                    const std::vector<std::vector<double>>& targets,
                                    IpfOptions options = {});

}  // namespace recomb
