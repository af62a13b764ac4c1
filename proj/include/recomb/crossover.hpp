#pragma once

// Crossover laws: distributions nu over subsets A of the sites, selecting which
// block two parents exchange.

#include <random>
#include <string>
#include <vector>

#include "recomb/product_space.hpp"

namespace recomb {

enum class CrossoverModel { single_site, one_point, uniform, bernoulli, explicit_list };

struct WeightedSubset {
  SiteSubset subset;
  double weight = 0.0;
};

inline constexpr int kDefaultEnumerationCap = 20;

class CrossoverLaw {
 public:
  /// nu(A) = 1/n for each singleton.
  static CrossoverLaw single_site(int n);
  /// nu(J_i) = 1/(n+1) for the prefixes J_0 = {}, J_i = {0..i-1}, i = 1..n.
  static CrossoverLaw one_point(int n);
  /// nu(A) = 2^-n.
  static CrossoverLaw uniform(int n);
  /// nu(A) = q^|A| (1-q)^(n-|A|), q in [0, 1/2].
  static CrossoverLaw bernoulli(int n, double q);
  /// Explicit weights; duplicates are merged, weights must sum to 1.
  static CrossoverLaw explicit_law(int n, std::vector<WeightedSubset> entries);

  CrossoverModel model() const { return model_; }
  int sites() const { return n_; }
  double q() const { return q_; }
  std::string name() const;

  /// True when every pair of sites is separated by some A with nu(A) > 0.
  bool nondegenerate() const;

  bool enumerable(int cap = kDefaultEnumerationCap) const;

  /// Exact support with weights (zero-weight subsets omitted). Throws
  /// CapExceeded for uniform/Bernoulli laws with n > cap.
  std::vector<WeightedSubset> support(int cap = kDefaultEnumerationCap) const;

  SiteSubset sample(std::mt19937_64& rng) const;

  /// M(u, v) = sum_A nu(A) u^|A| v^|A^c|, u, v in [0, 1].
  double mixed_moment(double u, double v) const;

  /// sum_A nu(A) (2^-|A| + 2^-|A^c|) = M(1/2, 1) + M(1, 1/2).
  double delta() const { return mixed_moment(0.5, 1.0) + mixed_moment(1.0, 0.5); }

  /// nu(A) for an arbitrary subset (closed form, no enumeration).
  double weight(SiteSubset a) const;

 private:
  CrossoverLaw(CrossoverModel m, int n, double q) : model_(m), n_(n), q_(q) {}

  CrossoverModel model_;
  int n_;
  double q_ = 0.0;
  std::vector<WeightedSubset> entries_;
};

}  // namespace recomb
