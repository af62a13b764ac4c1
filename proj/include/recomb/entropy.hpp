#pragma once

// Entropy functionals of densities against a reference measure.
//
// Ent(f) = mu[f log f] - mu[f] log mu[f] is evaluated as
// sum mu (f log(f/m) - f + m) with m = mu[f], which keeps every term
// nonnegative and avoids cancellation when f is close to constant.

#include <span>
#include <vector>

#include "recomb/product_space.hpp"

namespace recomb {

/// Ent(f) against an arbitrary nonnegative reference vector.
double ent(std::span<const double> f, std::span<const double> reference);
double ent(const Density& f, const ProductMeasure& mu);

/// H(p|q) = sum p log(p/q); +infinity when p charges a state q does not.
double relative_entropy(std::span<const double> p, std::span<const double> q);
double relative_entropy(const Distribution& p, const Distribution& q);

/// sup_B |p(B) - q(B)| = (1/2) sum |p - q|.
double total_variation(std::span<const double> p, std::span<const double> q);

/// -sum p log p.
double shannon_entropy(std::span<const double> p);

/// Ent(f_A) as a function of the subset A, for densities and product measures.
double marginal_entropy(const Density& f, SiteSubset a, const ProductMeasure& mu);

struct ConditionalParts {
  double marginal = 0.0;     // Ent(f_A)
  double conditional = 0.0;  // mu[Ent(f | A)]
};

/// Splits Ent(f) into Ent(f_A) + mu[Ent(f|A)], computing each part directly.
ConditionalParts conditional_decomposition(const Density& f, SiteSubset a, const ProductMeasure& mu);

struct ShannonBridge {
  double shannon_side = 0.0;  // sum_{i in A} H(Z_i) - H(Z_A), Z ~ f mu
  double entropy_side = 0.0;  // Ent(f_A) - sum_{i in A} Ent(f_i)
};

ShannonBridge shannon_bridge(const Density& f, SiteSubset a, const ProductMeasure& mu);

/// profile[A.bits()] = Ent(f_A) for all 2^n subsets. Requires n <= 20.
/// Subsets are processed in parallel.
std::vector<double> entropy_profile(const Density& f, const ProductMeasure& mu);

}  // namespace recomb
