#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "recomb/product_space.hpp"

namespace recomb {

/// Per-task seed: splitmix64 over FNV-1a(name) mixed with the master seed and index.
std::uint64_t derive_seed(std::uint64_t master, std::string_view task, std::uint64_t index = 0);

/// Symmetric Dirichlet(alpha) vector of the given length.
std::vector<double> sample_dirichlet(std::size_t length, double alpha, std::mt19937_64& rng);

/// Random full-support distribution on the space, Dirichlet(alpha) weights.
Distribution random_distribution(const ProductSpace& space, std::mt19937_64& rng, double alpha = 1.0);

/// Product measure with independent Dirichlet site laws, entries floored at `floor`
/// before renormalizing so the measure stays strictly positive.
ProductMeasure random_product_measure(const ProductSpace& space, std::mt19937_64& rng, double floor = 0.05);

/// Random element of S_mu: a Dirichlet density projected by IPF onto unit
/// single-site marginal densities.
Density random_balanced_density(const ProductMeasure& mu, std::mt19937_64& rng, double alpha = 1.0,
                                IpfOptions options = {});

}  // namespace recomb
