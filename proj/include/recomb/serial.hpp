#pragma once

// Single-threaded reference versions of the parallel hot paths. They loop over
// configurations directly and are used to cross-check the OpenMP kernels and
// as the baseline in the benchmarks.

#include <span>
#include <vector>

#include "recomb/crossover.hpp"
#include "recomb/product_space.hpp"
#include "recomb/rqs.hpp"

namespace recomb::serial {

/// p_A as a vector over the subspace of A.
std::vector<double> marginal(std::span<const double> p, const ProductSpace& space, SiteSubset a);

/// sum_A nu(A) p_A (x) p_{A^c}.
std::vector<double> psi_step(std::span<const double> p, const ProductSpace& space, const CrossoverLaw& nu);

/// profile[A.bits()] = Ent(f_A).
std::vector<double> entropy_profile(const Density& f, const ProductMeasure& mu);

std::vector<double> drift(std::span<const double> p, const PairGenerator& g);

double entropy_production(std::span<const double> f, std::span<const double> g, const PairGenerator& gen,
                          std::span<const double> mu);

}  // namespace recomb::serial
