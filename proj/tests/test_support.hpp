#pragma once

// Brute-force oracles used by the unit tests. They decode every configuration
// and sum directly, sharing no code with the library's indexed kernels.

#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "recomb/product_space.hpp"

namespace recomb::testing {

inline std::vector<int> digits_of(const ProductSpace& space, std::size_t index) {
  std::vector<int> d;
  for (int i = 0; i < space.sites(); ++i) {
    d.push_back(static_cast<int>(index % static_cast<std::size_t>(space.alphabet(i))));
    index /= static_cast<std::size_t>(space.alphabet(i));
  }
  return d;
}

inline std::vector<int> restrict_to(const std::vector<int>& d, SiteSubset a) {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(d.size()); ++i) {
    if (a.contains(i)) out.push_back(d[static_cast<std::size_t>(i)]);
  }
  return out;
}

/// Map from the A-restricted configuration to its total weight.
inline std::map<std::vector<int>, double> brute_marginal(const ProductSpace& space, const std::vector<double>& w,
                                                         SiteSubset a) {
  std::map<std::vector<int>, double> out;
  for (std::size_t idx = 0; idx < space.size(); ++idx) out[restrict_to(digits_of(space, idx), a)] += w[idx];
  return out;
}

/// f_A(sigma) evaluated at every full configuration sigma.
inline std::vector<double> brute_marginal_density(const ProductSpace& space, const std::vector<double>& f,
                                                  const std::vector<double>& mu, SiteSubset a) {
  std::map<std::vector<int>, double> num, den;
  for (std::size_t idx = 0; idx < space.size(); ++idx) {
    const auto key = restrict_to(digits_of(space, idx), a);
    num[key] += f[idx] * mu[idx];
    den[key] += mu[idx];
  }
  std::vector<double> out(space.size());
  for (std::size_t idx = 0; idx < space.size(); ++idx) {
    const auto key = restrict_to(digits_of(space, idx), a);
    out[idx] = num[key] / den[key];
  }
  return out;
}

/// Ent(f) = mu[f log f] - mu[f] log mu[f], straight from the definition.
inline double brute_ent(const std::vector<double>& f, const std::vector<double>& mu) {
  double m = 0.0, flogf = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    m += mu[i] * f[i];
    if (f[i] > 0.0) flogf += mu[i] * f[i] * std::log(f[i]);
  }
  return flogf - (m > 0.0 ? m * std::log(m) : 0.0);
}

}  // namespace recomb::testing
