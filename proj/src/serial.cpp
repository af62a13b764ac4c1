#include "recomb/serial.hpp"

#include <cmath>

#include "recomb/entropy.hpp"
#include "recomb/summation.hpp"

namespace recomb::serial {

std::vector<double> marginal(std::span<const double> p, const ProductSpace& space, SiteSubset a) {
  if (p.size() != space.size()) throw InvalidArgument("vector size mismatch");
  std::vector<double> out(space.subset_size(a), 0.0);
  for (std::size_t x = 0; x < p.size(); ++x) out[space.project(x, a)] += p[x];
  return out;
}

std::vector<double> psi_step(std::span<const double> p, const ProductSpace& space, const CrossoverLaw& nu) {
  std::vector<double> out(p.size(), 0.0);
  for (const auto& e : nu.support()) {
    const SiteSubset ac = e.subset.complement(space.sites());
    const auto pa = marginal(p, space, e.subset);
    const auto pc = marginal(p, space, ac);
    for (std::size_t x = 0; x < p.size(); ++x) {
      out[x] += e.weight * pa[space.project(x, e.subset)] * pc[space.project(x, ac)];
    }
  }
  return out;
}

std::vector<double> entropy_profile(const Density& f, const ProductMeasure& mu) {
  const auto& space = mu.space();
  const int n = space.sites();
  if (n > 20) throw CapExceeded("entropy profile enumerates 2^n subsets; n must be <= 20");
  std::vector<double> weighted(f.size());
  for (std::size_t x = 0; x < f.size(); ++x) weighted[x] = f[x] * mu[x];
  std::vector<double> profile(std::size_t{1} << n);
  for (std::uint64_t bits = 0; bits < profile.size(); ++bits) {
    const SiteSubset a{bits};
    // f_A = (f mu)_A / mu_A.
    const auto num = marginal(weighted, space, a);
    const auto den = mu.marginal(a);
    std::vector<double> fa(num.size());
    for (std::size_t y = 0; y < fa.size(); ++y) fa[y] = num[y] / den[y];
    profile[bits] = ent(fa, den);
  }
  return profile;
}

std::vector<double> drift(std::span<const double> p, const PairGenerator& g) {
  const std::size_t n = g.space().size();
  if (p.size() != n) throw InvalidArgument("vector size mismatch");
  std::vector<double> out(n, 0.0);
  std::vector<Transition> row;
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t s2 = 0; s2 < n; ++s2) {
      const double w = p[s] * p[s2];
      if (w == 0.0) continue;
      g.transitions(s, s2, row);
      for (const auto& x : row) {
        out[x.first] += w * x.rate;
        out[s] -= w * x.rate;
      }
    }
  }
  return out;
}

double entropy_production(std::span<const double> f, std::span<const double> g, const PairGenerator& gen,
                          std::span<const double> mu) {
  const std::size_t n = gen.space().size();
  if (f.size() != n || g.size() != n || mu.size() != n) throw InvalidArgument("vector size mismatch");
  CompensatedSum acc;
  std::vector<Transition> row;
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t t2 = 0; t2 < n; ++t2) {
      gen.transitions(t, t2, row);
      for (const auto& x : row) {
        const double df = f[x.first] * f[x.second] - f[t] * f[t2];
        const double dl = std::log(g[x.first] * g[x.second] / (g[t] * g[t2]));
        acc.add(mu[t] * mu[t2] * x.rate * df * dl);
      }
    }
  }
  return 0.25 * acc.value();
}

}  // namespace recomb::serial
