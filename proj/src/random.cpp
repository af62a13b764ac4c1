#include "recomb/random.hpp"

#include <algorithm>

#include "recomb/summation.hpp"

namespace recomb {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::string_view task, std::uint64_t index) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : task) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return splitmix64(splitmix64(master ^ h) + index);
}

std::vector<double> sample_dirichlet(std::size_t length, double alpha, std::mt19937_64& rng) {
  if (!(alpha > 0.0)) throw InvalidArgument("Dirichlet concentration must be positive");
  std::gamma_distribution<double> gamma(alpha, 1.0);
  std::vector<double> v(length);
  double total = 0.0;
  do {
    total = 0.0;
    for (double& x : v) {
      x = gamma(rng);
      total += x;
    }
  } while (!(total > 0.0));
  for (double& x : v) x /= total;
  return v;
}

Distribution random_distribution(const ProductSpace& space, std::mt19937_64& rng, double alpha) {
  auto w = sample_dirichlet(space.size(), alpha, rng);
  for (double& x : w) x = std::max(x, 1e-300);
  return Distribution::normalized(space, std::move(w));
}

ProductMeasure random_product_measure(const ProductSpace& space, std::mt19937_64& rng, double floor) {
  std::vector<std::vector<double>> sites;
  for (int i = 0; i < space.sites(); ++i) {
    auto m = sample_dirichlet(static_cast<std::size_t>(space.alphabet(i)), 1.0, rng);
    for (double& x : m) x += floor;
    const double total = compensated_sum(m);
    for (double& x : m) x /= total;
    sites.push_back(std::move(m));
  }
  return ProductMeasure(space, std::move(sites));
}

Density random_balanced_density(const ProductMeasure& mu, std::mt19937_64& rng, double alpha, IpfOptions options) {
  auto g = sample_dirichlet(mu.space().size(), alpha, rng);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = std::max(g[i], 1e-300) / mu[i];
  return ipf_project(Density(std::move(g)), mu, mu.sites(), options);
}

}  // namespace recomb
