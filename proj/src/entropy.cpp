#include "recomb/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "recomb/kernels.hpp"
#include "recomb/summation.hpp"

namespace recomb {

namespace {

void check_sizes(std::size_t a, std::size_t b) {
  if (a != b) throw InvalidArgument("vector size mismatch");
}

void check_density(const Density& f, const ProductMeasure& mu) {
  if (f.size() != mu.space().size()) throw InvalidArgument("density size mismatch");
}

}  // namespace

double ent(std::span<const double> f, std::span<const double> reference) {
  check_sizes(f.size(), reference.size());
  const double m = mass(f, reference);
  if (!(m > 0.0)) return 0.0;
  CompensatedSum s;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double w = reference[i];
    if (w == 0.0) continue;
    const double x = f[i];
    const double term = x > 0.0 ? x * std::log(x / m) - x + m : m;
    s.add(w * term);
  }
  return std::max(0.0, s.value());
}

double ent(const Density& f, const ProductMeasure& mu) {
  check_density(f, mu);
  return ent(f.values(), mu.joint());
}

double relative_entropy(std::span<const double> p, std::span<const double> q) {
  check_sizes(p.size(), q.size());
  CompensatedSum s;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) return std::numeric_limits<double>::infinity();
    s.add(p[i] * std::log(p[i] / q[i]));
  }
  return std::max(0.0, s.value());
}

double relative_entropy(const Distribution& p, const Distribution& q) {
  if (!(p.space() == q.space())) throw InvalidArgument("space mismatch");
  return relative_entropy(p.weights(), q.weights());
}

double total_variation(std::span<const double> p, std::span<const double> q) {
  check_sizes(p.size(), q.size());
  CompensatedSum s;
  for (std::size_t i = 0; i < p.size(); ++i) s.add(std::abs(p[i] - q[i]));
  return 0.5 * s.value();
}

double shannon_entropy(std::span<const double> p) {
  CompensatedSum s;
  for (double x : p) s.add(-xlogx(x));
  return s.value();
}

double marginal_entropy(const Density& f, SiteSubset a, const ProductMeasure& mu) {
  const auto fa = marginal_density(f, a, mu);
  return ent(fa.values, mu.marginal(a));
}

ConditionalParts conditional_decomposition(const Density& f, SiteSubset a, const ProductMeasure& mu) {
  check_density(f, mu);
  const auto& space = mu.space();
  const SiteSubset ac = a.complement(space.sites());
  const auto emb_a = space.embedding(a);
  const auto emb_c = space.embedding(ac);
  const auto mu_a = mu.marginal(a);
  const auto mu_c = mu.marginal(ac);
  std::vector<double> slice(emb_c.size());
  CompensatedSum cond;
  for (std::size_t x = 0; x < emb_a.size(); ++x) {
    for (std::size_t c = 0; c < emb_c.size(); ++c) slice[c] = f[emb_a[x] + emb_c[c]];
    cond.add(mu_a[x] * ent(slice, mu_c));
  }
  return {marginal_entropy(f, a, mu), cond.value()};
}

ShannonBridge shannon_bridge(const Density& f, SiteSubset a, const ProductMeasure& mu) {
  const Distribution p = distribution_of(f, mu);
  ShannonBridge out;
  CompensatedSum lhs, rhs;
  for (int i : a.sites()) {
    const SiteSubset si{std::uint64_t{1} << i};
    lhs.add(shannon_entropy(p.marginal(si)));
    rhs.add(-marginal_entropy(f, si, mu));
  }
  lhs.add(-shannon_entropy(p.marginal(a)));
  rhs.add(marginal_entropy(f, a, mu));
  out.shannon_side = lhs.value();
  out.entropy_side = rhs.value();
  return out;
}

std::vector<double> entropy_profile(const Density& f, const ProductMeasure& mu) {
  check_density(f, mu);
  const auto& space = mu.space();
  const int n = space.sites();
  if (n > 20) throw CapExceeded("entropy profile enumerates 2^n subsets; n must be <= 20");
  const auto count = static_cast<std::ptrdiff_t>(std::uint64_t{1} << n);
  std::vector<double> profile(static_cast<std::size_t>(count));
#pragma omp parallel for schedule(dynamic) if (count * static_cast<std::ptrdiff_t>(space.size()) > 65536)
  for (std::ptrdiff_t bits = 0; bits < count; ++bits) {
    const SiteSubset a{static_cast<std::uint64_t>(bits)};
    const SiteSubset ac = a.complement(n);
    const auto emb_a = space.embedding(a);
    const auto emb_c = space.embedding(ac);
    const auto mu_c = mu.marginal(ac);
    std::vector<double> fa(emb_a.size());
    for (std::size_t x = 0; x < emb_a.size(); ++x) {
      double acc = 0.0;
      for (std::size_t c = 0; c < emb_c.size(); ++c) acc += mu_c[c] * f[emb_a[x] + emb_c[c]];
      fa[x] = acc;
    }
    profile[static_cast<std::size_t>(bits)] = ent(fa, mu.marginal(a));
  }
  return profile;
}

}  // namespace recomb
