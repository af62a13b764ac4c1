#include "recomb/dynamics.hpp"

#include <cmath>

#include "recomb/entropy.hpp"
#include "recomb/kernels.hpp"
#include "recomb/summation.hpp"

namespace recomb {

namespace {

void check_law(const ProductSpace& space, const CrossoverLaw& nu) {
  if (nu.sites() != space.sites()) throw InvalidArgument("crossover law and space disagree on n");
}

void outer_term(const ProductSpace& space, std::span<const double> p, SiteSubset a, double weight,
                std::span<double> out, std::vector<double>& pa, std::vector<double>& pc) {
  const auto emb_a = space.embedding(a);
  const auto emb_c = space.embedding(a.complement(space.sites()));
  pa.resize(emb_a.size());
  pc.resize(emb_c.size());
  kernels::marginalize(p, emb_a, emb_c, {}, pa);
  kernels::marginalize(p, emb_c, emb_a, {}, pc);
  kernels::accumulate_outer(out, weight, pa, pc, emb_a, emb_c);
}

// Snapshot copy; entries below zero by rounding only are clipped.
Distribution snapshot(const ProductSpace& space, std::span<const double> p, double tolerance) {
  std::vector<double> w(p.begin(), p.end());
  for (double& x : w) {
    if (x < 0.0) {
      if (x < -1e-12) throw ConvergenceError("integration produced a negative probability", x);
      x = 0.0;
    }
  }
  return Distribution(space, std::move(w), tolerance);
}

}  // namespace

RecombinationOperator::RecombinationOperator(const ProductSpace& space, const CrossoverLaw& nu, int cap)
    : space_(space) {
  check_law(space, nu);
  for (const auto& e : nu.support(cap)) {
    terms_.push_back({e.weight, space.embedding(e.subset), space.embedding(e.subset.complement(space.sites()))});
  }
}

void RecombinationOperator::apply(std::span<const double> p, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  std::vector<double> pa, pc;
  for (const auto& t : terms_) {
    pa.resize(t.emb_a.size());
    pc.resize(t.emb_c.size());
    kernels::marginalize(p, t.emb_a, t.emb_c, {}, pa);
    kernels::marginalize(p, t.emb_c, t.emb_a, {}, pc);
    kernels::accumulate_outer(out, t.weight, pa, pc, t.emb_a, t.emb_c);
  }
}

void RecombinationOperator::field(std::span<const double> p, std::span<double> out) const {
  apply(p, out);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= p[i];
}

Distribution psi_step(const Distribution& p, const CrossoverLaw& nu) {
  if (!nu.enumerable()) {
    throw CapExceeded("crossover law too large to enumerate; use psi_step_sampled");
  }
  RecombinationOperator op(p.space(), nu);
  std::vector<double> out(p.size());
  op.apply(p.weights(), out);
  return Distribution(p.space(), std::move(out), kDensityTolerance);
}

Distribution psi_step_sampled(const Distribution& p, const CrossoverLaw& nu, int samples,
                              std::mt19937_64& rng) {
  check_law(p.space(), nu);
  if (samples < 1) throw InvalidArgument("sampled Psi needs at least one sample");
  std::vector<double> out(p.size(), 0.0), pa, pc;
  for (int s = 0; s < samples; ++s) {
    outer_term(p.space(), p.weights(), nu.sample(rng), 1.0 / samples, out, pa, pc);
  }
  return Distribution(p.space(), std::move(out), kDensityTolerance);
}

Equilibrium equilibrium_of(const Distribution& p) {
  const auto& space = p.space();
  std::vector<std::vector<double>> sites;
  std::vector<std::vector<int>> support;
  bool restricted = false;
  for (int i = 0; i < space.sites(); ++i) {
    auto m = p.site_marginal(i);
    const double total = compensated_sum(m);
    std::vector<int> supp;
    for (std::size_t x = 0; x < m.size(); ++x) {
      m[x] /= total;
      if (m[x] > 0.0) {
        supp.push_back(static_cast<int>(x));
      } else {
        restricted = true;
      }
    }
    sites.push_back(std::move(m));
    support.push_back(std::move(supp));
  }
  return {ProductMeasure(space, std::move(sites)), std::move(support), restricted};
}

EvolutionTrace integrate_rk4(const Distribution& p0, const VectorField& field,
                             std::span<const double> reference, const EvolutionOptions& options) {
  if (!(options.dt > 0.0) || !(options.t_end >= 0.0)) throw InvalidArgument("need dt > 0 and t_end >= 0");
  if (options.snapshot_every < 1) throw InvalidArgument("snapshot cadence must be positive");
  if (reference.size() != p0.size()) throw InvalidArgument("reference size mismatch");
  const auto& space = p0.space();
  const std::size_t size = p0.size();
  const auto steps = static_cast<long>(std::llround(options.t_end / options.dt));
  if (std::abs(static_cast<double>(steps) * options.dt - options.t_end) > 1e-9 * std::max(1.0, options.t_end)) {
    throw InvalidArgument("t_end must be a whole number of steps");
  }

  EvolutionTrace trace;
  std::vector<double> p(p0.vector()), k1(size), k2(size), k3(size), k4(size), tmp(size);
  auto record = [&](double t) {
    trace.times.push_back(t);
    trace.states.push_back(snapshot(space, p, options.mass_drift_limit));
    trace.entropy.push_back(relative_entropy(p, reference));
    trace.total_variation.push_back(total_variation(p, reference));
  };
  record(0.0);
  const double h = options.dt;
  for (long step = 1; step <= steps; ++step) {
    field(p, k1);
    for (std::size_t i = 0; i < size; ++i) tmp[i] = p[i] + 0.5 * h * k1[i];
    field(tmp, k2);
    for (std::size_t i = 0; i < size; ++i) tmp[i] = p[i] + 0.5 * h * k2[i];
    field(tmp, k3);
    for (std::size_t i = 0; i < size; ++i) tmp[i] = p[i] + h * k3[i];
    field(tmp, k4);
    for (std::size_t i = 0; i < size; ++i) p[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    const double drift = std::abs(compensated_sum(p) - 1.0);
    trace.max_mass_drift = std::max(trace.max_mass_drift, drift);
    if (drift > options.mass_drift_limit) {
      throw ConvergenceError("mass drift exceeded the limit; reduce dt", drift);
    }
    if (step % options.snapshot_every == 0 || step == steps) record(static_cast<double>(step) * h);
  }
  return trace;
}

EvolutionTrace evolve_continuous(const Distribution& p0, const CrossoverLaw& nu,
                                 const EvolutionOptions& options) {
  const RecombinationOperator op(p0.space(), nu);
  const auto eq = equilibrium_of(p0);
  return integrate_rk4(
      p0, [&op](std::span<const double> p, std::span<double> out) { op.field(p, out); },
      eq.pi.joint(), options);
}

EvolutionTrace evolve_discrete(const Distribution& p0, const CrossoverLaw& nu, int steps) {
  if (steps < 0) throw InvalidArgument("step count must be nonnegative");
  const RecombinationOperator op(p0.space(), nu);
  const auto eq = equilibrium_of(p0);
  const auto& pi = eq.pi.joint();
  EvolutionTrace trace;
  std::vector<double> p(p0.vector()), next(p0.size());
  for (int k = 0;; ++k) {
    trace.times.push_back(k);
    trace.states.emplace_back(p0.space(), p, kDensityTolerance);
    trace.entropy.push_back(relative_entropy(p, pi));
    trace.total_variation.push_back(total_variation(p, pi));
    trace.max_mass_drift = std::max(trace.max_mass_drift, std::abs(compensated_sum(p) - 1.0));
    if (k == steps) break;
    op.apply(p, next);
    p.swap(next);
  }
  return trace;
}

}  // namespace recomb
