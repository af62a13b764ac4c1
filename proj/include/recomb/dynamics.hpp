#pragma once

// Recombination dynamics: the quadratic map Psi[p] = sum_A nu(A) p_A (x) p_{A^c}
// and the ODE dp/dt = Psi[p] - p, plus a generic fixed-step RK4 driver.

#include <functional>
#include <random>
#include <span>
#include <vector>

#include "recomb/crossover.hpp"
#include "recomb/product_space.hpp"

namespace recomb {

/// Precomputed subset embeddings for repeated applications of Psi.
class RecombinationOperator {
 public:
  RecombinationOperator(const ProductSpace& space, const CrossoverLaw& nu,
                        int cap = kDefaultEnumerationCap);

  const ProductSpace& space() const { return space_; }

  /// out = sum_A nu(A) p_A (x) p_{A^c}.
  void apply(std::span<const double> p, std::span<double> out) const;

  /// out = Psi[p] - p.
  void field(std::span<const double> p, std::span<double> out) const;

 private:
  struct Term {
    double weight;
    std::vector<std::size_t> emb_a;
    std::vector<std::size_t> emb_c;
  };
  ProductSpace space_;
  std::vector<Term> terms_;
};

Distribution psi_step(const Distribution& p, const CrossoverLaw& nu);

/// Unbiased Monte Carlo estimate of Psi[p] averaging `samples` subsets drawn
/// from nu. Approximate; intended for laws too large to enumerate.
Distribution psi_step_sampled(const Distribution& p, const CrossoverLaw& nu, int samples,
                              std::mt19937_64& rng);

struct Equilibrium {
  ProductMeasure pi;
  /// Symbols with positive marginal mass at each site.
  std::vector<std::vector<int>> support;
  /// True when some site marginal has a zero entry.
  bool restricted = false;
};

/// pi = (x)_i p_i.
Equilibrium equilibrium_of(const Distribution& p);

struct EvolutionOptions {
  double t_end = 1.0;
  double dt = 0.01;
  int snapshot_every = 10;
  /// Largest tolerated |sum p - 1| before the integration is aborted.
  double mass_drift_limit = 1e-9;
};

struct EvolutionTrace {
  std::vector<double> times;
  std::vector<Distribution> states;
  /// H(p_t | reference) per snapshot.
  std::vector<double> entropy;
  /// TV(p_t, reference) per snapshot.
  std::vector<double> total_variation;
  double max_mass_drift = 0.0;
};

using VectorField = std::function<void(std::span<const double>, std::span<double>)>;

/// Classical RK4 on dp/dt = field(p) without renormalization. Snapshots are
/// taken at t = 0, every `snapshot_every` steps, and at t_end.
EvolutionTrace integrate_rk4(const Distribution& p0, const VectorField& field,
                             std::span<const double> reference, const EvolutionOptions& options);

/// Continuous-time recombination; entropies are taken against (x)_i p0_i.
EvolutionTrace evolve_continuous(const Distribution& p0, const CrossoverLaw& nu,
                                 const EvolutionOptions& options);

/// k iterates of Psi; times are step indices.
EvolutionTrace evolve_discrete(const Distribution& p0, const CrossoverLaw& nu, int steps);

}  // namespace recomb
