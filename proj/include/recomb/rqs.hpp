#pragma once

// Reversible quadratic systems: pair generators G(s, s'; t, t') on X x X, the
// quadratic drift, entropy production, stationarity, and the linearized kernel.
//
// Pairs are indexed as s * |X| + s'. Generators are transition oracles: for a
// source pair they list the off-diagonal targets with positive rates. The
// diagonal is implied by zero row sums.

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "recomb/crossover.hpp"
#include "recomb/dynamics.hpp"
#include "recomb/jacobi.hpp"
#include "recomb/product_space.hpp"

namespace recomb {

struct Transition {
  std::size_t first = 0;
  std::size_t second = 0;
  double rate = 0.0;
};

/// Appends the raw transitions out of (s, s2); duplicates and self-pairs allowed.
using TransitionOracle = std::function<void(std::size_t s, std::size_t s2, std::vector<Transition>& out)>;

/// A single-chain Markov generator: appends (target, rate) for target != s.
using ChainOracle = std::function<void(std::size_t s, std::vector<std::pair<std::size_t, double>>& out)>;

inline constexpr std::size_t kSpectralCap = std::size_t{1} << 10;
inline constexpr std::size_t kCompileTransitionCap = std::size_t{1} << 22;

class PairGenerator {
 public:
  PairGenerator(const ProductSpace& space, TransitionOracle oracle, std::string name = "generator");

  const ProductSpace& space() const { return space_; }
  const std::string& name() const { return name_; }

  /// Off-diagonal transitions from (s, s2): merged, sorted by target, positive rates only.
  void transitions(std::size_t s, std::size_t s2, std::vector<Transition>& out) const;
  std::vector<Transition> transitions(std::size_t s, std::size_t s2) const;

  /// G(s, s2; t, t2), including the diagonal.
  double rate(std::size_t s, std::size_t s2, std::size_t t, std::size_t t2) const;

  /// Total off-diagonal rate out of (s, s2).
  double exit_rate(std::size_t s, std::size_t s2) const;

  /// Caches all rows in compressed form. Returns false (leaving the generator
  /// lazy) when the table would exceed `max_transitions`.
  bool compile(std::size_t max_transitions = kCompileTransitionCap);
  bool compiled() const { return !row_start_.empty(); }

 private:
  ProductSpace space_;
  TransitionOracle oracle_;
  std::string name_;
  std::vector<std::size_t> row_start_;
  std::vector<Transition> table_;
};

/// G = Q - 1 with Q(s, s'; t, t') = sum_A nu(A) 1(t = s'_A s_{A^c}, t' = s_A s'_{A^c}).
PairGenerator make_recombination_generator(const CrossoverLaw& nu, const ProductSpace& space);

/// G(s, s'; t, t') = G0(s, t) 1(s' = t') + G0(s', t') 1(s = t).
PairGenerator make_linear_pair_generator(const ProductSpace& space, ChainOracle chain,
                                         std::string name = "linear");

/// Rate-wise sum of two generators on the same space.
PairGenerator sum_generators(const PairGenerator& a, const PairGenerator& b);

/// The generator with rates made symmetric in the target pair's order off
/// the two special targets; it drives the same quadratic drift.
PairGenerator symmetrize(const PairGenerator& g);

struct IdentityCheck {
  double max_violation = 0.0;
  std::size_t s = 0, s2 = 0, t = 0, t2 = 0;
  bool holds(double tol) const { return max_violation <= tol; }
};

/// mu(s)mu(s')G(s,s';t,t') = mu(t)mu(t')G(t,t';s,s') over every transition.
IdentityCheck check_reversibility(const PairGenerator& g, std::span<const double> mu);

/// G(s,s';t,t') = G(s',s;t',t) over every transition.
IdentityCheck check_pair_symmetry(const PairGenerator& g);

/// G(t,t';s,s') = G(t',t;s,s') off the two special targets.
IdentityCheck check_target_symmetry(const PairGenerator& g);

/// Largest |sum of row| over all source pairs, diagonal included (zero by construction;
/// reported for completeness of the generator contract).
double max_row_sum(const PairGenerator& g);

/// Phi[p](t, t') = sum_{s,s'} p(s)p(s')G(s,s';t,t') as a dense |X|^2 vector.
std::vector<double> phi(std::span<const double> p, const PairGenerator& g);

/// drift(t) = sum_t' Phi[p](t, t').
std::vector<double> drift(std::span<const double> p, const PairGenerator& g);

/// D(f, g) = 1/4 sum mu(t)mu(t')G(t,t';s,s')[f(s)f(s') - f(t)f(t')] log(g(s)g(s')/(g(t)g(t'))).
/// Requires g strictly positive. Outer sum over t runs in parallel; per-t
/// partials are combined in index order.
double entropy_production(std::span<const double> f, std::span<const double> g, const PairGenerator& gen,
                          std::span<const double> mu);

/// Recombination form: Ent(f) - sum_A nu(A) mu[f_A f_{A^c} log f], f > 0.
double recombination_entropy_production(const Density& f, const CrossoverLaw& nu, const ProductMeasure& mu);

struct StationarityReport {
  bool stationary = true;
  /// Worst |f(s)f(s') - f(t)f(t')| / max(1, f(s)f(s'), f(t)f(t')) over positive-rate transitions.
  double max_violation = 0.0;
  std::size_t t = 0, t2 = 0, s = 0, s2 = 0;
};

StationarityReport is_stationary(std::span<const double> p, const PairGenerator& g, std::span<const double> mu,
                                 double tolerance = 1e-10);

/// RK4 integration of dp/dt = drift(p); entropies against mu.
EvolutionTrace evolve_rqs(const Distribution& p0, const PairGenerator& g, std::span<const double> mu,
                          const EvolutionOptions& options);

/// max_t |p_t[log(rho/mu)] - p_0[log(rho/mu)]| along a trace. Throws if rho
/// is not strictly positive or not stationary.
double conserved_check(const EvolutionTrace& trace, std::span<const double> rho, const PairGenerator& g,
                       std::span<const double> mu);

struct LinearizedKernel {
  Matrix gamma;  // Gamma(t, s)
  Matrix k;      // K = (Gamma + I + 1 mu^T) / 2
  std::vector<double> mu;
};

/// Gamma(t, s) = sum_{s', t'} mu(t')[G(t,t';s,s') + G(t,t';s',s)]. |X| <= 2^10.
LinearizedKernel linearize(const PairGenerator& g, std::span<const double> mu);

/// Max |row sum - 1| and max |K(t,s)mu(t) - K(s,t)mu(s)|.
struct KernelDiagnostics {
  double row_sum_error = 0.0;
  double reversibility_error = 0.0;
};
KernelDiagnostics diagnose(const LinearizedKernel& k);

/// Orthonormal family in L^2(mu): the constant function first, then the conserved quantities.
class ConservedBasis {
 public:
  /// Gram-Schmidt on {1} followed by `functions`; near-dependent vectors are dropped.
  ConservedBasis(std::span<const double> mu, const std::vector<std::vector<double>>& functions);

  /// Constants plus all single-site functions (the recombination invariants).
  static ConservedBasis single_site(const ProductSpace& space, std::span<const double> mu);

  const std::vector<std::vector<double>>& vectors() const { return vectors_; }
  std::size_t size() const { return vectors_.size(); }

  /// phi minus its L^2(mu) projection onto the span.
  std::vector<double> project_out(std::span<const double> phi) const;

 private:
  std::vector<double> mu_;
  std::vector<std::vector<double>> vectors_;
};

struct SpectrumReport {
  std::vector<double> eigenvalues;  // decreasing
  int multiplicity_one = 0;
  int multiplicity_half = 0;
  /// Largest |K v - lambda v| in L^2(mu) over the basis (lambda = 1 or 1/2).
  double basis_residual = 0.0;
  /// Largest eigenvalue on the L^2(mu) complement of the basis.
  double complement_max = 0.0;
};

SpectrumReport spectrum(const LinearizedKernel& k, const ConservedBasis& basis, double tolerance = 1e-8);

}  // namespace recomb
