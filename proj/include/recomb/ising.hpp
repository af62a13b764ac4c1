#pragma once

// Nonlinear stochastic Ising dynamics on a finite graph.
//
// Spins live on the binary product space with digit 1 read as +1 and digit 0
// as -1. The Gibbs weight is exp(beta sum_{ij in E} s_i s_j + sum_i h_i s_i).
// Pinned vertices (infinite fields) are removed from the state space; their
// spins enter the remaining vertices as extra field beta * pin.

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "recomb/crossover.hpp"
#include "recomb/jacobi.hpp"
#include "recomb/product_space.hpp"
#include "recomb/rqs.hpp"

namespace recomb {

using Edge = std::pair<int, int>;

class IsingModel {
 public:
  /// `fields` defaults to zeros; `pins[i]` is 0 (free), +1 or -1.
  IsingModel(int vertices, std::vector<Edge> edges, double beta, std::vector<double> fields = {},
             std::vector<int> pins = {});

  int vertices() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }
  double beta() const { return beta_; }
  const std::vector<double>& fields() const { return fields_; }
  const std::vector<int>& pins() const { return pins_; }

  /// Vertices that remain dynamic, in increasing order. Site k of space() is free_sites()[k].
  const std::vector<int>& free_sites() const { return free_; }
  const ProductSpace& space() const { return space_; }
  /// Edges between free vertices, in site positions of space().
  const std::vector<Edge>& free_edges() const { return free_edges_; }
  /// Fields on the free vertices including the pull of pinned neighbours.
  const std::vector<double>& effective_fields() const { return effective_; }

  /// Spin (+1 or -1) of free site k in the restricted configuration `index`.
  static int spin(std::size_t index, int k) { return ((index >> k) & 1u) ? 1 : -1; }
  /// Index of the full configuration (pinned spins filled in) on {-1,+1}^vertices.
  std::size_t full_index(std::size_t index) const;

  /// log of the unnormalized Gibbs weight of a restricted configuration.
  double log_weight(std::size_t index) const;

  IsingModel with_fields(std::vector<double> fields) const;

 private:
  int n_;
  std::vector<Edge> edges_;
  double beta_;
  std::vector<double> fields_;
  std::vector<int> pins_;
  std::vector<int> free_;
  std::vector<Edge> free_edges_;
  std::vector<double> effective_;
  ProductSpace space_;
};

struct GibbsMeasure {
  IsingModel model;
  Distribution distribution;
  double log_partition = 0.0;
};

/// Gibbs measure on the restricted space, weights formed in the log domain.
GibbsMeasure gibbs(const IsingModel& model);

/// phi_A(s, s') = sum over edges ij with i in A, j not in A of (s_i - s'_i)(s_j - s'_j).
double swap_energy(const IsingModel& model, SiteSubset a, std::size_t s, std::size_t s2);

/// Acceptance 1 / (1 + exp(beta phi_A)). Depends on the graph and beta only.
double alpha(const IsingModel& model, SiteSubset a, std::size_t s, std::size_t s2);

/// The same acceptance written as a conditional pair probability of the Gibbs weights.
double alpha_from_weights(const IsingModel& model, SiteSubset a, std::size_t s, std::size_t s2);

/// G = sum_A nu(A) Q_A - 1: swap A with probability alpha_A, else stay.
PairGenerator make_ising_generator(const IsingModel& model, const CrossoverLaw& nu);

/// Folding kernel: coordinates where the pair disagrees are redrawn as mirrored
/// pairs with probability proportional to the product of Gibbs weights.
PairGenerator make_folding_generator(const IsingModel& model);

/// Heat-bath single spin flips: rate (1/n) mu(s^i) / (mu(s) + mu(s^i)) to s^i.
ChainOracle glauber_chain(const IsingModel& model);

/// Dense Markov kernel of the heat-bath chain (diagonal included).
Matrix glauber_kernel(const IsingModel& model);

/// Ising generator plus independent heat-bath moves on both coordinates.
PairGenerator make_dissipative_generator(const IsingModel& model, const CrossoverLaw& nu);

struct FieldFit {
  IsingModel model;
  /// Largest |mu'(s_k = +1) - target_k| after fitting.
  double marginal_error = 0.0;
  int sweeps = 0;
};

/// Coordinate-wise bisection on the free-vertex fields so the Gibbs marginals
/// P(s_k = +1) match `plus_marginals` (one per free site, each in (0, 1)).
FieldFit fit_fields(const IsingModel& model, const std::vector<double>& plus_marginals,
                    double tolerance = 1e-13, int max_sweeps = 10000);

/// P(s_k = +1) for each site of the space.
std::vector<double> plus_marginals(std::span<const double> p, const ProductSpace& space);

struct FixedPointOptions {
  double step = 0.5;
  double tolerance = 1e-12;  // on ||drift||_1
  int max_iterations = 1000000;
};

struct FixedPoint {
  std::vector<double> p;
  int iterations = 0;
  double drift_l1 = 0.0;
};

/// Damped iteration p <- p + step * drift(p) until ||drift||_1 <= tolerance.
FixedPoint find_fixed_point(const Distribution& start, const PairGenerator& g, const FixedPointOptions& options = {});

struct IsingFormCheck {
  bool ising_form = false;
  /// Largest |p - Gibbs(fitted)| over all configurations.
  double deviation = 0.0;
  std::vector<int> pins;  // per vertex: 0, +1 or -1
  std::vector<double> fields;  // fitted fields on the free vertices, 0 on pinned ones
};

/// Decides whether p (on the model's space) is an Ising measure for the same
/// graph and beta with some fields, allowing infinite fields on vertices whose
/// marginal is degenerate.
IsingFormCheck check_ising_form(const IsingModel& model, std::span<const double> p, double tolerance = 1e-8);

struct StationaryScanEntry {
  FixedPoint fixed_point;
  IsingFormCheck form;
};

struct StationaryScan {
  std::vector<StationaryScanEntry> entries;
  double max_deviation = 0.0;
  bool all_ising_form = true;
};

/// Fixed points of the single-site Ising dynamics from the given starts,
/// followed by `random_starts` Dirichlet starts, each tested for Ising form.
/// The model must have no pinned vertices.
StationaryScan stationary_structure_scan(const IsingModel& model, const std::vector<Distribution>& starts,
                                         int random_starts, std::uint64_t seed,
                                         const FixedPointOptions& options = {});

struct LogSobolevEvidence {
  double min_scaled_ratio = 0.0;  // min of n D(f,f) / Ent(f)
  double mean_scaled_ratio = 0.0;
  int samples = 0;
};

/// n D(f, f) / Ent(f) over random f with f mu sharing mu's single-site
/// marginals, for the single-site Ising dynamics. Reported, not asserted.
LogSobolevEvidence log_sobolev_evidence(const IsingModel& model, int samples, std::uint64_t seed);

}  // namespace recomb
