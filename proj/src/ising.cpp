#include "recomb/ising.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "recomb/entropy.hpp"
#include "recomb/random.hpp"
#include "recomb/summation.hpp"

namespace recomb {

namespace {

int count_free(int vertices, const std::vector<int>& pins) {
  if (vertices < 1 || vertices > 30) throw InvalidArgument("Ising model needs 1 to 30 vertices");
  if (!pins.empty() && static_cast<int>(pins.size()) != vertices) {
    throw InvalidArgument("pin vector must have one entry per vertex");
  }
  int free = vertices;
  for (int p : pins) {
    if (p != 0 && p != 1 && p != -1) throw InvalidArgument("pins must be 0, +1 or -1");
    if (p != 0) --free;
  }
  if (free == 0) throw InvalidArgument("at least one vertex must stay free");
  return free;
}

double log_sum_exp(const std::vector<double>& xs) {
  const double top = *std::max_element(xs.begin(), xs.end());
  CompensatedSum s;
  for (double x : xs) s.add(std::exp(x - top));
  return top + std::log(s.value());
}

// Bit k of the index is the spin of free site k; the swap set lives on the same bits.
std::uint64_t differing(std::size_t s, std::size_t s2) { return static_cast<std::uint64_t>(s ^ s2); }

}  // namespace

IsingModel::IsingModel(int vertices, std::vector<Edge> edges, double beta, std::vector<double> fields,
                       std::vector<int> pins)
    : n_(vertices),
      edges_(std::move(edges)),
      beta_(beta),
      fields_(std::move(fields)),
      pins_(std::move(pins)),
      space_(ProductSpace::binary(count_free(vertices, pins_))) {
  if (!std::isfinite(beta_)) throw InvalidArgument("beta must be finite");
  if (fields_.empty()) fields_.assign(static_cast<std::size_t>(n_), 0.0);
  if (pins_.empty()) pins_.assign(static_cast<std::size_t>(n_), 0);
  if (static_cast<int>(fields_.size()) != n_) throw InvalidArgument("field vector must have one entry per vertex");
  for (double h : fields_) {
    if (!std::isfinite(h)) throw InvalidArgument("fields must be finite; pin the vertex instead");
  }
  std::set<Edge> seen;
  for (auto [i, j] : edges_) {
    if (i < 0 || j < 0 || i >= n_ || j >= n_ || i == j) throw InvalidArgument("edge endpoints must be distinct vertices");
    if (!seen.insert({std::min(i, j), std::max(i, j)}).second) throw InvalidArgument("duplicate edge");
  }
  std::vector<int> position(static_cast<std::size_t>(n_), -1);
  for (int v = 0; v < n_; ++v) {
    if (pins_[static_cast<std::size_t>(v)] == 0) {
      position[static_cast<std::size_t>(v)] = static_cast<int>(free_.size());
      free_.push_back(v);
      effective_.push_back(fields_[static_cast<std::size_t>(v)]);
    }
  }
  for (auto [i, j] : edges_) {
    const int pi = position[static_cast<std::size_t>(i)];
    const int pj = position[static_cast<std::size_t>(j)];
    if (pi >= 0 && pj >= 0) {
      free_edges_.push_back({pi, pj});
    } else if (pi >= 0) {
      effective_[static_cast<std::size_t>(pi)] += beta_ * pins_[static_cast<std::size_t>(j)];
    } else if (pj >= 0) {
      effective_[static_cast<std::size_t>(pj)] += beta_ * pins_[static_cast<std::size_t>(i)];
    }
  }
}

std::size_t IsingModel::full_index(std::size_t index) const {
  std::size_t out = 0;
  for (int v = 0; v < n_; ++v) {
    if (pins_[static_cast<std::size_t>(v)] > 0) out |= std::size_t{1} << v;
  }
  for (std::size_t k = 0; k < free_.size(); ++k) {
    if ((index >> k) & 1u) out |= std::size_t{1} << free_[k];
  }
  return out;
}

double IsingModel::log_weight(std::size_t index) const {
  double e = 0.0;
  for (auto [i, j] : free_edges_) e += spin(index, i) * spin(index, j);
  double h = 0.0;
  for (std::size_t k = 0; k < effective_.size(); ++k) h += effective_[k] * spin(index, static_cast<int>(k));
  return beta_ * e + h;
}

IsingModel IsingModel::with_fields(std::vector<double> fields) const {
  return IsingModel(n_, edges_, beta_, std::move(fields), pins_);
}

GibbsMeasure gibbs(const IsingModel& model) {
  const auto& space = model.space();
  std::vector<double> logs(space.size());
  for (std::size_t s = 0; s < space.size(); ++s) logs[s] = model.log_weight(s);
  const double log_z = log_sum_exp(logs);
  std::vector<double> w(space.size());
  for (std::size_t s = 0; s < space.size(); ++s) w[s] = std::exp(logs[s] - log_z);
  return GibbsMeasure{model, Distribution::normalized(space, std::move(w)), log_z};
}

double swap_energy(const IsingModel& model, SiteSubset a, std::size_t s, std::size_t s2) {
  double phi = 0.0;
  for (auto [i, j] : model.free_edges()) {
    if (a.contains(i) == a.contains(j)) continue;
    phi += (IsingModel::spin(s, i) - IsingModel::spin(s2, i)) * (IsingModel::spin(s, j) - IsingModel::spin(s2, j));
  }
  return phi;
}

double alpha(const IsingModel& model, SiteSubset a, std::size_t s, std::size_t s2) {
  return 1.0 / (1.0 + std::exp(model.beta() * swap_energy(model, a, s, s2)));
}

double alpha_from_weights(const IsingModel& model, SiteSubset a, std::size_t s, std::size_t s2) {
  const auto [t, t2] = recombine_index(model.space(), s, s2, a);
  const double swapped = model.log_weight(t) + model.log_weight(t2);
  const double kept = model.log_weight(s) + model.log_weight(s2);
  return 1.0 / (1.0 + std::exp(kept - swapped));
}

PairGenerator make_ising_generator(const IsingModel& model, const CrossoverLaw& nu) {
  if (nu.sites() != static_cast<int>(model.free_sites().size())) {
    throw InvalidArgument("crossover law must act on the free vertices");
  }
  const auto support = nu.support();
  return PairGenerator(
      model.space(),
      [model, support](std::size_t s, std::size_t s2, std::vector<Transition>& out) {
        for (const auto& e : support) {
          const auto [t, t2] = recombine_index(model.space(), s, s2, e.subset);
          if (t == s && t2 == s2) continue;
          out.push_back({t, t2, e.weight * alpha(model, e.subset, s, s2)});
        }
      },
      "ising-" + nu.name());
}

PairGenerator make_folding_generator(const IsingModel& model) {
  return PairGenerator(
      model.space(),
      [model](std::size_t s, std::size_t s2, std::vector<Transition>& out) {
        const std::uint64_t flip = differing(s, s2);
        if (flip == 0) return;
        const std::size_t agree = s & ~flip;
        std::vector<std::size_t> firsts;
        std::vector<double> logs;
        // Enumerate every sub-pattern of the disagreement set.
        std::uint64_t sub = flip;
        while (true) {
          const std::size_t t = agree | sub;
          const std::size_t t2 = agree | (flip & ~sub);
          firsts.push_back(t);
          logs.push_back(model.log_weight(t) + model.log_weight(t2));
          if (sub == 0) break;
          sub = (sub - 1) & flip;
        }
        const double log_z = log_sum_exp(logs);
        for (std::size_t k = 0; k < firsts.size(); ++k) {
          const std::size_t t = firsts[k];
          out.push_back({t, agree | (flip & ~(t & flip)), std::exp(logs[k] - log_z)});
        }
      },
      "folding");
}

ChainOracle glauber_chain(const IsingModel& model) {
  return [model](std::size_t s, std::vector<std::pair<std::size_t, double>>& out) {
    const int n = model.space().sites();
    const double here = model.log_weight(s);
    for (int k = 0; k < n; ++k) {
      const std::size_t t = s ^ (std::size_t{1} << k);
      out.push_back({t, 1.0 / (n * (1.0 + std::exp(here - model.log_weight(t))))});
    }
  };
}

Matrix glauber_kernel(const IsingModel& model) {
  const std::size_t size = model.space().size();
  if (size > kSpectralCap) throw CapExceeded("dense Glauber kernel is limited to 2^10 states");
  Matrix w(size, size);
  const auto chain = glauber_chain(model);
  std::vector<std::pair<std::size_t, double>> moves;
  for (std::size_t s = 0; s < size; ++s) {
    moves.clear();
    chain(s, moves);
    double stay = 1.0;
    for (const auto& [t, r] : moves) {
      w(s, t) += r;
      stay -= r;
    }
    w(s, s) += stay;
  }
  return w;
}

PairGenerator make_dissipative_generator(const IsingModel& model, const CrossoverLaw& nu) {
  return sum_generators(make_ising_generator(model, nu),
                        make_linear_pair_generator(model.space(), glauber_chain(model), "glauber"));
}

std::vector<double> plus_marginals(std::span<const double> p, const ProductSpace& space) {
  if (p.size() != space.size()) throw InvalidArgument("distribution size mismatch");
  std::vector<double> m(static_cast<std::size_t>(space.sites()), 0.0);
  for (int k = 0; k < space.sites(); ++k) {
    CompensatedSum s;
    for (std::size_t x = 0; x < p.size(); ++x) {
      if (space.digit(x, k) == 1) s.add(p[x]);
    }
    m[static_cast<std::size_t>(k)] = s.value();
  }
  return m;
}

FieldFit fit_fields(const IsingModel& model, const std::vector<double>& targets, double tolerance, int max_sweeps) {
  const auto& free = model.free_sites();
  if (targets.size() != free.size()) throw InvalidArgument("one target marginal per free vertex");
  for (double t : targets) {
    if (!(t > 0.0 && t < 1.0)) throw InvalidArgument("target marginals must lie strictly inside (0, 1)");
  }
  std::vector<double> h = model.fields();
  auto marginal = [&](std::size_t k, double value) {
    h[static_cast<std::size_t>(free[k])] = value;
    const auto g = gibbs(model.with_fields(h));
    return plus_marginals(g.distribution.weights(), model.space())[k];
  };
  FieldFit fit{model, 0.0, 0};
  for (fit.sweeps = 0; fit.sweeps < max_sweeps; ++fit.sweeps) {
    const auto current = plus_marginals(gibbs(model.with_fields(h)).distribution.weights(), model.space());
    double err = 0.0;
    for (std::size_t k = 0; k < free.size(); ++k) err = std::max(err, std::abs(current[k] - targets[k]));
    fit.marginal_error = err;
    if (err <= tolerance) break;
    for (std::size_t k = 0; k < free.size(); ++k) {
      // Each marginal is strictly increasing in its own field.
      const double start = h[static_cast<std::size_t>(free[k])];
      double lo = start - 1.0, hi = start + 1.0;
      while (marginal(k, lo) > targets[k] && lo > -700.0) lo = start - 2.0 * (start - lo);
      while (marginal(k, hi) < targets[k] && hi < 700.0) hi = start + 2.0 * (hi - start);
      for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        (marginal(k, mid) < targets[k] ? lo : hi) = mid;
      }
      h[static_cast<std::size_t>(free[k])] = 0.5 * (lo + hi);
    }
  }
  fit.model = model.with_fields(h);
  return fit;
}

FixedPoint find_fixed_point(const Distribution& start, const PairGenerator& g, const FixedPointOptions& options) {
  if (!(start.space() == g.space())) throw InvalidArgument("start lives on a different space");
  PairGenerator local = g;
  local.compile();
  FixedPoint fp;
  fp.p = start.vector();
  for (fp.iterations = 0;; ++fp.iterations) {
    const auto d = drift(fp.p, local);
    fp.drift_l1 = 0.0;
    for (double x : d) fp.drift_l1 += std::abs(x);
    if (fp.drift_l1 <= options.tolerance) return fp;
    if (fp.iterations >= options.max_iterations) {
      throw ConvergenceError("fixed-point iteration did not reach its drift tolerance", fp.drift_l1);
    }
    for (std::size_t i = 0; i < fp.p.size(); ++i) fp.p[i] = std::max(0.0, fp.p[i] + options.step * d[i]);
  }
}

IsingFormCheck check_ising_form(const IsingModel& model, std::span<const double> p, double tolerance) {
  const auto& space = model.space();
  if (p.size() != space.size()) throw InvalidArgument("distribution size mismatch");
  const auto m = plus_marginals(p, space);
  const auto& free = model.free_sites();
  IsingFormCheck out;
  out.pins = model.pins();
  out.fields.assign(static_cast<std::size_t>(model.vertices()), 0.0);
  std::vector<double> targets;
  constexpr double kDegenerate = 1e-12;
  for (std::size_t k = 0; k < free.size(); ++k) {
    const auto v = static_cast<std::size_t>(free[k]);
    if (m[k] <= kDegenerate) {
      out.pins[v] = -1;
    } else if (m[k] >= 1.0 - kDegenerate) {
      out.pins[v] = 1;
    } else {
      targets.push_back(m[k]);
    }
  }
  // Candidate measure on the model's space: zero off the pinned face.
  std::vector<double> q(space.size(), 0.0);
  if (targets.empty()) {
    std::size_t corner = 0;
    for (std::size_t k = 0; k < free.size(); ++k) {
      if (out.pins[static_cast<std::size_t>(free[k])] > 0) corner |= std::size_t{1} << k;
    }
    q[corner] = 1.0;
  } else {
    const IsingModel pinned(model.vertices(), model.edges(), model.beta(), model.fields(), out.pins);
    const auto fit = fit_fields(pinned, targets);
    for (int v : pinned.free_sites()) out.fields[static_cast<std::size_t>(v)] = fit.model.fields()[static_cast<std::size_t>(v)];
    const auto g = gibbs(fit.model);
    std::vector<std::size_t> slot(std::size_t{1} << model.vertices(), 0);
    for (std::size_t x = 0; x < space.size(); ++x) slot[model.full_index(x)] = x;
    for (std::size_t r = 0; r < fit.model.space().size(); ++r) q[slot[fit.model.full_index(r)]] = g.distribution[r];
  }
  for (std::size_t x = 0; x < space.size(); ++x) out.deviation = std::max(out.deviation, std::abs(p[x] - q[x]));
  out.ising_form = out.deviation <= tolerance;
  return out;
}

StationaryScan stationary_structure_scan(const IsingModel& model, const std::vector<Distribution>& starts,
                                         int random_starts, std::uint64_t seed, const FixedPointOptions& options) {
  for (int pin : model.pins()) {
    if (pin != 0) throw InvalidArgument("stationary scan expects a model without pinned vertices");
  }
  if (model.vertices() > 4) throw InvalidArgument("stationary scan is limited to n <= 4");
  auto g = make_ising_generator(model, CrossoverLaw::single_site(model.vertices()));
  g.compile();
  std::vector<Distribution> all = starts;
  for (int i = 0; i < random_starts; ++i) {
    std::mt19937_64 rng(derive_seed(seed, "stationary_scan", static_cast<std::uint64_t>(i)));
    all.push_back(random_distribution(model.space(), rng));
  }
  StationaryScan scan;
  scan.entries.resize(all.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < all.size(); ++i) {
    auto fp = find_fixed_point(all[i], g, options);
    auto form = check_ising_form(model, fp.p);
    scan.entries[i] = {std::move(fp), std::move(form)};
  }
  for (const auto& e : scan.entries) {
    scan.max_deviation = std::max(scan.max_deviation, e.form.deviation);
    scan.all_ising_form = scan.all_ising_form && e.form.ising_form;
  }
  return scan;
}

LogSobolevEvidence log_sobolev_evidence(const IsingModel& model, int samples, std::uint64_t seed) {
  if (samples < 1) throw InvalidArgument("need at least one sample");
  const int n = model.space().sites();
  const auto mu = gibbs(model).distribution;
  auto g = make_ising_generator(model, CrossoverLaw::single_site(n));
  g.compile();
  std::vector<std::vector<double>> targets;
  for (int k = 0; k < n; ++k) targets.push_back(mu.site_marginal(k));
  std::vector<double> ratios(static_cast<std::size_t>(samples));
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < samples; ++i) {
    std::mt19937_64 rng(derive_seed(seed, "log-sobolev", static_cast<std::uint64_t>(i)));
    auto q = ipf_fit_weights(model.space(), sample_dirichlet(mu.size(), 1.0, rng), targets);
    std::vector<double> f(q.size());
    for (std::size_t x = 0; x < f.size(); ++x) f[x] = std::max(q[x], 1e-300) / mu[x];
    const double e = ent(f, mu.weights());
    ratios[static_cast<std::size_t>(i)] = n * entropy_production(f, f, g, mu.weights()) / e;
  }
  LogSobolevEvidence out;
  out.samples = samples;
  out.min_scaled_ratio = *std::min_element(ratios.begin(), ratios.end());
  out.mean_scaled_ratio = compensated_sum(ratios) / samples;
  return out;
}

}  // namespace recomb
