#include "recomb/rqs.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "recomb/entropy.hpp"
#include "recomb/summation.hpp"

#include <omp.h>

namespace recomb {

namespace {

bool target_less(const Transition& a, const Transition& b) {
  return a.first != b.first ? a.first < b.first : a.second < b.second;
}

void check_reference(const PairGenerator& g, std::span<const double> mu) {
  if (mu.size() != g.space().size()) throw InvalidArgument("reference measure size mismatch");
}

void check_positive(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!(x > 0.0)) throw InvalidArgument(std::string(what) + " must be strictly positive");
  }
}

// G(s,s2;t,t2) for off-diagonal targets, looked up in a sorted row.
double lookup(const std::vector<Transition>& row, std::size_t t, std::size_t t2) {
  const Transition key{t, t2, 0.0};
  const auto it = std::lower_bound(row.begin(), row.end(), key, target_less);
  return (it != row.end() && it->first == t && it->second == t2) ? it->rate : 0.0;
}

}  // namespace

PairGenerator::PairGenerator(const ProductSpace& space, TransitionOracle oracle, std::string name)
    : space_(space), oracle_(std::move(oracle)), name_(std::move(name)) {
  if (!oracle_) throw InvalidArgument("pair generator needs a transition oracle");
}

void PairGenerator::transitions(std::size_t s, std::size_t s2, std::vector<Transition>& out) const {
  out.clear();
  const std::size_t n = space_.size();
  if (s >= n || s2 >= n) throw InvalidArgument("pair index out of range");
  if (compiled()) {
    const std::size_t r = s * n + s2;
    out.assign(table_.begin() + static_cast<std::ptrdiff_t>(row_start_[r]),
               table_.begin() + static_cast<std::ptrdiff_t>(row_start_[r + 1]));
    return;
  }
  oracle_(s, s2, out);
  std::sort(out.begin(), out.end(), target_less);
  std::size_t w = 0;
  for (std::size_t i = 0; i < out.size();) {
    Transition acc = out[i];
    std::size_t j = i + 1;
    for (; j < out.size() && out[j].first == acc.first && out[j].second == acc.second; ++j) acc.rate += out[j].rate;
    i = j;
    if (acc.first == s && acc.second == s2) continue;
    if (acc.rate < 0.0) throw InvalidArgument("generator " + name_ + " has a negative off-diagonal rate");
    if (acc.rate > 0.0) out[w++] = acc;
  }
  out.resize(w);
}

std::vector<Transition> PairGenerator::transitions(std::size_t s, std::size_t s2) const {
  std::vector<Transition> out;
  transitions(s, s2, out);
  return out;
}

double PairGenerator::exit_rate(std::size_t s, std::size_t s2) const {
  double total = 0.0;
  for (const auto& t : transitions(s, s2)) total += t.rate;
  return total;
}

double PairGenerator::rate(std::size_t s, std::size_t s2, std::size_t t, std::size_t t2) const {
  if (s == t && s2 == t2) return -exit_rate(s, s2);
  return lookup(transitions(s, s2), t, t2);
}

bool PairGenerator::compile(std::size_t max_transitions) {
  if (compiled()) return true;
  const std::size_t n = space_.size();
  std::vector<std::size_t> start{0};
  std::vector<Transition> table, row;
  start.reserve(n * n + 1);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t s2 = 0; s2 < n; ++s2) {
      transitions(s, s2, row);
      if (table.size() + row.size() > max_transitions) return false;
      table.insert(table.end(), row.begin(), row.end());
      start.push_back(table.size());
    }
  }
  row_start_ = std::move(start);
  table_ = std::move(table);
  return true;
}

PairGenerator make_recombination_generator(const CrossoverLaw& nu, const ProductSpace& space) {
  if (nu.sites() != space.sites()) throw InvalidArgument("crossover law and space disagree on n");
  auto support = nu.support();
  return PairGenerator(
      space,
      [space, support = std::move(support)](std::size_t s, std::size_t s2, std::vector<Transition>& out) {
        for (const auto& e : support) {
          const auto [t, t2] = recombine_index(space, s, s2, e.subset);
          out.push_back({t, t2, e.weight});
        }
      },
      "recombination/" + nu.name());
}

PairGenerator make_linear_pair_generator(const ProductSpace& space, ChainOracle chain, std::string name) {
  return PairGenerator(
      space,
      [chain = std::move(chain)](std::size_t s, std::size_t s2, std::vector<Transition>& out) {
        std::vector<std::pair<std::size_t, double>> moves;
        chain(s, moves);
        for (const auto& [t, r] : moves) out.push_back({t, s2, r});
        moves.clear();
        chain(s2, moves);
        for (const auto& [t2, r] : moves) out.push_back({s, t2, r});
      },
      std::move(name));
}

PairGenerator sum_generators(const PairGenerator& a, const PairGenerator& b) {
  if (!(a.space() == b.space())) throw InvalidArgument("generators live on different spaces");
  return PairGenerator(
      a.space(),
      [a, b](std::size_t s, std::size_t s2, std::vector<Transition>& out) {
        std::vector<Transition> row;
        a.transitions(s, s2, row);
        out.insert(out.end(), row.begin(), row.end());
        b.transitions(s, s2, row);
        out.insert(out.end(), row.begin(), row.end());
      },
      a.name() + "+" + b.name());
}

PairGenerator symmetrize(const PairGenerator& g) {
  return PairGenerator(
      g.space(),
      [g](std::size_t t, std::size_t t2, std::vector<Transition>& out) {
        std::vector<Transition> row;
        g.transitions(t, t2, row);
        for (const auto& x : row) {
          const bool swapped = x.first == t2 && x.second == t;
          out.push_back({x.first, x.second, swapped ? x.rate : 0.5 * x.rate});
        }
        if (t == t2) {
          for (const auto& x : row) out.push_back({x.first, x.second, 0.5 * x.rate});
          return;
        }
        g.transitions(t2, t, row);
        for (const auto& x : row) {
          if (x.first == t && x.second == t2) continue;
          out.push_back({x.first, x.second, 0.5 * x.rate});
        }
      },
      g.name() + "/sym");
}

IdentityCheck check_reversibility(const PairGenerator& g, std::span<const double> mu) {
  check_reference(g, mu);
  const std::size_t n = g.space().size();
  IdentityCheck worst;
  std::vector<Transition> row, back;
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t s2 = 0; s2 < n; ++s2) {
      g.transitions(s, s2, row);
      for (const auto& x : row) {
        g.transitions(x.first, x.second, back);
        const double lhs = mu[s] * mu[s2] * x.rate;
        const double rhs = mu[x.first] * mu[x.second] * lookup(back, s, s2);
        const double v = std::abs(lhs - rhs);
        if (v > worst.max_violation) worst = {v, s, s2, x.first, x.second};
      }
    }
  }
  return worst;
}

IdentityCheck check_pair_symmetry(const PairGenerator& g) {
  const std::size_t n = g.space().size();
  IdentityCheck worst;
  std::vector<Transition> row, mirror;
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t s2 = 0; s2 < n; ++s2) {
      g.transitions(s, s2, row);
      g.transitions(s2, s, mirror);
      for (const auto& x : row) {
        const double v = std::abs(x.rate - lookup(mirror, x.second, x.first));
        if (v > worst.max_violation) worst = {v, s, s2, x.first, x.second};
      }
      for (const auto& x : mirror) {
        const double v = std::abs(x.rate - lookup(row, x.second, x.first));
        if (v > worst.max_violation) worst = {v, s2, s, x.first, x.second};
      }
    }
  }
  return worst;
}

IdentityCheck check_target_symmetry(const PairGenerator& g) {
  const std::size_t n = g.space().size();
  IdentityCheck worst;
  std::vector<Transition> row, other;
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t t2 = 0; t2 < n; ++t2) {
      g.transitions(t, t2, row);
      g.transitions(t2, t, other);
      auto special = [&](const Transition& x) {
        return (x.first == t && x.second == t2) || (x.first == t2 && x.second == t);
      };
      for (const auto& x : row) {
        if (special(x)) continue;
        const double v = std::abs(x.rate - lookup(other, x.first, x.second));
        if (v > worst.max_violation) worst = {v, t, t2, x.first, x.second};
      }
      for (const auto& x : other) {
        if (special(x)) continue;
        const double v = std::abs(x.rate - lookup(row, x.first, x.second));
        if (v > worst.max_violation) worst = {v, t2, t, x.first, x.second};
      }
    }
  }
  return worst;
}

double max_row_sum(const PairGenerator& g) {
  const std::size_t n = g.space().size();
  double worst = 0.0;
  std::vector<Transition> row;
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t s2 = 0; s2 < n; ++s2) {
      g.transitions(s, s2, row);
      CompensatedSum sum;
      double exit = 0.0;
      for (const auto& x : row) {
        sum.add(x.rate);
        exit += x.rate;
      }
      sum.add(-exit);
      worst = std::max(worst, std::abs(sum.value()));
    }
  }
  return worst;
}

std::vector<double> phi(std::span<const double> p, const PairGenerator& g) {
  check_reference(g, p);
  const std::size_t n = g.space().size();
  std::vector<double> out(n * n, 0.0);
  std::vector<Transition> row;
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t s2 = 0; s2 < n; ++s2) {
      const double w = p[s] * p[s2];
      if (w == 0.0) continue;
      g.transitions(s, s2, row);
      for (const auto& x : row) {
        out[x.first * n + x.second] += w * x.rate;
        out[s * n + s2] -= w * x.rate;
      }
    }
  }
  return out;
}

std::vector<double> drift(std::span<const double> p, const PairGenerator& g) {
  check_reference(g, p);
  const std::size_t n = g.space().size();
  const auto rows = static_cast<std::ptrdiff_t>(n);
  std::vector<std::vector<double>> partial;
#pragma omp parallel if (n * n > 4096)
  {
#pragma omp single
    partial.assign(static_cast<std::size_t>(omp_get_num_threads()), std::vector<double>(n, 0.0));
    auto& local = partial[static_cast<std::size_t>(omp_get_thread_num())];
    std::vector<Transition> row;
#pragma omp for schedule(static)
    for (std::ptrdiff_t si = 0; si < rows; ++si) {
      const auto s = static_cast<std::size_t>(si);
      for (std::size_t s2 = 0; s2 < n; ++s2) {
        const double w = p[s] * p[s2];
        if (w == 0.0) continue;
        g.transitions(s, s2, row);
        for (const auto& x : row) {
          local[x.first] += w * x.rate;
          local[s] -= w * x.rate;
        }
      }
    }
  }
  std::vector<double> out(n, 0.0);
  for (const auto& local : partial) {
    for (std::size_t i = 0; i < n; ++i) out[i] += local[i];
  }
  return out;
}

double entropy_production(std::span<const double> f, std::span<const double> g, const PairGenerator& gen,
                          std::span<const double> mu) {
  check_reference(gen, mu);
  check_reference(gen, f);
  check_reference(gen, g);
  check_positive(g, "the logarithm argument g");
  const std::size_t n = gen.space().size();
  std::vector<double> logg(n);
  for (std::size_t i = 0; i < n; ++i) logg[i] = std::log(g[i]);
  std::vector<double> partial(n, 0.0);
  const auto rows = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel if (n * n > 4096)
  {
    std::vector<Transition> row;
#pragma omp for schedule(dynamic, 4)
    for (std::ptrdiff_t ti = 0; ti < rows; ++ti) {
      const auto t = static_cast<std::size_t>(ti);
      CompensatedSum acc;
      for (std::size_t t2 = 0; t2 < n; ++t2) {
        const double m = mu[t] * mu[t2];
        if (m == 0.0) continue;
        gen.transitions(t, t2, row);
        const double ft = f[t] * f[t2];
        const double lt = logg[t] + logg[t2];
        for (const auto& x : row) {
          acc.add(m * x.rate * (f[x.first] * f[x.second] - ft) * (logg[x.first] + logg[x.second] - lt));
        }
      }
      partial[t] = acc.value();
    }
  }
  return 0.25 * compensated_sum(partial);
}

double recombination_entropy_production(const Density& f, const CrossoverLaw& nu, const ProductMeasure& mu) {
  const auto& space = mu.space();
  if (f.size() != space.size()) throw InvalidArgument("density size mismatch");
  if (!f.strictly_positive()) throw InvalidArgument("recombination entropy production needs f > 0");
  std::vector<double> logf(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) logf[i] = std::log(f[i]);
  CompensatedSum cross;
  for (const auto& e : nu.support()) {
    const SiteSubset ac = e.subset.complement(space.sites());
    const auto fa = marginal_density(f, e.subset, mu).values;
    const auto fc = marginal_density(f, ac, mu).values;
    const auto emb_a = space.embedding(e.subset);
    const auto emb_c = space.embedding(ac);
    CompensatedSum term;
    for (std::size_t a = 0; a < emb_a.size(); ++a) {
      for (std::size_t c = 0; c < emb_c.size(); ++c) {
        const std::size_t idx = emb_a[a] + emb_c[c];
        term.add(mu[idx] * fa[a] * fc[c] * logf[idx]);
      }
    }
    cross.add(e.weight * term.value());
  }
  return ent(f, mu) - cross.value();
}

StationarityReport is_stationary(std::span<const double> p, const PairGenerator& g, std::span<const double> mu,
                                 double tolerance) {
  check_reference(g, p);
  check_reference(g, mu);
  check_positive(mu, "the reference measure");
  const std::size_t n = g.space().size();
  std::vector<double> f(n);
  for (std::size_t i = 0; i < n; ++i) f[i] = p[i] / mu[i];
  StationarityReport rep;
  std::vector<Transition> row;
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t t2 = 0; t2 < n; ++t2) {
      g.transitions(t, t2, row);
      const double ft = f[t] * f[t2];
      for (const auto& x : row) {
        const double fs = f[x.first] * f[x.second];
        const double v = std::abs(fs - ft) / std::max({1.0, fs, ft});
        if (v > rep.max_violation) {
          rep.max_violation = v;
          rep.t = t;
          rep.t2 = t2;
          rep.s = x.first;
          rep.s2 = x.second;
        }
      }
    }
  }
  rep.stationary = rep.max_violation <= tolerance;
  return rep;
}

EvolutionTrace evolve_rqs(const Distribution& p0, const PairGenerator& g, std::span<const double> mu,
                          const EvolutionOptions& options) {
  if (!(p0.space() == g.space())) throw InvalidArgument("distribution and generator spaces differ");
  check_reference(g, mu);
  PairGenerator local = g;
  local.compile();
  return integrate_rk4(
      p0,
      [&local](std::span<const double> p, std::span<double> out) {
        const auto d = drift(p, local);
        std::copy(d.begin(), d.end(), out.begin());
      },
      mu, options);
}

double conserved_check(const EvolutionTrace& trace, std::span<const double> rho, const PairGenerator& g,
                       std::span<const double> mu) {
  check_reference(g, rho);
  check_positive(rho, "the stationary state");
  const auto rep = is_stationary(rho, g, mu);
  if (!rep.stationary) throw InvalidArgument("conserved_check needs a stationary rho");
  std::vector<double> psi(rho.size());
  for (std::size_t i = 0; i < psi.size(); ++i) psi[i] = std::log(rho[i] / mu[i]);
  double base = 0.0, worst = 0.0;
  for (std::size_t k = 0; k < trace.states.size(); ++k) {
    const double v = mass(trace.states[k].weights(), psi);
    if (k == 0) base = v;
    worst = std::max(worst, std::abs(v - base));
  }
  return worst;
}

LinearizedKernel linearize(const PairGenerator& g, std::span<const double> mu) {
  check_reference(g, mu);
  const std::size_t n = g.space().size();
  if (n > kSpectralCap) throw CapExceeded("linearized kernel limited to 2^10 states");
  LinearizedKernel out{Matrix(n, n), Matrix(n, n), std::vector<double>(mu.begin(), mu.end())};
  std::vector<Transition> row;
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t t2 = 0; t2 < n; ++t2) {
      g.transitions(t, t2, row);
      double exit = 0.0;
      for (const auto& x : row) {
        out.gamma(t, x.first) += mu[t2] * x.rate;
        out.gamma(t, x.second) += mu[t2] * x.rate;
        exit += x.rate;
      }
      out.gamma(t, t) -= mu[t2] * exit;
      out.gamma(t, t2) -= mu[t2] * exit;
    }
  }
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t s = 0; s < n; ++s) {
      out.k(t, s) = 0.5 * (out.gamma(t, s) + (t == s ? 1.0 : 0.0) + mu[s]);
    }
  }
  return out;
}

KernelDiagnostics diagnose(const LinearizedKernel& k) {
  const std::size_t n = k.mu.size();
  KernelDiagnostics d;
  for (std::size_t t = 0; t < n; ++t) {
    CompensatedSum row;
    for (std::size_t s = 0; s < n; ++s) {
      row.add(k.k(t, s));
      d.reversibility_error =
          std::max(d.reversibility_error, std::abs(k.k(t, s) * k.mu[t] - k.k(s, t) * k.mu[s]));
    }
    d.row_sum_error = std::max(d.row_sum_error, std::abs(row.value() - 1.0));
  }
  return d;
}

ConservedBasis::ConservedBasis(std::span<const double> mu, const std::vector<std::vector<double>>& functions)
    : mu_(mu.begin(), mu.end()) {
  check_positive(mu, "the reference measure");
  auto inner = [&](const std::vector<double>& a, const std::vector<double>& b) {
    CompensatedSum s;
    for (std::size_t i = 0; i < mu_.size(); ++i) s.add(mu_[i] * a[i] * b[i]);
    return s.value();
  };
  std::vector<std::vector<double>> candidates{std::vector<double>(mu_.size(), 1.0)};
  candidates.insert(candidates.end(), functions.begin(), functions.end());
  for (auto v : candidates) {
    if (v.size() != mu_.size()) throw InvalidArgument("basis function size mismatch");
    const double norm0 = std::sqrt(inner(v, v));
    if (norm0 == 0.0) continue;
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : vectors_) {
        const double c = inner(v, b);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * b[i];
      }
    }
    const double norm = std::sqrt(inner(v, v));
    if (norm <= 1e-10 * norm0) continue;
    for (double& x : v) x /= norm;
    vectors_.push_back(std::move(v));
  }
}

ConservedBasis ConservedBasis::single_site(const ProductSpace& space, std::span<const double> mu) {
  std::vector<std::vector<double>> fns;
  for (int i = 0; i < space.sites(); ++i) {
    for (int x = 0; x + 1 < space.alphabet(i); ++x) {
      std::vector<double> v(space.size());
      for (std::size_t idx = 0; idx < v.size(); ++idx) v[idx] = space.digit(idx, i) == x ? 1.0 : 0.0;
      fns.push_back(std::move(v));
    }
  }
  return ConservedBasis(mu, fns);
}

std::vector<double> ConservedBasis::project_out(std::span<const double> phi) const {
  std::vector<double> v(phi.begin(), phi.end());
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& b : vectors_) {
      CompensatedSum c;
      for (std::size_t i = 0; i < v.size(); ++i) c.add(mu_[i] * v[i] * b[i]);
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c.value() * b[i];
    }
  }
  return v;
}

SpectrumReport spectrum(const LinearizedKernel& k, const ConservedBasis& basis, double tolerance) {
  const std::size_t n = k.mu.size();
  const auto diag = diagnose(k);
  if (diag.reversibility_error > 1e-10) throw InvalidArgument("kernel is not reversible for its reference measure");
  std::vector<double> root(n);
  for (std::size_t i = 0; i < n; ++i) root[i] = std::sqrt(k.mu[i]);
  Matrix sym(n, n);
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t s = 0; s < n; ++s) sym(t, s) = root[t] * k.k(t, s) / root[s];
  }
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t s = t + 1; s < n; ++s) {
      const double avg = 0.5 * (sym(t, s) + sym(s, t));
      sym(t, s) = avg;
      sym(s, t) = avg;
    }
  }

  SpectrumReport rep;
  rep.eigenvalues = jacobi_eigen(sym).values;
  for (double v : rep.eigenvalues) {
    if (std::abs(v - 1.0) <= tolerance) ++rep.multiplicity_one;
    if (std::abs(v - 0.5) <= tolerance) ++rep.multiplicity_half;
  }

  // Euclidean images of the basis, then an orthonormal completion.
  std::vector<std::vector<double>> frame;
  for (std::size_t b = 0; b < basis.size(); ++b) {
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = root[i] * basis.vectors()[b][i];
    const auto su = sym * u;
    const double lambda = b == 0 ? 1.0 : 0.5;
    double r = 0.0;
    for (std::size_t i = 0; i < n; ++i) r += (su[i] - lambda * u[i]) * (su[i] - lambda * u[i]);
    rep.basis_residual = std::max(rep.basis_residual, std::sqrt(r));
    frame.push_back(std::move(u));
  }
  const std::size_t fixed = frame.size();
  for (std::size_t e = 0; e < n && frame.size() < n; ++e) {
    std::vector<double> v(n, 0.0);
    v[e] = 1.0;
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& u : frame) {
        double c = 0.0;
        for (std::size_t i = 0; i < n; ++i) c += u[i] * v[i];
        for (std::size_t i = 0; i < n; ++i) v[i] -= c * u[i];
      }
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm < 1e-8) continue;
    for (double& x : v) x /= norm;
    frame.push_back(std::move(v));
  }
  const std::size_t m = frame.size() - fixed;
  if (m == 0) return rep;
  Matrix c(n, m);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < n; ++i) c(i, j) = frame[fixed + j][i];
  }
  Matrix reduced = c.transpose() * (sym * c);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const double avg = 0.5 * (reduced(i, j) + reduced(j, i));
      reduced(i, j) = avg;
      reduced(j, i) = avg;
    }
  }
  rep.complement_max = jacobi_eigen(reduced).values.front();
  return rep;
}

}  // namespace recomb
