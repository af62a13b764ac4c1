#include "recomb/inequality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "recomb/dynamics.hpp"
#include "recomb/entropy.hpp"
#include "recomb/random.hpp"
#include "recomb/summation.hpp"

namespace recomb {

namespace {

void check_exhaustive(int n, const char* what) {
  if (n < 2 || n > kExhaustiveSubsetSites) {
    throw InvalidArgument(std::string(what) + " enumerates all subsets and needs 2 <= n <= 6");
  }
}

double singleton_sum(const std::vector<double>& profile, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += -profile[std::uint64_t{1} << i];
  return s;
}

bool identical_sites(const ProductMeasure& mu) {
  const auto& sites = mu.sites();
  return std::all_of(sites.begin(), sites.end(), [&](const auto& s) { return s == sites.front(); });
}

}  // namespace

SubmodularityReport check_submodular(const Density& f, const ProductMeasure& mu, double tolerance,
                                     std::size_t sampled_pairs, std::uint64_t seed) {
  const int n = mu.space().sites();
  SubmodularityReport report;
  report.worst_slack = std::numeric_limits<double>::infinity();
  auto visit = [&](SiteSubset a, SiteSubset b, double ha, double hb, double hi, double hu) {
    const double slack = ha + hb - hi - hu;
    ++report.pairs_checked;
    if (slack < report.worst_slack) {
      report.worst_slack = slack;
      report.a = a;
      report.b = b;
    }
  };
  if (n <= kExhaustiveSubsetSites) {
    const auto profile = entropy_profile(f, mu);
    const std::uint64_t count = std::uint64_t{1} << n;
    for (std::uint64_t x = 0; x < count; ++x) {
      for (std::uint64_t y = x + 1; y < count; ++y) {
        visit(SiteSubset{x}, SiteSubset{y}, -profile[x], -profile[y], -profile[x & y], -profile[x | y]);
      }
    }
  } else {
    std::mt19937_64 rng(derive_seed(seed, "submodular"));
    std::uniform_int_distribution<std::uint64_t> pick(0, (std::uint64_t{1} << n) - 1);
    for (std::size_t i = 0; i < sampled_pairs; ++i) {
      const SiteSubset a{pick(rng)};
      const SiteSubset b{pick(rng)};
      visit(a, b, -marginal_entropy(f, a, mu), -marginal_entropy(f, b, mu), -marginal_entropy(f, a & b, mu),
            -marginal_entropy(f, a | b, mu));
    }
  }
  if (report.pairs_checked == 0) report.worst_slack = 0.0;
  report.holds = report.worst_slack >= -tolerance;
  return report;
}

ShearerBound shearer_bound(const Density& f, const std::vector<SiteSubset>& cover, const ProductMeasure& mu) {
  const int n = mu.space().sites();
  const SiteSubset all = SiteSubset::full(n);
  std::vector<int> degree(static_cast<std::size_t>(n), 0);
  CompensatedSum lhs;
  for (const auto& a : cover) {
    if (!a.is_subset_of(all)) throw InvalidArgument("cover member outside the site set");
    for (int i : a.sites()) ++degree[static_cast<std::size_t>(i)];
    lhs.add(marginal_entropy(f, a, mu));
  }
  ShearerBound out;
  out.max_degree = n > 0 ? *std::max_element(degree.begin(), degree.end()) : 0;
  out.min_degree = n > 0 ? *std::min_element(degree.begin(), degree.end()) : 0;
  out.lhs = lhs.value();
  out.rhs = out.max_degree * ent(f, mu);
  out.slack = out.rhs - out.lhs;
  return out;
}

std::vector<SiteSubset> k_set_cover(int n, int k) {
  if (n < 1 || n > kMaxSites || k < 0 || k > n) throw InvalidArgument("k-set cover needs 0 <= k <= n");
  if (n > 30) throw CapExceeded("k-set covers are enumerated only for n <= 30");
  std::vector<SiteSubset> out;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
    if (std::popcount(bits) == k) out.emplace_back(bits);
  }
  return out;
}

ShearerCoefficients shearer_coefficients(int n) {
  if (n < 2) throw InvalidArgument("Shearer coefficients need n >= 2");
  if (n > kMaxShearerSites) throw CapExceeded("Shearer coefficients are exact only for n <= 40");
  ShearerCoefficients sc;
  sc.n = n;
  sc.c.push_back(Rational(0));
  sc.d.push_back(Rational(1));
  // phi_k >= (1/k) C(n, k-1) phi_n + ((n-k)/k) phi_{k-1}; the k = n step yields c = 1, d = 0.
  for (int k = 2; k <= n; ++k) {
    const Rational step(n - k, k);
    sc.c.push_back(Rational(binomial(n, k - 1), k) + step * sc.c.back());
    sc.d.push_back(step * sc.d.back());
  }
  return sc;
}

ShearerSlack improved_shearer_from_profile(const std::vector<double>& profile, int n) {
  if (profile.size() != (std::size_t{1} << n)) throw InvalidArgument("profile size must be 2^n");
  if (n < 2) throw InvalidArgument("improved Shearer bound needs n >= 2");
  const double half = std::ldexp(1.0, n - 1);
  const double c_sum = ((n - 2) * half + 1.0) / (n - 1);
  const double d_sum = (half - 1.0) / (n - 1);
  ShearerSlack out;
  for (std::size_t a = 1; a < profile.size(); ++a) out.lhs += -profile[a];
  out.rhs = c_sum * -profile.back() + d_sum * singleton_sum(profile, n);
  out.slack = out.lhs - out.rhs;
  return out;
}

ShearerSlack weighted_shearer_from_profile(const std::vector<double>& profile, int n, double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw InvalidArgument("weighted Shearer bound needs gamma > 0");
  if (profile.size() != (std::size_t{1} << n)) throw InvalidArgument("profile size must be 2^n");
  if (n < 2) throw InvalidArgument("weighted Shearer bound needs n >= 2");
  const double grow = std::pow(1.0 + gamma, n - 1);
  const double c_sum = (grow * (gamma * (n - 1) - 1.0) + 1.0) / (n - 1);
  const double d_sum = (grow - 1.0) / (n - 1);
  ShearerSlack out;
  for (std::size_t a = 1; a < profile.size(); ++a) {
    out.lhs += std::pow(gamma, std::popcount(a)) * -profile[a];
  }
  out.rhs = c_sum * -profile.back() + d_sum * singleton_sum(profile, n);
  out.slack = out.lhs - out.rhs;
  return out;
}

ShearerSlack improved_shearer_check(const Density& f, const ProductMeasure& mu) {
  const int n = mu.space().sites();
  check_exhaustive(n, "improved Shearer check");
  return improved_shearer_from_profile(entropy_profile(f, mu), n);
}

ShearerSlack weighted_shearer_check(const Density& f, double gamma, const ProductMeasure& mu) {
  const int n = mu.space().sites();
  if (!(gamma > 0.0)) throw InvalidArgument("weighted Shearer bound needs gamma > 0");
  check_exhaustive(n, "weighted Shearer check");
  return weighted_shearer_from_profile(entropy_profile(f, mu), n, gamma);
}

double bernoulli_weighted_factor(double q, int n) {
  if (!(q > 0.0 && q <= 0.5)) throw InvalidArgument("Bernoulli factor needs q in (0, 1/2]");
  const auto sc = shearer_coefficients(n);
  const double gamma = q / (1.0 - q);
  CompensatedSum low, high;
  for (int k = 1; k <= n; ++k) {
    const double ck = sc.c_at(k).to_double();
    low.add(std::pow(gamma, k) * ck);
    high.add(std::pow(gamma, -k) * ck);
  }
  // The d(k, n) terms multiply sum_i Ent(f_i), which vanishes on S_mu.
  return std::pow(1.0 - q, n) * low.value() + std::pow(q, n) * high.value();
}

double naive_shearer_kappa_uniform(int n) {
  if (n < 2 || n > 30) throw InvalidArgument("naive Shearer constant needs 2 <= n <= 30");
  double covered = 0.0;
  for (int k = 2; k <= n; ++k) {
    // Every site lies in C(n-1, k-1) of the k-subsets.
    covered += static_cast<double>(binomial(n - 1, k - 1));
  }
  return 1.0 - std::ldexp(covered, 1 - n);
}

double kappa_theoretical(const CrossoverLaw& nu) {
  const int n = nu.sites();
  if (n < 2) throw InvalidArgument("kappa needs at least two sites");
  const double m = n - 1;
  switch (nu.model()) {
    case CrossoverModel::single_site: return 1.0 / m;
    case CrossoverModel::one_point: return 1.0 / (n + 1);
    case CrossoverModel::uniform: return (1.0 - std::ldexp(1.0, 1 - n)) / m;
    case CrossoverModel::bernoulli: {
      const double q = nu.q();
      return (1.0 - std::pow(1.0 - q, n) - std::pow(q, n)) / m;
    }
    case CrossoverModel::explicit_list: break;
  }
  throw InvalidArgument("no closed-form kappa for an explicit crossover law; use kappa_scan");
}

double subadditivity_lhs(const std::vector<double>& profile, const CrossoverLaw& nu) {
  const int n = nu.sites();
  if (profile.size() != (std::size_t{1} << n)) throw InvalidArgument("profile size must be 2^n");
  CompensatedSum s;
  for (const auto& e : nu.support()) {
    s.add(e.weight * (profile[e.subset.bits()] + profile[e.subset.complement(n).bits()]));
  }
  return s.value();
}

double subadditivity_ratio(const Density& f, const CrossoverLaw& nu, const ProductMeasure& mu) {
  if (nu.sites() != mu.space().sites()) throw InvalidArgument("crossover law and measure disagree on n");
  const auto profile = entropy_profile(f, mu);
  const double total = profile.back();
  if (!(total > 0.0)) throw InvalidArgument("subadditivity ratio needs Ent(f) > 0");
  return subadditivity_lhs(profile, nu) / total;
}

Density identical_copies_density(int n, const std::vector<double>& mu0) {
  if (n < 1) throw InvalidArgument("identical copies need n >= 1");
  if (mu0.empty() || std::any_of(mu0.begin(), mu0.end(), [](double x) { return !(x > 0.0); })) {
    throw InvalidArgument("identical copies need a base law with full support");
  }
  const auto space = ProductSpace::uniform_alphabet(n, static_cast<int>(mu0.size()));
  std::vector<double> f(space.size(), 0.0);
  std::size_t diagonal_step = 0;
  for (int i = 0; i < n; ++i) diagonal_step += space.stride(i);
  // f(x,...,x) = mu0(x) / mu0(x)^n.
  for (std::size_t x = 0; x < mu0.size(); ++x) f[x * diagonal_step] = std::pow(mu0[x], 1 - n);
  return Density(std::move(f));
}

KappaScan kappa_scan(const CrossoverLaw& nu, const ProductMeasure& mu, int samples, std::uint64_t seed) {
  const int n = mu.space().sites();
  if (nu.sites() != n) throw InvalidArgument("crossover law and measure disagree on n");
  if (!nu.enumerable()) throw CapExceeded("kappa scan needs an enumerable crossover law");
  if (samples < 0) throw InvalidArgument("sample count must be nonnegative");
  KappaScan scan;
  scan.bound = nu.model() == CrossoverModel::explicit_list ? std::numeric_limits<double>::quiet_NaN()
                                                           : 1.0 - kappa_theoretical(nu);
  scan.ratios.assign(static_cast<std::size_t>(samples), 0.0);
  std::vector<Density> densities(static_cast<std::size_t>(samples));
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < samples; ++i) {
    std::mt19937_64 rng(derive_seed(seed, "kappa_scan", static_cast<std::uint64_t>(i)));
    auto f = random_balanced_density(mu, rng);
    const auto profile = entropy_profile(f, mu);
    const double total = profile.back();
    scan.ratios[static_cast<std::size_t>(i)] = total > 0.0 ? subadditivity_lhs(profile, nu) / total : 0.0;
    densities[static_cast<std::size_t>(i)] = std::move(f);
  }
  scan.max_ratio = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < scan.ratios.size(); ++i) {
    if (scan.ratios[i] > scan.max_ratio) {
      scan.max_ratio = scan.ratios[i];
      scan.witness = densities[i];
    }
  }
  scan.identical_copies_ratio = std::numeric_limits<double>::quiet_NaN();
  if (n >= 2 && identical_sites(mu)) {
    auto f = identical_copies_density(n, mu.site(0));
    scan.identical_copies_ratio = subadditivity_ratio(f, nu, mu);
    if (scan.identical_copies_ratio >= scan.max_ratio) {
      scan.max_ratio = scan.identical_copies_ratio;
      scan.witness = std::move(f);
      scan.witness_is_identical_copies = true;
    }
  }
  return scan;
}

ProductMeasure sharp_test_measure(int n) {
  if (n < 2) throw InvalidArgument("sharp-test density needs n >= 2");
  return ProductMeasure::bernoulli(n, std::ldexp(1.0, -n));
}

Density sharp_test_density(int n) {
  const auto mu = sharp_test_measure(n);
  const double w = std::ldexp(1.0, -n);
  const double c = 2.0 * w * (1.0 - w) * w;
  const double a = w * w + c;
  const double b = (1.0 - w) * (1.0 - w) + c;
  const std::size_t size = mu.space().size();
  std::vector<double> f(size);
  for (std::size_t s = 0; s < size; ++s) {
    const double p = s == size - 1 ? a : (s == 0 ? b : c);
    f[s] = p / mu[s];
  }
  return Density(std::move(f));
}

SharpTestReport sharp_test_closed_form(int n, const CrossoverLaw& nu) {
  if (n < 2 || n > kMaxShearerSites) throw InvalidArgument("sharp-test closed form needs 2 <= n <= 40");
  if (nu.sites() != n) throw InvalidArgument("crossover law has the wrong number of sites");
  if (nu.model() == CrossoverModel::explicit_list) {
    throw InvalidArgument("sharp-test closed form needs a named crossover model");
  }
  SharpTestReport r;
  r.n = n;
  r.model = nu.name();
  r.q = nu.q();
  const double w = std::ldexp(1.0, -n);
  const double v = 1.0 - w;
  const double tail = 1.0 - std::ldexp(1.0, 1 - n);  // 1 - 2^(1-n)
  r.w = w;
  r.c = 2.0 * w * v * w;
  r.a = w * w + r.c;
  r.b = v * v + r.c;
  const double b_minus_1 = -2.0 * w + w * w + r.c;

  // log(a / w^n), log(b / (1-w)^n), log(c / (1-w)^n), log((1-w)/w).
  const double log1mw = std::log1p(-w);
  const double la = std::log(r.a) - n * std::log(w);
  const double lb = std::log1p(b_minus_1) - n * log1mw;
  const double lc = std::log(r.c) - n * log1mw;
  const double lr = log1mw - std::log(w);

  const double mixed = 2.0 * w * v * tail;
  r.ent = r.a * la + r.b * lb + mixed * lc + n * w * v * tail * lr;

  // alpha_0 and alpha_n from the nine product components of the recombined
  // mixture; 1 - alpha_0 is assembled from nonnegative pieces.
  auto m = [&](double x, double y) { return nu.mixed_moment(x, y); };
  const double w2v2 = w * w * v * v;
  const double wv3 = 2.0 * w * v * v * v;
  const double w3v = 2.0 * w * w * w * v;
  const double half_n = std::ldexp(1.0, -n);
  const double nu_empty = m(0.0, 1.0);
  const double nu_full = m(1.0, 0.0);
  r.delta_nu = nu.delta();
  const double low_pair = m(0.0, 0.5) + m(0.5, 0.0);
  r.alpha_n = w * w * w * w + 4.0 * w2v2 * half_n + w2v2 * (nu_full + nu_empty) + wv3 * low_pair +
              w3v * r.delta_nu;
  r.one_minus_alpha_0 = w * w * w * w + 4.0 * w2v2 * (1.0 - half_n) + w2v2 * (2.0 - nu_empty - nu_full) +
                        wv3 * (2.0 - r.delta_nu) + w3v * (2.0 - low_pair);
  r.alpha_0 = 1.0 - r.one_minus_alpha_0;
  r.beta = mixed - r.one_minus_alpha_0 + r.alpha_n;
  r.gamma = n * r.alpha_n - n * w * (2.0 * half_n * v + w);

  const double b_minus_alpha_0 = b_minus_1 + r.one_minus_alpha_0;
  r.production = (r.a - r.alpha_n) * la + b_minus_alpha_0 * lb + r.beta * lc + r.gamma * lr;
  r.ratio = r.production / r.ent;
  r.asymptote = 4.0 * (1.0 - r.delta_nu) / n;
  r.kappa = kappa_theoretical(nu);
  return r;
}

DecayCheck discrete_decay_check(const Distribution& p, const CrossoverLaw& nu) {
  const auto eq = equilibrium_of(p);
  const auto pi = eq.pi.as_distribution();
  const auto next = psi_step(p, nu);
  DecayCheck out;
  out.before = relative_entropy(p, pi);
  out.after = relative_entropy(next, pi);
  out.upper = (1.0 - kappa_theoretical(nu)) * out.before;
  out.factor = out.before > 0.0 ? out.after / out.before : 0.0;
  out.lower = -std::numeric_limits<double>::infinity();
  if (p.full_support()) {
    const auto f = density_of(p, eq.pi);
    out.lower = out.before - recombination_entropy_production(f, nu, eq.pi);
  }
  return out;
}

std::vector<double> admissible_direction(const ConservedBasis& basis, std::span<const double> mu,
                                         std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::vector<double> raw(mu.size());
    for (double& x : raw) x = gauss(rng);
    auto phi = basis.project_out(raw);
    double norm = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) norm += mu[i] * phi[i] * phi[i];
    if (norm > 1e-12) {
      const double scale = 1.0 / std::sqrt(norm);
      for (double& x : phi) x *= scale;
      return phi;
    }
  }
  throw InvalidArgument("the conserved basis spans the whole space; no admissible direction exists");
}

}  // namespace recomb
