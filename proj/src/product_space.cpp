#include "recomb/product_space.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "recomb/kernels.hpp"
#include "recomb/summation.hpp"

namespace recomb {

SiteSubset SiteSubset::of(std::initializer_list<int> sites) {
  std::uint64_t bits = 0;
  for (int s : sites) {
    if (s < 0 || s >= kMaxSites) throw InvalidArgument("site index out of range");
    bits |= std::uint64_t{1} << s;
  }
  return SiteSubset{bits};
}

SiteSubset SiteSubset::full(int n) {
  if (n < 0 || n > kMaxSites) throw InvalidArgument("site count out of range");
  return SiteSubset{n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1};
}

SiteSubset SiteSubset::complement(int n) const { return SiteSubset{~bits_ & full(n).bits()}; }

std::vector<int> SiteSubset::sites() const {
  std::vector<int> out;
  for (std::uint64_t b = bits_; b != 0; b &= b - 1) out.push_back(std::countr_zero(b));
  return out;
}

ProductSpace::ProductSpace(std::vector<int> alphabet_sizes, std::size_t size_cap)
    : radix_(std::move(alphabet_sizes)) {
  if (radix_.empty()) throw InvalidArgument("product space needs at least one site");
  if (static_cast<int>(radix_.size()) > kMaxSites) throw InvalidArgument("at most 63 sites");
  stride_.resize(radix_.size());
  for (std::size_t i = 0; i < radix_.size(); ++i) {
    if (radix_[i] < 1) throw InvalidArgument("alphabet sizes must be positive");
    stride_[i] = size_;
    if (size_ > size_cap / static_cast<std::size_t>(radix_[i])) {
      throw CapExceeded("product space exceeds size cap of " + std::to_string(size_cap));
    }
    size_ *= static_cast<std::size_t>(radix_[i]);
  }
}

ProductSpace ProductSpace::binary(int n, std::size_t size_cap) {
  return uniform_alphabet(n, 2, size_cap);
}

ProductSpace ProductSpace::uniform_alphabet(int n, int a, std::size_t size_cap) {
  if (n < 1) throw InvalidArgument("product space needs at least one site");
  return ProductSpace(std::vector<int>(static_cast<std::size_t>(n), a), size_cap);
}

std::size_t ProductSpace::encode(const Configuration& c) const {
  if (c.values.size() != radix_.size()) throw InvalidArgument("configuration length mismatch");
  std::size_t index = 0;
  for (std::size_t i = 0; i < radix_.size(); ++i) {
    if (c.values[i] < 0 || c.values[i] >= radix_[i]) throw InvalidArgument("symbol out of range");
    index += static_cast<std::size_t>(c.values[i]) * stride_[i];
  }
  return index;
}

Configuration ProductSpace::decode(std::size_t index) const {
  if (index >= size_) throw InvalidArgument("index out of range");
  Configuration c;
  c.values.resize(radix_.size());
  for (std::size_t i = 0; i < radix_.size(); ++i) {
    c.values[i] = static_cast<int>(index % static_cast<std::size_t>(radix_[i]));
    index /= static_cast<std::size_t>(radix_[i]);
  }
  return c;
}

std::size_t ProductSpace::subset_size(SiteSubset a) const {
  std::size_t s = 1;
  for (int i : a.sites()) s *= static_cast<std::size_t>(radix_[i]);
  return s;
}

std::size_t ProductSpace::extract(std::size_t index, SiteSubset a) const {
  std::size_t out = 0;
  for (std::uint64_t b = a.bits(); b != 0; b &= b - 1) {
    const int i = std::countr_zero(b);
    out += static_cast<std::size_t>(digit(index, i)) * stride_[i];
  }
  return out;
}

std::size_t ProductSpace::project(std::size_t index, SiteSubset a) const {
  std::size_t out = 0;
  std::size_t mult = 1;
  for (std::uint64_t b = a.bits(); b != 0; b &= b - 1) {
    const int i = std::countr_zero(b);
    out += static_cast<std::size_t>(digit(index, i)) * mult;
    mult *= static_cast<std::size_t>(radix_[i]);
  }
  return out;
}

std::vector<std::size_t> ProductSpace::embedding(SiteSubset a) const {
  std::vector<std::size_t> emb{0};
  emb.reserve(subset_size(a));
  for (int i : a.sites()) {
    const std::size_t cur = emb.size();
    for (int d = 1; d < radix_[i]; ++d) {
      for (std::size_t k = 0; k < cur; ++k) emb.push_back(emb[k] + static_cast<std::size_t>(d) * stride_[i]);
    }
  }
  return emb;
}

ProductSpace ProductSpace::subspace(SiteSubset a) const {
  std::vector<int> radix;
  for (int i : a.sites()) radix.push_back(radix_[i]);
  if (radix.empty()) radix.push_back(1);
  return ProductSpace(std::move(radix));
}

std::pair<Configuration, Configuration> recombine(const ProductSpace& space,
                                                  const Configuration& sigma,
                                                  const Configuration& eta, SiteSubset a) {
  const std::size_t s = space.encode(sigma);
  const std::size_t e = space.encode(eta);
  if (!a.is_subset_of(space.all_sites())) throw InvalidArgument("subset outside the site set");
  const auto [t, t2] = recombine_index(space, s, e, a);
  return {space.decode(t), space.decode(t2)};
}

namespace {

void check_weights(std::span<const double> w, const char* what) {
  for (double x : w) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw InvalidArgument(std::string(what) + " must be finite and nonnegative");
    }
  }
}

std::vector<double> marginal_over(const ProductSpace& space, std::span<const double> values,
                                  SiteSubset a, std::span<const double> weight_c) {
  const auto emb_a = space.embedding(a);
  const auto emb_c = space.embedding(a.complement(space.sites()));
  std::vector<double> out(emb_a.size());
  kernels::marginalize(values, emb_a, emb_c, weight_c, out);
  return out;
}

}  // namespace

Distribution::Distribution(const ProductSpace& space, std::vector<double> weights, double tolerance)
    : space_(space), weights_(std::move(weights)) {
  if (weights_.size() != space_.size()) throw InvalidArgument("distribution size mismatch");
  check_weights(weights_, "probabilities");
  const double total = compensated_sum(weights_);
  if (std::abs(total - 1.0) > tolerance) {
    throw InvalidArgument("probabilities must sum to 1 (got " + std::to_string(total) + ")");
  }
}

Distribution Distribution::uniform(const ProductSpace& space) {
  return Distribution(space, std::vector<double>(space.size(), 1.0 / static_cast<double>(space.size())));
}

Distribution Distribution::point_mass(const ProductSpace& space, std::size_t index) {
  if (index >= space.size()) throw InvalidArgument("index out of range");
  std::vector<double> w(space.size(), 0.0);
  w[index] = 1.0;
  return Distribution(space, std::move(w));
}

Distribution Distribution::normalized(const ProductSpace& space, std::vector<double> weights) {
  check_weights(weights, "weights");
  const double total = compensated_sum(weights);
  if (!(total > 0.0)) throw InvalidArgument("weights must have positive total mass");
  for (double& x : weights) x /= total;
  return Distribution(space, std::move(weights), 1e-10);
}

bool Distribution::full_support() const {
  return std::all_of(weights_.begin(), weights_.end(), [](double x) { return x > 0.0; });
}

std::vector<double> Distribution::marginal(SiteSubset a) const {
  return marginal_over(space_, weights_, a, {});
}

std::vector<double> Distribution::site_marginal(int site) const {
  return marginal(SiteSubset{std::uint64_t{1} << site});
}

ProductMeasure::ProductMeasure(const ProductSpace& space, std::vector<std::vector<double>> site_measures)
    : space_(space), sites_(std::move(site_measures)) {
  if (static_cast<int>(sites_.size()) != space_.sites()) throw InvalidArgument("one measure per site required");
  for (int i = 0; i < space_.sites(); ++i) {
    const auto& m = sites_[static_cast<std::size_t>(i)];
    if (static_cast<int>(m.size()) != space_.alphabet(i)) throw InvalidArgument("site measure size mismatch");
    check_weights(m, "site probabilities");
    if (std::abs(compensated_sum(m) - 1.0) > kProbabilityTolerance) {
      throw InvalidArgument("site measure must sum to 1");
    }
  }
  joint_.assign(space_.size(), 1.0);
  for (int i = 0; i < space_.sites(); ++i) {
    const std::size_t stride = space_.stride(i);
    const auto a = static_cast<std::size_t>(space_.alphabet(i));
    for (std::size_t idx = 0; idx < joint_.size(); ++idx) joint_[idx] *= sites_[i][(idx / stride) % a];
  }
}

ProductMeasure ProductMeasure::uniform(const ProductSpace& space) {
  std::vector<std::vector<double>> s;
  for (int i = 0; i < space.sites(); ++i) {
    s.emplace_back(static_cast<std::size_t>(space.alphabet(i)), 1.0 / space.alphabet(i));
  }
  return ProductMeasure(space, std::move(s));
}

ProductMeasure ProductMeasure::bernoulli(int n, double w) {
  if (!(w >= 0.0 && w <= 1.0)) throw InvalidArgument("Bernoulli parameter must lie in [0,1]");
  return ProductMeasure(ProductSpace::binary(n),
                        std::vector<std::vector<double>>(static_cast<std::size_t>(n), {1.0 - w, w}));
}

bool ProductMeasure::strictly_positive() const {
  for (const auto& m : sites_) {
    for (double x : m) {
      if (!(x > 0.0)) return false;
    }
  }
  return true;
}

std::vector<double> ProductMeasure::marginal(SiteSubset a) const {
  std::vector<double> out{1.0};
  for (int i : a.sites()) {
    const std::size_t cur = out.size();
    std::vector<double> next(cur * sites_[i].size());
    for (std::size_t d = 0; d < sites_[i].size(); ++d) {
      for (std::size_t k = 0; k < cur; ++k) next[d * cur + k] = out[k] * sites_[i][d];
    }
    out = std::move(next);
  }
  return out;
}

Density::Density(std::vector<double> values) : values_(std::move(values)) {
  check_weights(values_, "density values");
}

bool Density::strictly_positive() const {
  return std::all_of(values_.begin(), values_.end(), [](double x) { return x > 0.0; });
}

Density density_of(const Distribution& p, std::span<const double> reference) {
  if (reference.size() != p.size()) throw InvalidArgument("reference size mismatch");
  std::vector<double> f(p.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (reference[i] > 0.0) {
      f[i] = p[i] / reference[i];
    } else if (p[i] > 0.0) {
      throw InvalidArgument("p is not absolutely continuous with respect to the reference");
    } else {
      f[i] = 0.0;
    }
  }
  return Density(std::move(f));
}

Density density_of(const Distribution& p, const ProductMeasure& mu) {
  if (!(p.space() == mu.space())) throw InvalidArgument("space mismatch");
  return density_of(p, mu.joint());
}

Distribution distribution_of(const Density& f, const ProductMeasure& mu) {
  if (f.size() != mu.space().size()) throw InvalidArgument("density size mismatch");
  std::vector<double> w(f.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = f[i] * mu[i];
  return Distribution(mu.space(), std::move(w), kDensityTolerance);
}

double mass(std::span<const double> f, std::span<const double> reference) {
  CompensatedSum s;
  for (std::size_t i = 0; i < f.size(); ++i) s.add(f[i] * reference[i]);
  return s.value();
}

std::vector<double> MarginalDensity::lift(const ProductSpace& space) const {
  std::vector<double> out(space.size());
  for (std::size_t idx = 0; idx < out.size(); ++idx) out[idx] = values[space.project(idx, subset)];
  return out;
}

MarginalDensity marginal_density(const Density& f, SiteSubset a, const ProductMeasure& mu) {
  const auto& space = mu.space();
  if (f.size() != space.size()) throw InvalidArgument("density size mismatch");
  if (!a.is_subset_of(space.all_sites())) throw InvalidArgument("subset outside the site set");
  const auto mu_c = mu.marginal(a.complement(space.sites()));
  return MarginalDensity{a, marginal_over(space, f.values(), a, mu_c)};
}

Distribution product_of_marginals(const Distribution& p, SiteSubset a) {
  const auto& space = p.space();
  const SiteSubset ac = a.complement(space.sites());
  const auto emb_a = space.embedding(a);
  const auto emb_c = space.embedding(ac);
  std::vector<double> pa(emb_a.size()), pc(emb_c.size());
  kernels::marginalize(p.weights(), emb_a, emb_c, {}, pa);
  kernels::marginalize(p.weights(), emb_c, emb_a, {}, pc);
  std::vector<double> out(space.size(), 0.0);
  kernels::accumulate_outer(out, 1.0, pa, pc, emb_a, emb_c);
  return Distribution(space, std::move(out), kDensityTolerance);
}

std::vector<double> ipf_fit_weights(const ProductSpace& space, std::vector<double> weights,
                                    const std::vector<std::vector<double>>& targets,
                                    IpfOptions options) {
  const int n = space.sites();
  if (weights.size() != space.size()) throw InvalidArgument("weight vector size mismatch");
  if (static_cast<int>(targets.size()) != n) throw InvalidArgument("one target marginal per site required");
  check_weights(weights, "IPF weights");
  for (int i = 0; i < n; ++i) {
    const auto& t = targets[static_cast<std::size_t>(i)];
    if (static_cast<int>(t.size()) != space.alphabet(i)) throw InvalidArgument("target size mismatch");
    check_weights(t, "IPF targets");
    if (std::abs(compensated_sum(t) - 1.0) > kProbabilityTolerance) {
      throw InvalidArgument("IPF targets must sum to 1");
    }
  }
  const double total = compensated_sum(weights);
  if (!(total > 0.0)) throw InvalidArgument("IPF input has zero mass");
  for (double& x : weights) x /= total;

  std::vector<std::vector<std::size_t>> emb_site(static_cast<std::size_t>(n)), emb_rest(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const SiteSubset si{std::uint64_t{1} << i};
    emb_site[i] = space.embedding(si);
    emb_rest[i] = space.embedding(si.complement(n));
  }

  std::vector<double> m;
  auto deviation = [&] {
    double dev = 0.0;
    for (int i = 0; i < n; ++i) {
      m.assign(emb_site[i].size(), 0.0);
      kernels::marginalize(weights, emb_site[i], emb_rest[i], {}, m);
      for (std::size_t x = 0; x < m.size(); ++x) dev = std::max(dev, std::abs(m[x] - targets[i][x]));
    }
    return dev;
  };

  double dev = deviation();
  for (int it = 0; it < options.max_iterations && dev > options.tolerance; ++it) {
    for (int i = 0; i < n; ++i) {
      m.assign(emb_site[i].size(), 0.0);
      kernels::marginalize(weights, emb_site[i], emb_rest[i], {}, m);
      for (std::size_t x = 0; x < m.size(); ++x) {
        double ratio = 0.0;
        if (m[x] > 0.0) {
          ratio = targets[i][x] / m[x];
        } else if (targets[i][x] > 0.0) {
          throw ConvergenceError("IPF target has mass where the input has none", targets[i][x]);
        }
        const std::size_t base = emb_site[i][x];
        for (std::size_t c : emb_rest[i]) weights[base + c] *= ratio;
      }
    }
    dev = deviation();
  }
  if (dev > options.tolerance) {
    throw ConvergenceError("IPF did not converge (max marginal deviation " + std::to_string(dev) + ")", dev);
  }
  const double t2 = compensated_sum(weights);
  for (double& x : weights) x /= t2;
  return weights;
}

Density ipf_project(const Density& g, const ProductMeasure& mu,
                    const std::vector<std::vector<double>>& targets, IpfOptions options) {
  const auto& space = mu.space();
  if (g.size() != space.size()) throw InvalidArgument("density size mismatch");
  if (!mu.strictly_positive()) throw InvalidArgument("IPF reference measure must be strictly positive");
  if (!g.strictly_positive()) throw InvalidArgument("IPF input density must be strictly positive");
  for (const auto& t : targets) {
    for (double x : t) {
      if (!(x > 0.0)) throw InvalidArgument("IPF targets must be strictly positive");
    }
  }
  std::vector<double> w(space.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = g[i] * mu[i];
  w = ipf_fit_weights(space, std::move(w), targets, options);
  for (std::size_t i = 0; i < w.size(); ++i) w[i] /= mu[i];
  return Density(std::move(w));
}

}  // namespace recomb
