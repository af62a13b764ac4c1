#include "recomb/crossover.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "recomb/summation.hpp"

namespace recomb {

namespace {

void check_sites(int n) {
  if (n < 1 || n > kMaxSites) throw InvalidArgument("crossover law needs 1 <= n <= 63 sites");
}

SiteSubset prefix(int i) { return SiteSubset{i == 0 ? 0 : (std::uint64_t{1} << i) - 1}; }

}  // namespace

CrossoverLaw CrossoverLaw::single_site(int n) {
  check_sites(n);
  return CrossoverLaw(CrossoverModel::single_site, n, 0.0);
}

CrossoverLaw CrossoverLaw::one_point(int n) {
  check_sites(n);
  return CrossoverLaw(CrossoverModel::one_point, n, 0.0);
}

CrossoverLaw CrossoverLaw::uniform(int n) {
  check_sites(n);
  return CrossoverLaw(CrossoverModel::uniform, n, 0.5);
}

CrossoverLaw CrossoverLaw::bernoulli(int n, double q) {
  check_sites(n);
  if (!(q >= 0.0 && q <= 0.5)) throw InvalidArgument("Bernoulli crossover requires q in [0, 1/2]");
  return CrossoverLaw(CrossoverModel::bernoulli, n, q);
}

CrossoverLaw CrossoverLaw::explicit_law(int n, std::vector<WeightedSubset> entries) {
  check_sites(n);
  const SiteSubset all = SiteSubset::full(n);
  std::map<std::uint64_t, double> merged;
  CompensatedSum total;
  for (const auto& e : entries) {
    if (!e.subset.is_subset_of(all)) throw InvalidArgument("explicit subset outside the site set");
    if (!(e.weight >= 0.0) || !std::isfinite(e.weight)) throw InvalidArgument("explicit weights must be nonnegative");
    merged[e.subset.bits()] += e.weight;
    total.add(e.weight);
  }
  if (std::abs(total.value() - 1.0) > kProbabilityTolerance) {
    throw InvalidArgument("explicit crossover weights must sum to 1");
  }
  CrossoverLaw law(CrossoverModel::explicit_list, n, 0.0);
  for (const auto& [bits, w] : merged) {
    if (w > 0.0) law.entries_.push_back({SiteSubset{bits}, w});
  }
  return law;
}

std::string CrossoverLaw::name() const {
  switch (model_) {
    case CrossoverModel::single_site: return "single_site";
    case CrossoverModel::one_point: return "one_point";
    case CrossoverModel::uniform: return "uniform";
    case CrossoverModel::bernoulli: return "bernoulli";
    case CrossoverModel::explicit_list: return "explicit";
  }
  return "unknown";
}

bool CrossoverLaw::nondegenerate() const {
  if (n_ < 2) return true;
  switch (model_) {
    case CrossoverModel::single_site:
    case CrossoverModel::one_point:
    case CrossoverModel::uniform: return true;
    case CrossoverModel::bernoulli: return q_ > 0.0;
    case CrossoverModel::explicit_list: break;
  }
  for (int i = 0; i < n_; ++i) {
    for (int j = i + 1; j < n_; ++j) {
      const bool separated = std::any_of(entries_.begin(), entries_.end(), [&](const WeightedSubset& e) {
        return e.subset.contains(i) != e.subset.contains(j);
      });
      if (!separated) return false;
    }
  }
  return true;
}

bool CrossoverLaw::enumerable(int cap) const {
  if (model_ == CrossoverModel::uniform) return n_ <= cap;
  if (model_ == CrossoverModel::bernoulli) return n_ <= cap || q_ == 0.0;
  return true;
}

std::vector<WeightedSubset> CrossoverLaw::support(int cap) const {
  std::vector<WeightedSubset> out;
  switch (model_) {
    case CrossoverModel::single_site:
      for (int i = 0; i < n_; ++i) out.push_back({SiteSubset{std::uint64_t{1} << i}, 1.0 / n_});
      return out;
    case CrossoverModel::one_point:
      for (int i = 0; i <= n_; ++i) out.push_back({prefix(i), 1.0 / (n_ + 1)});
      return out;
    case CrossoverModel::explicit_list: return entries_;
    case CrossoverModel::uniform:
    case CrossoverModel::bernoulli: break;
  }
  if (model_ == CrossoverModel::bernoulli && q_ == 0.0) return {{SiteSubset{}, 1.0}};
  if (n_ > cap) {
    throw CapExceeded("enumerating 2^" + std::to_string(n_) +
                      " subsets exceeds the enumeration cap; use sample() instead");
  }
  const std::uint64_t count = std::uint64_t{1} << n_;
  out.reserve(count);
  for (std::uint64_t bits = 0; bits < count; ++bits) {
    const SiteSubset a{bits};
    out.push_back({a, weight(a)});
  }
  return out;
}

SiteSubset CrossoverLaw::sample(std::mt19937_64& rng) const {
  switch (model_) {
    case CrossoverModel::single_site: {
      std::uniform_int_distribution<int> site(0, n_ - 1);
      return SiteSubset{std::uint64_t{1} << site(rng)};
    }
    case CrossoverModel::one_point: {
      std::uniform_int_distribution<int> cut(0, n_);
      return prefix(cut(rng));
    }
    case CrossoverModel::uniform:
    case CrossoverModel::bernoulli: {
      std::bernoulli_distribution coin(q_);
      std::uint64_t bits = 0;
      for (int i = 0; i < n_; ++i) {
        if (coin(rng)) bits |= std::uint64_t{1} << i;
      }
      return SiteSubset{bits};
    }
    case CrossoverModel::explicit_list: {
      std::uniform_real_distribution<double> u(0.0, 1.0);
      double x = u(rng);
      for (const auto& e : entries_) {
        x -= e.weight;
        if (x < 0.0) return e.subset;
      }
      return entries_.back().subset;
    }
  }
  return SiteSubset{};
}

double CrossoverLaw::mixed_moment(double u, double v) const {
  if (!(u >= 0.0 && u <= 1.0 && v >= 0.0 && v <= 1.0)) throw InvalidArgument("mixed moment needs u, v in [0, 1]");
  const double n = n_;
  switch (model_) {
    case CrossoverModel::single_site: return u * std::pow(v, n - 1);
    case CrossoverModel::one_point: {
      double s = 0.0;
      for (int i = 0; i <= n_; ++i) s += std::pow(u, i) * std::pow(v, n_ - i);
      return s / (n + 1);
    }
    case CrossoverModel::uniform: return std::pow((u + v) / 2.0, n);
    case CrossoverModel::bernoulli: return std::pow(q_ * u + (1.0 - q_) * v, n);
    case CrossoverModel::explicit_list: {
      CompensatedSum s;
      for (const auto& e : entries_) {
        s.add(e.weight * std::pow(u, e.subset.size()) * std::pow(v, n_ - e.subset.size()));
      }
      return s.value();
    }
  }
  return 0.0;
}

double CrossoverLaw::weight(SiteSubset a) const {
  if (!a.is_subset_of(SiteSubset::full(n_))) return 0.0;
  const int k = a.size();
  switch (model_) {
    case CrossoverModel::single_site: return k == 1 ? 1.0 / n_ : 0.0;
    case CrossoverModel::one_point: return a == prefix(k) ? 1.0 / (n_ + 1) : 0.0;
    case CrossoverModel::uniform: return std::ldexp(1.0, -n_);
    case CrossoverModel::bernoulli: return std::pow(q_, k) * std::pow(1.0 - q_, n_ - k);
    case CrossoverModel::explicit_list:
      for (const auto& e : entries_) {
        if (e.subset == a) return e.weight;
      }
      return 0.0;
  }
  return 0.0;
}

}  // namespace recomb
