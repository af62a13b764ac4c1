#include "recomb/kernels.hpp"

#include <omp.h>

namespace recomb::kernels {

void marginalize(std::span<const double> values, std::span<const std::size_t> emb_a,
                 std::span<const std::size_t> emb_c, std::span<const double> w,
                 std::span<double> out) {
  const auto na = static_cast<std::ptrdiff_t>(emb_a.size());
  const std::size_t nc = emb_c.size();
  const bool weighted = !w.empty();
#pragma omp parallel for schedule(static) if (values.size() > 4096)
  for (std::ptrdiff_t a = 0; a < na; ++a) {
    const std::size_t base = emb_a[a];
    double acc = 0.0;
    if (weighted) {
      for (std::size_t c = 0; c < nc; ++c) acc += w[c] * values[base + emb_c[c]];
    } else {
      for (std::size_t c = 0; c < nc; ++c) acc += values[base + emb_c[c]];
    }
    out[a] = acc;
  }
}

void accumulate_outer(std::span<double> out, double scale, std::span<const double> x,
                      std::span<const double> y, std::span<const std::size_t> emb_a,
                      std::span<const std::size_t> emb_c) {
  const auto na = static_cast<std::ptrdiff_t>(emb_a.size());
  const std::size_t nc = emb_c.size();
#pragma omp parallel for schedule(static) if (out.size() > 4096)
  for (std::ptrdiff_t a = 0; a < na; ++a) {
    const double xa = scale * x[a];
    const std::size_t base = emb_a[a];
    for (std::size_t c = 0; c < nc; ++c) out[base + emb_c[c]] += xa * y[c];
  }
}

int thread_count() { return omp_get_max_threads(); }

void set_thread_count(int threads) {
  if (threads >= 1) omp_set_num_threads(threads);
}

}  // namespace recomb::kernels
