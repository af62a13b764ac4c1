#pragma once

// OpenMP inner loops shared by the modules. Every kernel writes each output
// element from exactly one iteration, so results do not depend on the thread
// count. Plain reference versions of the higher-level operations live in
// recomb/serial.hpp.

#include <cstddef>
#include <span>

namespace recomb::kernels {

/// out[a] = sum_c w[c] * values[emb_a[a] + emb_c[c]]; an empty `w` means all ones.
void marginalize(std::span<const double> values, std::span<const std::size_t> emb_a,
                 std::span<const std::size_t> emb_c, std::span<const double> w,
                 std::span<double> out);

/// out[emb_a[a] + emb_c[c]] += scale * x[a] * y[c].
void accumulate_outer(std::span<double> out, double scale, std::span<const double> x,
                      std::span<const double> y, std::span<const std::size_t> emb_a,
                      std::span<const std::size_t> emb_c);

/// Number of threads the parallel kernels will use.
int thread_count();

/// Overrides the OpenMP thread count (values < 1 are ignored).
void set_thread_count(int threads);

}  // namespace recomb::kernels
