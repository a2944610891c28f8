#ifndef DUET_STATS_HPP
#define DUET_STATS_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

// Deterministic reduction and estimation helpers for the verification
// harness. All reductions are fixed-order (pairwise over the per-path slot
// array, which is indexed by trajectory), so ensemble results are
// bit-identical regardless of how many workers produced the slots.

namespace duet::verify {

// Fixed-order pairwise summation.
double pairwise_sum(std::span<const double> v);

struct MeanSE {
  double mean = 0.0;
  double se = 0.0;
  std::size_t n = 0;
};

// Sample mean with its standard error (pairwise sums, two-pass variance).
MeanSE mean_se(std::span<const double> v);

// Sample variance with a standard error from the fourth central moment.
MeanSE variance_se(std::span<const double> v);

// Exact two-sided Kolmogorov-Smirnov distance sup_x |F_n(x) - F(x)|.
// Samples are taken by value and sorted internally.
double ks_statistic(std::vector<double> samples,
                    const std::function<double(double)>& cdf);

// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

// Runs body(path_index) for every index in [0, n_paths), fanned out over
// `workers` threads (0 = hardware concurrency). Exceptions are captured and
// the one with the smallest path index is rethrown after the fan-in, so
// failures are deterministic too.
void parallel_for_paths(std::size_t n_paths, unsigned workers,
                        const std::function<void(std::size_t)>& body);

// Deterministic seed for a sub-ensemble of a composite experiment.
std::uint64_t sub_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0);

}  // namespace duet::verify

#endif  // DUET_STATS_HPP
