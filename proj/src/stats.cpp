#include "duet/stats.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <thread>

#include "duet/rng.hpp"

namespace duet::verify {

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (const double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

MeanSE mean_se(std::span<const double> v) {
  MeanSE out;
  out.n = v.size();
  if (v.empty()) return out;
  out.mean = pairwise_sum(v) / static_cast<double>(v.size());
  if (v.size() < 2) return out;
  std::vector<double> sq(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double d = v[i] - out.mean;
    sq[i] = d * d;
  }
  const double var =
      pairwise_sum(sq) / static_cast<double>(v.size() - 1);
  out.se = std::sqrt(var / static_cast<double>(v.size()));
  return out;
}

MeanSE variance_se(std::span<const double> v) {
  MeanSE out;
  out.n = v.size();
  if (v.size() < 2) return out;
  const double mu = pairwise_sum(v) / static_cast<double>(v.size());
  std::vector<double> sq(v.size()), quad(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double d = v[i] - mu;
    sq[i] = d * d;
    quad[i] = d * d * d * d;
  }
  const double n = static_cast<double>(v.size());
  const double m2 = pairwise_sum(sq) / n;
  const double m4 = pairwise_sum(quad) / n;
  out.mean = m2 * n / (n - 1.0);
  const double var_of_var = std::max(0.0, m4 - m2 * m2) / n;
  out.se = std::sqrt(var_of_var);
  return out;
}

double ks_statistic(std::vector<double> samples,
                    const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::invalid_argument("ks_statistic: no samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    const double lo = f - static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n - f;
    d = std::max(d, std::max(lo, hi));
  }
  return d;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("loglog_slope: need matching arrays, size >= 2");
  }
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double dn = static_cast<double>(n);
  return (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
}

void parallel_for_paths(std::size_t n_paths, unsigned workers,
                        const std::function<void(std::size_t)>& body) {
  if (n_paths == 0) return;
  unsigned n_workers = workers != 0 ? workers : std::thread::hardware_concurrency();
  if (n_workers == 0) n_workers = 1;
  n_workers = static_cast<unsigned>(
      std::min<std::size_t>(n_workers, n_paths));

  if (n_workers == 1) {
    for (std::size_t i = 0; i < n_paths; ++i) body(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n_paths);
  constexpr std::size_t kChunk = 8;
  auto work = [&]() {
    for (;;) {
      const std::size_t begin = next.fetch_add(kChunk);
      if (begin >= n_paths) return;
      const std::size_t end = std::min(begin + kChunk, n_paths);
      for (std::size_t i = begin; i < end; ++i) {
        try {
          body(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(n_workers);
  for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(work);
  for (auto& th : pool) th.join();
  for (std::size_t i = 0; i < n_paths; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
  }
}

std::uint64_t sub_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
  // offset the channel word so sub-ensembles never collide with the
  // per-trajectory channels of the parent seed
  return rng::derive_stream_seed(master, a, 0x100 + b);
}

}  // namespace duet::verify
