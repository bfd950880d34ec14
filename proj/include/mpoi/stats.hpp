#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace mpoi {

struct Estimate {
  double mean = 0.0;
  double stderr_mean = 0.0;
  std::size_t n = 0;
};

/// Pairwise (cascade) summation; the result does not depend on how samples
/// were produced, only on their order.
double pairwise_sum(std::span<const double> values);

Estimate summarize(std::span<const double> samples);

/// runner(run_id, run_seed) for run_id in [0, n_runs); run seeds are
/// mix_seed(master_seed, run_id). Results are identical for any thread count.
using Runner = std::function<double(std::size_t, std::uint64_t)>;

std::vector<double> mc_samples(const Runner& runner, std::size_t n_runs, std::uint64_t master_seed,
                               unsigned threads = 0);

Estimate mc_estimate(const Runner& runner, std::size_t n_runs, std::uint64_t master_seed,
                     unsigned threads = 0);

}  // namespace mpoi
