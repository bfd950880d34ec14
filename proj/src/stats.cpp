#include "mpoi/stats.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "mpoi/error.hpp"
#include "mpoi/random.hpp"

namespace mpoi {

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 16) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

Estimate summarize(std::span<const double> samples) {
  Estimate e;
  e.n = samples.size();
  if (samples.empty()) return e;
  e.mean = pairwise_sum(samples) / static_cast<double>(e.n);
  if (e.n < 2) return e;
  std::vector<double> sq(samples.size());
  std::transform(samples.begin(), samples.end(), sq.begin(),
                 [&](double x) { return (x - e.mean) * (x - e.mean); });
  const double var = pairwise_sum(sq) / static_cast<double>(e.n - 1);
  e.stderr_mean = std::sqrt(var / static_cast<double>(e.n));
  return e;
}

std::vector<double> mc_samples(const Runner& runner, std::size_t n_runs, std::uint64_t master_seed,
                               unsigned threads) {
  std::vector<double> out(n_runs, 0.0);
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n_runs / 64, 1)));
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&](std::size_t begin, std::size_t end) {
    try {
      for (std::size_t r = begin; r < end; ++r) out[r] = runner(r, mix_seed(master_seed, r));
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };
  if (threads <= 1) {
    work(0, n_runs);
  } else {
    std::vector<std::thread> pool;
    const std::size_t block = (n_runs + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t begin = t * block;
      const std::size_t end = std::min(n_runs, begin + block);
      if (begin >= end) break;
      pool.emplace_back(work, begin, end);
    }
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

Estimate mc_estimate(const Runner& runner, std::size_t n_runs, std::uint64_t master_seed,
                     unsigned threads) {
  if (n_runs < 2) throw Error(ErrorCode::invalid_argument, "Monte Carlo needs at least 2 runs");
  const auto samples = mc_samples(runner, n_runs, master_seed, threads);
  return summarize(samples);
}

}  // namespace mpoi
