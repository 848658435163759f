// Monte Carlo protocol simulator: ground truth for every analytic result.
//
// Randomness is counter-based: every variate is a pure function of
// (seed, counter), so estimates are bit-identical for a given (seed, n)
// regardless of worker count or scheduling.  Draw `i` owns the counter
// block [i * slots, (i+1) * slots) with a fixed slot layout: the three
// channel powers first, then the per-interferer powers at terminal 1,
// terminal 2, and the relay.
#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <thread>
#include <vector>

#include "twr/mutation.hpp"
#include "twr/scenario.hpp"

namespace twr {

// --- counter-based generator ----------------------------------------------

// Output k of the canonical splitmix64 stream for `seed`.
uint64_t mix_u64(uint64_t seed, uint64_t k);
// The same output mapped to [0, 1) with 53-bit resolution.
double mix_unit(uint64_t seed, uint64_t k);
// Exponential variate with the given mean.
double mix_exponential(uint64_t seed, uint64_t k, double mean);

// Number of Monte Carlo workers: TWR_THREADS if set and positive, otherwise
// (and for TWR_THREADS=0) the hardware concurrency.
int worker_count();

// --- channel model ---------------------------------------------------------

struct ChannelDraw {
  double g0 = 0, g1 = 0, g2 = 0;        // direct / terminal-1 hop / terminal-2 hop powers
  double i_t1 = 0, i_t2 = 0, i_r = 0;   // total interference power per receiving node
};

struct SinrTriple {
  double exact = 0;      // end-to-end combined SINR
  double harmonic = 0;   // relayed branch replaced by the harmonic-mean bound
  double min_bound = 0;  // relayed branch replaced by the min of its two hops
};

enum class SinrKind { exact, harmonic, min_bound };
enum class OutageKind {
  system,        // min over terminals below threshold
  protocol,      // either terminal below threshold
  per_terminal,  // one chosen terminal below threshold
};

inline double pick(const SinrTriple& t, SinrKind k) {
  switch (k) {
    case SinrKind::exact: return t.exact;
    case SinrKind::harmonic: return t.harmonic;
    default: return t.min_bound;
  }
}

// One draw of all channel and interference powers.  `index` selects the
// draw's counter block.
ChannelDraw sample_draw(const Scenario& s, uint64_t seed, uint64_t index);

// Receive-side SINR triple at one terminal for a given draw.
SinrTriple terminal_sinr(const ChannelDraw& d, const Scenario& s, NodeId terminal);

// Per-draw metric kernels (shared with the analytic layer's definitions).
inline double ber_kernel(double a, double b, double sinr) {
  return a * std::erfc(std::sqrt(b * sinr));
}
inline double rate_kernel(double sinr) { return std::log2(1.0 + sinr) / 3.0; }

// --- estimators ------------------------------------------------------------

struct MetricEstimate {
  double mean = 0.0;
  double std_err = 0.0;
  long long n = 0;
  uint64_t seed = 0;
};

MetricEstimate estimate_outage(const Scenario& s, double gamma_th, OutageKind kind,
                               SinrKind sk, long long n, uint64_t seed,
                               NodeId terminal = NodeId::T1);
// Sum over both terminals of the average bit error probability; (a, b) are
// the erfc-kernel constants of the modulation.
MetricEstimate estimate_sum_ber(const Scenario& s, double a, double b, SinrKind sk,
                                long long n, uint64_t seed);
// Sum over both terminals of the per-phase spectral efficiency.
MetricEstimate estimate_sum_rate(const Scenario& s, SinrKind sk, long long n, uint64_t seed);
// Empirical CDF of one terminal's SINR at each requested abscissa.
std::vector<MetricEstimate> estimate_terminal_cdf(const Scenario& s, NodeId terminal,
                                                  SinrKind sk,
                                                  const std::vector<double>& gammas,
                                                  long long n, uint64_t seed);
// Empirical E[total interference power ^ order] at a node (order 1 or 2).
MetricEstimate estimate_interference_moment(const Scenario& s, NodeId node, int order,
                                            long long n, uint64_t seed);

// --- deterministic parallel reduction --------------------------------------

namespace detail {

inline constexpr long long kChunkDraws = 8192;

// Partition [0, n) into fixed chunks, accumulate each chunk sequentially
// into its own partial sums, and combine partials in chunk order.  The
// result is independent of the worker count.
template <class Add>
std::vector<double> mc_accumulate(long long n, int width, const Add& add) {
  const long long nchunks = (n + kChunkDraws - 1) / kChunkDraws;
  std::vector<std::vector<double>> partials(static_cast<size_t>(nchunks));
  std::atomic<long long> next{0};
  const auto work = [&] {
    for (;;) {
      const long long c = next.fetch_add(1, std::memory_order_relaxed);
      if (c >= nchunks) return;
      std::vector<double> acc(static_cast<size_t>(width), 0.0);
      const long long lo = c * kChunkDraws;
      const long long hi = std::min(n, lo + kChunkDraws);
      for (long long i = lo; i < hi; ++i) add(static_cast<uint64_t>(i), acc.data());
      partials[static_cast<size_t>(c)] = std::move(acc);
    }
  };
  const int workers =
      static_cast<int>(std::min<long long>(worker_count(), std::max<long long>(nchunks, 1)));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  std::vector<double> out(static_cast<size_t>(width), 0.0);
  for (const auto& part : partials)
    for (int j = 0; j < width; ++j) out[static_cast<size_t>(j)] += part[static_cast<size_t>(j)];
  return out;
}

}  // namespace detail

}  // namespace twr
