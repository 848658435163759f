#include "twr/mcsim.hpp"

#include <algorithm>
#include <cstdlib>

#include "twr/errors.hpp"

namespace twr {

namespace {

constexpr uint64_t kGolden = 0x9E3779B97F4A7C15ull;

uint64_t mix_finalize(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

uint64_t mix_u64(uint64_t seed, uint64_t k) { return mix_finalize(seed + (k + 1) * kGolden); }

double mix_unit(uint64_t seed, uint64_t k) {
  return static_cast<double>(mix_u64(seed, k) >> 11) * 0x1.0p-53;
}

double mix_exponential(uint64_t seed, uint64_t k, double mean) {
  return -mean * std::log1p(-mix_unit(seed, k));
}

int worker_count() {
  const char* env = std::getenv("TWR_THREADS");
  if (env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long t = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && t > 0) return static_cast<int>(std::min(t, 256L));
    // 0 or malformed falls through to auto-detection
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

namespace {

// Precomputed per-scenario sampling plan: mean powers for every counter slot.
struct DrawPlan {
  double gbar0, gbar1, gbar2;
  std::vector<double> xi_t1, xi_t2, xi_r;  // per-interferer mean received powers
  uint64_t slots;

  static DrawPlan make(const Scenario& s) {
    DrawPlan p;
    p.gbar0 = s.gbar0();
    p.gbar1 = s.gbar1();
    p.gbar2 = s.gbar2();
    const auto node_means = [&s](NodeId n) {
      const InterfererSpec& spec = s.spec(n);
      std::vector<double> xi;
      if (!spec.active()) return xi;
      const double power = spec.resolved_power(s.power);
      const std::vector<double> w = spec.variances.empty()
                                        ? default_interferer_variances(spec.count)
                                        : spec.variances;
      xi.reserve(w.size());
      for (double wk : w) xi.push_back(power * wk);
      return xi;
    };
    p.xi_t1 = node_means(NodeId::T1);
    p.xi_t2 = node_means(NodeId::T2);
    p.xi_r = node_means(NodeId::R);
    p.slots = 3 + p.xi_t1.size() + p.xi_t2.size() + p.xi_r.size();
    return p;
  }
};

ChannelDraw sample_from_plan(const DrawPlan& p, uint64_t seed, uint64_t index) {
  ChannelDraw d;
  uint64_t k = index * p.slots;
  d.g0 = mix_exponential(seed, k++, p.gbar0);
  d.g1 = mix_exponential(seed, k++, p.gbar1);
  d.g2 = mix_exponential(seed, k++, p.gbar2);
  for (double xi : p.xi_t1) d.i_t1 += mix_exponential(seed, k++, xi);
  for (double xi : p.xi_t2) d.i_t2 += mix_exponential(seed, k++, xi);
  for (double xi : p.xi_r) d.i_r += mix_exponential(seed, k++, xi);
  return d;
}

// SINR triple at the terminal that receives over broadcast hop `g_bcast`
// while the partner's signal reaches the relay over `g_uplink`.  `w_fwd` is
// the relay power fraction carrying the partner's signal toward this
// terminal; `w_oth` the complementary fraction.
SinrTriple sinr_core(double g0, double g_bcast, double g_uplink, double g_term,
                     double g_relay, double w_fwd, double w_oth, Mutation mut) {
  SinrTriple t;
  const double yd = g0 / (g_term + 1.0);
  const double y1 = g_bcast / (g_term + 1.0);
  const double cross = mut == Mutation::drop_interference_term ? 0.0 : w_oth * g_term;
  const double den = g_relay + cross + w_oth + 1.0;
  const double y2 = w_fwd * g_uplink / den;
  t.exact = yd + y1 * y2 / (y1 + y2 + (g_relay + 1.0) / den);
  t.harmonic = yd + (y1 + y2 > 0.0 ? y1 * y2 / (y1 + y2) : 0.0);
  t.min_bound = yd + std::min(y1, y2);
  return t;
}

SinrTriple sinr_at(const ChannelDraw& d, const Scenario& s, NodeId terminal, Mutation mut) {
  if (terminal == NodeId::T1)
    return sinr_core(d.g0, d.g1, d.g2, d.i_t1, d.i_r, s.omega2(), s.omega1(), mut);
  return sinr_core(d.g0, d.g2, d.g1, d.i_t2, d.i_r, s.omega1(), s.omega2(), mut);
}

void require_draws(long long n) {
  if (n < 1) throw ValidationError("Monte Carlo sample count must be >= 1");
}

double bernoulli_se(double p, long long n) {
  const double var = std::max(p * (1.0 - p), 0.0);
  return std::sqrt(var / static_cast<double>(n));
}

}  // namespace

ChannelDraw sample_draw(const Scenario& s, uint64_t seed, uint64_t index) {
  return sample_from_plan(DrawPlan::make(s), seed, index);
}

SinrTriple terminal_sinr(const ChannelDraw& d, const Scenario& s, NodeId terminal) {
  if (terminal == NodeId::R) throw ValidationError("the relay has no receive SINR");
  return sinr_at(d, s, terminal, active_mutation());
}

MetricEstimate estimate_outage(const Scenario& s, double gamma_th, OutageKind kind,
                               SinrKind sk, long long n, uint64_t seed, NodeId terminal) {
  require_draws(n);
  const DrawPlan plan = DrawPlan::make(s);
  const Mutation mut = active_mutation();
  // Accumulator slots: terminal-1 outage, terminal-2 outage, their product,
  // and the union indicator — all from the same draws.
  const std::vector<double> acc = detail::mc_accumulate(n, 4, [&](uint64_t i, double* a) {
    const ChannelDraw d = sample_from_plan(plan, seed, i);
    const double v1 = pick(sinr_at(d, s, NodeId::T1, mut), sk);
    const double v2 = pick(sinr_at(d, s, NodeId::T2, mut), sk);
    const double x = v1 < gamma_th ? 1.0 : 0.0;
    const double y = v2 < gamma_th ? 1.0 : 0.0;
    a[0] += x;
    a[1] += y;
    a[2] += x * y;
    a[3] += (x + y > 0.0) ? 1.0 : 0.0;
  });
  const double nn = static_cast<double>(n);
  const double px = acc[0] / nn, py = acc[1] / nn, pxy = acc[2] / nn, por = acc[3] / nn;

  MetricEstimate est;
  est.n = n;
  est.seed = seed;
  switch (kind) {
    case OutageKind::system:
      est.mean = por;
      est.std_err = bernoulli_se(por, n);
      break;
    case OutageKind::per_terminal: {
      const double p = terminal == NodeId::T1 ? px : py;
      est.mean = p;
      est.std_err = bernoulli_se(p, n);
      break;
    }
    case OutageKind::protocol:
    default: {
      // Mean computed through the complement identity so the estimator is
      // exactly 1 - (1-px)(1-py) + correlation correction from shared draws;
      // stderr by the delta method on (px, py) with their covariance.
      est.mean = px + py - px * py;
      const double varx = std::max(px * (1.0 - px), 0.0);
      const double vary = std::max(py * (1.0 - py), 0.0);
      const double cov = pxy - px * py;
      const double grad_x = 1.0 - py, grad_y = 1.0 - px;
      const double var = grad_x * grad_x * varx + grad_y * grad_y * vary +
                         2.0 * grad_x * grad_y * cov;
      est.std_err = std::sqrt(std::max(var, 0.0) / nn);
      break;
    }
  }
  return est;
}

namespace {

MetricEstimate mean_from_moments(double sum, double sum_sq, long long n, uint64_t seed) {
  MetricEstimate est;
  est.n = n;
  est.seed = seed;
  const double nn = static_cast<double>(n);
  est.mean = sum / nn;
  const double var = std::max(sum_sq / nn - est.mean * est.mean, 0.0);
  est.std_err = std::sqrt(var / nn);
  return est;
}

}  // namespace

MetricEstimate estimate_sum_ber(const Scenario& s, double a, double b, SinrKind sk,
                                long long n, uint64_t seed) {
  require_draws(n);
  const DrawPlan plan = DrawPlan::make(s);
  const Mutation mut = active_mutation();
  const std::vector<double> acc = detail::mc_accumulate(n, 2, [&](uint64_t i, double* out) {
    const ChannelDraw d = sample_from_plan(plan, seed, i);
    const double v = ber_kernel(a, b, pick(sinr_at(d, s, NodeId::T1, mut), sk)) +
                     ber_kernel(a, b, pick(sinr_at(d, s, NodeId::T2, mut), sk));
    out[0] += v;
    out[1] += v * v;
  });
  return mean_from_moments(acc[0], acc[1], n, seed);
}

MetricEstimate estimate_sum_rate(const Scenario& s, SinrKind sk, long long n, uint64_t seed) {
  require_draws(n);
  const DrawPlan plan = DrawPlan::make(s);
  const Mutation mut = active_mutation();
  const std::vector<double> acc = detail::mc_accumulate(n, 2, [&](uint64_t i, double* out) {
    const ChannelDraw d = sample_from_plan(plan, seed, i);
    const double v = rate_kernel(pick(sinr_at(d, s, NodeId::T1, mut), sk)) +
                     rate_kernel(pick(sinr_at(d, s, NodeId::T2, mut), sk));
    out[0] += v;
    out[1] += v * v;
  });
  return mean_from_moments(acc[0], acc[1], n, seed);
}

std::vector<MetricEstimate> estimate_terminal_cdf(const Scenario& s, NodeId terminal,
                                                  SinrKind sk,
                                                  const std::vector<double>& gammas,
                                                  long long n, uint64_t seed) {
  require_draws(n);
  if (terminal == NodeId::R) throw ValidationError("the relay has no receive SINR");
  if (gammas.empty()) return {};
  const DrawPlan plan = DrawPlan::make(s);
  const Mutation mut = active_mutation();
  const int m = static_cast<int>(gammas.size());
  const std::vector<double> acc = detail::mc_accumulate(n, m, [&](uint64_t i, double* out) {
    const ChannelDraw d = sample_from_plan(plan, seed, i);
    const double v = pick(sinr_at(d, s, terminal, mut), sk);
    for (int j = 0; j < m; ++j)
      if (v < gammas[static_cast<size_t>(j)]) out[j] += 1.0;
  });
  std::vector<MetricEstimate> res(gammas.size());
  for (size_t j = 0; j < gammas.size(); ++j) {
    const double p = acc[j] / static_cast<double>(n);
    res[j].mean = p;
    res[j].std_err = bernoulli_se(p, n);
    res[j].n = n;
    res[j].seed = seed;
  }
  return res;
}

MetricEstimate estimate_interference_moment(const Scenario& s, NodeId node, int order,
                                            long long n, uint64_t seed) {
  require_draws(n);
  if (order != 1 && order != 2)
    throw ValidationError("interference moment order must be 1 or 2");
  const DrawPlan plan = DrawPlan::make(s);
  const std::vector<double> acc = detail::mc_accumulate(n, 2, [&](uint64_t i, double* out) {
    const ChannelDraw d = sample_from_plan(plan, seed, i);
    const double g = node == NodeId::T1 ? d.i_t1 : node == NodeId::T2 ? d.i_t2 : d.i_r;
    const double v = order == 1 ? g : g * g;
    out[0] += v;
    out[1] += v * v;
  });
  return mean_from_moments(acc[0], acc[1], n, seed);
}

}  // namespace twr
