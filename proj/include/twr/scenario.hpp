// Scenario model: node geometry, transmit power, power split, and the
// co-channel interference population at each receiving node.
//
// Conventions (all powers are linear and normalized to unit noise power):
//   * The two terminals are one distance unit apart; the relay sits on the
//     line between them at distance d from terminal 2 (so 1-d from
//     terminal 1).  Mean channel gains follow a power-law path loss with
//     exponent v: direct link 1, terminal-1 hop (1-d)^-v, terminal-2 hop d^-v.
//   * omega in (0,1) is the fraction of relay power spent forwarding
//     terminal 2's signal (received by terminal 1); 1-omega forwards
//     terminal 1's signal.
//   * Each receiving node sees `count` independent Rayleigh-faded
//     interferers, all transmitting at the same power, with per-interferer
//     fading variances that default to an evenly spaced schedule.
#pragma once

#include <array>
#include <string>
#include <vector>

#include "twr/errors.hpp"

namespace twr {

enum class NodeId { T1 = 0, T2 = 1, R = 2 };

inline const char* node_name(NodeId n) {
  switch (n) {
    case NodeId::T1: return "T1";
    case NodeId::T2: return "T2";
    default: return "R";
  }
}

// What to do when two interferer components end up with exactly equal mean
// received power (which makes the partial-fraction weights singular).
enum class TiePolicy { reject, perturb };

struct InterfererSpec {
  int count = 1;                  // number of interferers L (>= 1)
  double power = 0.0;             // absolute per-interferer power, linear; 0 = none
  double power_ratio = 0.0;       // if > 0: per-interferer power = scenario power / ratio
  std::vector<double> variances;  // fading variances; empty selects the default schedule

  bool active() const { return power > 0.0 || power_ratio > 0.0; }
  // Per-interferer transmit power given the scenario transmit power.
  double resolved_power(double scenario_power) const {
    return power_ratio > 0.0 ? scenario_power / power_ratio : power;
  }
};

struct Scenario {
  double power = 1.0;  // common transmit power P (linear, unit-noise normalized)
  double v = 3.0;      // path-loss exponent (>= 2)
  double d = 0.5;      // terminal-2 -> relay distance, in (0,1)
  double omega = 0.5;  // relay power fraction forwarding terminal 2's signal
  std::array<InterfererSpec, 3> interferers{};  // indexed by NodeId
  TiePolicy tie_policy = TiePolicy::reject;

  double gbar0() const;  // mean SNR of the direct link
  double gbar1() const;  // mean SNR of the terminal-1 <-> relay hop
  double gbar2() const;  // mean SNR of the terminal-2 <-> relay hop
  double omega1() const { return 1.0 - omega; }
  double omega2() const { return omega; }

  const InterfererSpec& spec(NodeId n) const { return interferers[static_cast<int>(n)]; }
  InterfererSpec& spec(NodeId n) { return interferers[static_cast<int>(n)]; }
};

// Hyper-exponential model of the total interference power at one node:
// pdf(t) = sum_k phi_k * exp(-t / xi_k), where xi_k is the mean received
// power of component k and the weights phi_k come from a partial-fraction
// expansion (they are not a probability vector; some are negative).
struct InterferenceProfile {
  std::vector<double> xi;   // component means, pairwise distinct, all > 0
  std::vector<double> phi;  // partial-fraction weights (variance-weighted for 3+ components)
  double mean = 0.0;        // E[total power] = sum_k xi_k
  double mean_sq = 0.0;     // E[(total power)^2] = (sum xi)^2 + sum xi^2
  bool ill_conditioned = false;  // near-coincident means: weights lose accuracy

  bool active() const { return !xi.empty(); }
  size_t size() const { return xi.size(); }
};

// Default fading-variance schedule: evenly spaced on [0.1, 1.0] for two or
// more interferers, a single unit-variance interferer otherwise.
std::vector<double> default_interferer_variances(int count);

// Mean and mean-square of the total interference power at a node.  Cheap,
// moment-only view that is valid even when component means are tied.
void interference_moments(const InterfererSpec& spec, double scenario_power,
                          double* mean, double* mean_sq);

// Full hyper-exponential profile (partial-fraction weights included).
// Throws TieError under TiePolicy::reject when two component means collide;
// under TiePolicy::perturb, nudges duplicates apart deterministically.
InterferenceProfile build_profile(const InterfererSpec& spec, double scenario_power,
                                  TiePolicy policy);
InterferenceProfile build_profile(const Scenario& s, NodeId node);

// Density of the total interference power under the profile.
double interference_pdf(const InterferenceProfile& p, double t);

// The scenario as seen from terminal 2's perspective: terminal roles (and
// their hop gains, interference populations, and power fractions) exchanged.
// Involution: swap_roles(swap_roles(s)) == s.
Scenario swap_roles(const Scenario& s);

// Range checks; throws ValidationError with a field-specific message.
void validate_scenario(const Scenario& s);

// JSON front-ends.  Powers are given in dB in the files and converted to
// linear exactly once here.  See README.md for the schema.
Scenario parse_scenario_json(const std::string& text);
Scenario load_scenario(const std::string& path);

}  // namespace twr
