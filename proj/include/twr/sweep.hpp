// Parameter sweeps: one independent variable, a set of requested metric
// columns, CSV output with fixed column order and %.9g formatting.
// Named presets bundle a scenario and a sweep spec for the standard
// experiment family.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "twr/mcsim.hpp"
#include "twr/metrics.hpp"

namespace twr {

enum class SweepVariable { P_dB, gamma_th, omega, D, iterations };

// Canonical column order; every CSV lists its requested metrics in this
// order, each Monte Carlo column followed by its standard-error column.
enum class MetricId {
  outage_sys_mc,
  outage_pro_mc,
  outage_lb,
  outage_app,
  outage_asy,
  ber_mc,
  ber_lb,
  ber_app,
  ber_asy,
  rate_mc,
  rate_app,
};

const char* metric_name(MetricId m);
bool metric_is_mc(MetricId m);
const char* sweep_variable_name(SweepVariable v);

struct SweepSpec {
  SweepVariable variable = SweepVariable::P_dB;
  double start = 0.0;
  double stop = 40.0;
  int steps = 21;  // >= 2
  std::vector<MetricId> metrics;
  long long mc_n = 100000;
  uint64_t mc_seed = 20260822;
  SinrKind sinr_kind = SinrKind::exact;
  double gamma_th = 7.0;
  ModulationConstants mod = kBpsk;
  // When > 0 (and the variable is not `iterations`), run this many joint
  // power-split/placement iterations at every point before evaluating.
  int optimize_iters = 0;
};

SweepSpec parse_sweep_json(const std::string& text);

struct Preset {
  const char* name;
  const char* scenario_json;
  const char* sweep_json;
};
const std::vector<Preset>& presets();
const Preset* find_preset(const std::string& name);

struct SweepOutcome {
  bool all_converged = true;  // false: some analytic cell was written as NaN
  int rows = 0;
};

// Evaluate the sweep over `base` and stream the CSV to `out`.
SweepOutcome run_sweep(const Scenario& base, const SweepSpec& spec, std::ostream& out);

}  // namespace twr
