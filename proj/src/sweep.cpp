#include "twr/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include <json.hpp>

#include "twr/optimizer.hpp"

namespace twr {

namespace {

struct MetricInfo {
  MetricId id;
  const char* name;
  bool mc;
};

constexpr MetricInfo kMetricTable[] = {
    {MetricId::outage_sys_mc, "outage_sys_mc", true},
    {MetricId::outage_pro_mc, "outage_pro_mc", true},
    {MetricId::outage_lb, "outage_lb", false},
    {MetricId::outage_app, "outage_app", false},
    {MetricId::outage_asy, "outage_asy", false},
    {MetricId::ber_mc, "ber_mc", true},
    {MetricId::ber_lb, "ber_lb", false},
    {MetricId::ber_app, "ber_app", false},
    {MetricId::ber_asy, "ber_asy", false},
    {MetricId::rate_mc, "rate_mc", true},
    {MetricId::rate_app, "rate_app", false},
};

const MetricInfo& info(MetricId m) { return kMetricTable[static_cast<int>(m)]; }

}  // namespace

const char* metric_name(MetricId m) { return info(m).name; }
bool metric_is_mc(MetricId m) { return info(m).mc; }

const char* sweep_variable_name(SweepVariable v) {
  switch (v) {
    case SweepVariable::P_dB: return "P_dB";
    case SweepVariable::gamma_th: return "gamma_th";
    case SweepVariable::omega: return "omega";
    case SweepVariable::D: return "D";
    default: return "iterations";
  }
}

namespace {

using nlohmann::json;

[[noreturn]] void parse_fail(const std::string& msg) { throw ParseError("sweep: " + msg); }

void check_keys(const json& obj, const char* where, std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const std::string& key = it.key();
    if (!key.empty() && key[0] == '_') continue;
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) ok = true;
    if (!ok) parse_fail(std::string("unknown field \"") + key + "\" in " + where);
  }
}

SweepVariable parse_variable(const std::string& name) {
  for (SweepVariable v : {SweepVariable::P_dB, SweepVariable::gamma_th, SweepVariable::omega,
                          SweepVariable::D, SweepVariable::iterations})
    if (name == sweep_variable_name(v)) return v;
  parse_fail("unknown variable \"" + name + "\"");
}

MetricId parse_metric(const std::string& name) {
  for (const MetricInfo& mi : kMetricTable)
    if (name == mi.name) return mi.id;
  parse_fail("unknown metric \"" + name + "\"");
}

}  // namespace

SweepSpec parse_sweep_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    parse_fail(e.what());
  }
  if (!root.is_object()) parse_fail("top level must be an object");
  check_keys(root, "sweep",
             {"variable", "range", "metrics", "mc", "sinr_kind", "gamma_th", "modulation",
              "optimize_iters"});

  SweepSpec spec;
  spec.metrics.clear();

  const auto var_it = root.find("variable");
  if (var_it == root.end() || !var_it->is_string()) parse_fail("variable must be a string");
  spec.variable = parse_variable(var_it->get<std::string>());

  const auto range_it = root.find("range");
  if (range_it == root.end() || !range_it->is_object()) parse_fail("range must be an object");
  check_keys(*range_it, "range", {"start", "stop", "steps"});
  for (const char* key : {"start", "stop", "steps"})
    if (!range_it->contains(key) || !(*range_it)[key].is_number())
      parse_fail(std::string("range.") + key + " must be a number");
  spec.start = (*range_it)["start"].get<double>();
  spec.stop = (*range_it)["stop"].get<double>();
  if (!(*range_it)["steps"].is_number_integer()) parse_fail("range.steps must be an integer");
  spec.steps = (*range_it)["steps"].get<int>();

  const auto met_it = root.find("metrics");
  if (met_it == root.end() || !met_it->is_array() || met_it->empty())
    parse_fail("metrics must be a non-empty array");
  for (const auto& m : *met_it) {
    if (!m.is_string()) parse_fail("metrics entries must be strings");
    spec.metrics.push_back(parse_metric(m.get<std::string>()));
  }

  if (auto it = root.find("mc"); it != root.end()) {
    if (!it->is_object()) parse_fail("mc must be an object");
    check_keys(*it, "mc", {"n", "seed"});
    if (auto n = it->find("n"); n != it->end()) {
      if (!n->is_number_integer()) parse_fail("mc.n must be an integer");
      spec.mc_n = n->get<long long>();
    }
    if (auto sd = it->find("seed"); sd != it->end()) {
      if (!sd->is_number_unsigned() && !sd->is_number_integer())
        parse_fail("mc.seed must be an integer");
      spec.mc_seed = sd->get<uint64_t>();
    }
  }
  if (auto it = root.find("sinr_kind"); it != root.end()) {
    if (!it->is_string()) parse_fail("sinr_kind must be a string");
    const std::string k = it->get<std::string>();
    if (k == "exact") {
      spec.sinr_kind = SinrKind::exact;
    } else if (k == "harmonic") {
      spec.sinr_kind = SinrKind::harmonic;
    } else if (k == "min_bound") {
      spec.sinr_kind = SinrKind::min_bound;
    } else {
      parse_fail("sinr_kind must be exact, harmonic, or min_bound");
    }
  }
  if (auto it = root.find("gamma_th"); it != root.end()) {
    if (!it->is_number()) parse_fail("gamma_th must be a number");
    spec.gamma_th = it->get<double>();
  }
  if (auto it = root.find("modulation"); it != root.end()) {
    if (it->is_string()) {
      const std::string m = it->get<std::string>();
      if (m == "bpsk") {
        spec.mod = kBpsk;
      } else if (m == "qpsk") {
        spec.mod = kQpsk;
      } else {
        parse_fail("modulation must be bpsk, qpsk, or an {a, b} object");
      }
    } else if (it->is_object()) {
      check_keys(*it, "modulation", {"a", "b"});
      if (!it->contains("a") || !it->contains("b") || !(*it)["a"].is_number() ||
          !(*it)["b"].is_number())
        parse_fail("modulation object needs numeric a and b");
      spec.mod.a = (*it)["a"].get<double>();
      spec.mod.b = (*it)["b"].get<double>();
    } else {
      parse_fail("modulation must be bpsk, qpsk, or an {a, b} object");
    }
  }
  if (auto it = root.find("optimize_iters"); it != root.end()) {
    if (!it->is_number_integer()) parse_fail("optimize_iters must be an integer");
    spec.optimize_iters = it->get<int>();
  }

  // Range checks beyond syntax.
  auto invalid = [](const std::string& msg) { throw ValidationError("sweep: " + msg); };
  if (spec.steps < 2) invalid("range.steps must be >= 2");
  if (!(std::isfinite(spec.start) && std::isfinite(spec.stop))) invalid("range must be finite");
  if (spec.mc_n < 1) invalid("mc.n must be >= 1");
  if (!(spec.gamma_th > 0.0) || !std::isfinite(spec.gamma_th)) invalid("gamma_th must be > 0");
  if (!(spec.mod.a > 0.0) || !(spec.mod.b > 0.0)) invalid("modulation constants must be > 0");
  if (spec.optimize_iters < 0) invalid("optimize_iters must be >= 0");
  if (spec.variable == SweepVariable::iterations) {
    for (int i = 0; i < spec.steps; ++i) {
      const double x = spec.start + (spec.stop - spec.start) * i / (spec.steps - 1);
      if (std::abs(x - std::round(x)) > 1e-9 || x < -0.5)
        invalid("an iterations sweep needs non-negative integer grid values");
    }
  }
  return spec;
}

namespace {

std::string fmt9(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

struct Cell {
  double value = 0.0;
  double se = 0.0;
  bool has_se = false;
  bool ok = true;
};

Cell analytic_cell(const AnalyticValue& v) {
  Cell c;
  c.value = v.value;
  c.ok = v.diag.converged;
  return c;
}

Cell mc_cell(const MetricEstimate& e) {
  Cell c;
  c.value = e.mean;
  c.se = e.std_err;
  c.has_se = true;
  return c;
}

Cell evaluate_metric(MetricId m, const Scenario& s, const SweepSpec& spec) {
  switch (m) {
    case MetricId::outage_sys_mc:
      return mc_cell(estimate_outage(s, spec.gamma_th, OutageKind::system, spec.sinr_kind,
                                     spec.mc_n, spec.mc_seed));
    case MetricId::outage_pro_mc:
      return mc_cell(estimate_outage(s, spec.gamma_th, OutageKind::protocol, spec.sinr_kind,
                                     spec.mc_n, spec.mc_seed));
    case MetricId::outage_lb:
      return analytic_cell(protocol_outage(s, spec.gamma_th, CdfMethod::lower_bound));
    case MetricId::outage_app:
      return analytic_cell(protocol_outage(s, spec.gamma_th, CdfMethod::approx));
    case MetricId::outage_asy: {
      Cell c;
      c.value = protocol_outage_asymptotic(s, spec.gamma_th);
      return c;
    }
    case MetricId::ber_mc:
      return mc_cell(estimate_sum_ber(s, spec.mod.a, spec.mod.b, spec.sinr_kind, spec.mc_n,
                                      spec.mc_seed));
    case MetricId::ber_lb:
      return analytic_cell(sum_ber(s, spec.mod, CdfMethod::lower_bound));
    case MetricId::ber_app:
      return analytic_cell(sum_ber(s, spec.mod, CdfMethod::approx));
    case MetricId::ber_asy: {
      Cell c;
      c.value = sum_ber_asymptotic(s, spec.mod);
      return c;
    }
    case MetricId::rate_mc:
      return mc_cell(estimate_sum_rate(s, spec.sinr_kind, spec.mc_n, spec.mc_seed));
    case MetricId::rate_app:
    default:
      return analytic_cell(ergodic_sum_rate(s));
  }
}

}  // namespace

SweepOutcome run_sweep(const Scenario& base, const SweepSpec& spec, std::ostream& out) {
  validate_scenario(base);
  // Requested metrics in canonical column order, deduplicated.
  std::vector<MetricId> cols;
  for (const MetricInfo& mi : kMetricTable)
    if (std::find(spec.metrics.begin(), spec.metrics.end(), mi.id) != spec.metrics.end())
      cols.push_back(mi.id);

  out << sweep_variable_name(spec.variable);
  for (MetricId m : cols) {
    out << ',' << metric_name(m);
    if (metric_is_mc(m)) out << ',' << metric_name(m) << "_se";
  }
  out << '\n';

  SweepOutcome outcome;
  for (int i = 0; i < spec.steps; ++i) {
    const double x = spec.start + (spec.stop - spec.start) * i / (spec.steps - 1);
    Scenario s = base;
    double gamma_th = spec.gamma_th;
    int opt_iters = spec.optimize_iters;
    switch (spec.variable) {
      case SweepVariable::P_dB: s.power = std::pow(10.0, x / 10.0); break;
      case SweepVariable::gamma_th: gamma_th = x; break;
      case SweepVariable::omega: s.omega = x; break;
      case SweepVariable::D: s.d = x; break;
      case SweepVariable::iterations: opt_iters = static_cast<int>(std::llround(x)); break;
    }
    validate_scenario(s);
    if (opt_iters > 0) {
      const OptResult r = joint_optimize(s, opt_iters, /*grid_fallback=*/true);
      s.omega = r.omega;
      s.d = r.d;
    }
    SweepSpec point_spec = spec;
    point_spec.gamma_th = gamma_th;

    out << fmt9(x);
    for (MetricId m : cols) {
      const Cell c = evaluate_metric(m, s, point_spec);
      if (!c.ok) {
        outcome.all_converged = false;
        out << ',' << fmt9(std::numeric_limits<double>::quiet_NaN());
      } else {
        out << ',' << fmt9(c.value);
      }
      if (metric_is_mc(m)) out << ',' << fmt9(c.se);
    }
    out << '\n';
    ++outcome.rows;
  }
  return outcome;
}

namespace {

// ---- preset bundles --------------------------------------------------------
//
// Geometry and thresholds are shared: path-loss exponent 3, midpoint relay,
// even power split, outage threshold 7, and a fixed Monte Carlo seed.

constexpr const char* kScenarioTwo = R"({
  "P_dB": 20, "v": 3, "D": 0.5, "omega": 0.5,
  "interferers": {
    "T1": {"L": 2, "P_over_P_I_dB": 20},
    "T2": {"L": 2, "P_over_P_I_dB": 20},
    "R":  {"L": 2, "P_over_P_I_dB": 20}
  }
})";

constexpr const char* kScenarioFiveEven = R"({
  "P_dB": 20, "v": 3, "D": 0.5, "omega": 0.5,
  "interferers": {
    "T1": {"L": 5, "P_over_P_I_dB": 20},
    "T2": {"L": 5, "P_over_P_I_dB": 20},
    "R":  {"L": 5, "P_over_P_I_dB": 20}
  }
})";

constexpr const char* kScenarioFiveLight = R"({
  "P_dB": 20, "v": 3, "D": 0.5, "omega": 0.5,
  "interferers": {
    "T1": {"L": 5, "P_over_P_I_dB": 30},
    "T2": {"L": 5, "P_over_P_I_dB": 30},
    "R":  {"L": 5, "P_over_P_I_dB": 30}
  }
})";

constexpr const char* kScenarioAsymTerminals = R"({
  "P_dB": 10, "v": 3, "D": 0.5, "omega": 0.5,
  "interferers": {
    "T1": {"L": 5, "P_over_P_I_dB": 25},
    "T2": {"L": 5, "P_over_P_I_dB": 15},
    "R":  {"L": 5, "P_over_P_I_dB": 25}
  }
})";

constexpr const char* kScenarioBerOpt = R"({
  "P_dB": 20, "v": 3, "D": 0.5, "omega": 0.5,
  "interferers": {
    "T1": {"L": 5, "P_over_P_I_dB": 20},
    "T2": {"L": 5, "P_over_P_I_dB": 20},
    "R":  {"L": 5, "P_over_P_I_dB": 10}
  }
})";

const std::vector<Preset> kPresets = {
    {"fig2", kScenarioTwo, R"({
      "variable": "P_dB", "range": {"start": 0, "stop": 40, "steps": 21},
      "metrics": ["outage_sys_mc", "outage_pro_mc"],
      "mc": {"n": 100000, "seed": 20260822}, "sinr_kind": "exact", "gamma_th": 7
    })"},
    {"fig3", kScenarioTwo, R"({
      "variable": "P_dB", "range": {"start": 0, "stop": 40, "steps": 21},
      "metrics": ["outage_pro_mc", "outage_lb", "outage_app", "outage_asy"],
      "mc": {"n": 100000, "seed": 20260822}, "sinr_kind": "exact", "gamma_th": 7
    })"},
    {"fig4", kScenarioFiveEven, R"({
      "variable": "P_dB", "range": {"start": 0, "stop": 40, "steps": 21},
      "metrics": ["ber_mc", "ber_lb", "ber_app", "ber_asy"],
      "mc": {"n": 100000, "seed": 20260822}, "sinr_kind": "exact", "modulation": "bpsk"
    })"},
    {"fig5", kScenarioFiveLight, R"({
      "variable": "P_dB", "range": {"start": 0, "stop": 35, "steps": 15},
      "metrics": ["rate_mc", "rate_app"],
      "mc": {"n": 100000, "seed": 20260822}, "sinr_kind": "min_bound"
    })"},
    {"fig6", kScenarioAsymTerminals, R"({
      "variable": "iterations", "range": {"start": 0, "stop": 5, "steps": 6},
      "metrics": ["outage_pro_mc", "outage_asy"],
      "mc": {"n": 100000, "seed": 20260822}, "sinr_kind": "exact", "gamma_th": 7
    })"},
    {"fig7", kScenarioAsymTerminals, R"({
      "variable": "P_dB", "range": {"start": 0, "stop": 40, "steps": 21},
      "metrics": ["outage_pro_mc", "outage_asy"],
      "mc": {"n": 100000, "seed": 20260822}, "sinr_kind": "exact", "gamma_th": 7,
      "optimize_iters": 3
    })"},
    {"fig8", kScenarioBerOpt, R"({
      "variable": "P_dB", "range": {"start": 0, "stop": 40, "steps": 21},
      "metrics": ["ber_mc", "ber_asy"],
      "mc": {"n": 100000, "seed": 20260822}, "sinr_kind": "exact", "modulation": "bpsk",
      "optimize_iters": 3
    })"},
};

}  // namespace

const std::vector<Preset>& presets() { return kPresets; }

const Preset* find_preset(const std::string& name) {
  for (const Preset& p : kPresets)
    if (name == p.name) return &p;
  return nullptr;
}

}  // namespace twr
