#include "twr/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace twr {

namespace {

bool finite_pos(double x) { return std::isfinite(x) && x > 0.0; }

// Shared by validate_scenario and build_profile.
void validate_interferers(const InterfererSpec& spec, const char* node) {
  auto fail = [&](const std::string& msg) {
    throw ValidationError(std::string("interferers.") + node + ": " + msg);
  };
  if (spec.count < 1) fail("count must be >= 1");
  if (!(std::isfinite(spec.power) && spec.power >= 0.0)) fail("power must be finite and >= 0");
  if (!(std::isfinite(spec.power_ratio) && spec.power_ratio >= 0.0))
    fail("power ratio must be finite and >= 0");
  if (spec.power > 0.0 && spec.power_ratio > 0.0)
    fail("give either an absolute power or a power ratio, not both");
  if (!spec.variances.empty()) {
    if (static_cast<int>(spec.variances.size()) != spec.count)
      fail("variances list must have exactly `count` entries");
    for (double w : spec.variances)
      if (!finite_pos(w)) fail("variances must be finite and > 0");
  }
}

}  // namespace

double Scenario::gbar0() const { return power; }
double Scenario::gbar1() const { return power * std::pow(1.0 - d, -v); }
double Scenario::gbar2() const { return power * std::pow(d, -v); }

std::vector<double> default_interferer_variances(int count) {
  if (count <= 1) return {1.0};
  std::vector<double> w(count);
  for (int k = 0; k < count; ++k)
    w[k] = 0.1 + 0.9 * static_cast<double>(k) / static_cast<double>(count - 1);
  return w;
}

void interference_moments(const InterfererSpec& spec, double scenario_power,
                          double* mean, double* mean_sq) {
  *mean = 0.0;
  *mean_sq = 0.0;
  if (!spec.active()) return;
  const double p = spec.resolved_power(scenario_power);
  std::vector<double> w = spec.variances.empty()
                              ? default_interferer_variances(spec.count)
                              : spec.variances;
  double s1 = 0.0, s2 = 0.0;
  for (double wk : w) {
    const double xi = p * wk;
    s1 += xi;
    s2 += xi * xi;
  }
  *mean = s1;
  *mean_sq = s1 * s1 + s2;
}

InterferenceProfile build_profile(const InterfererSpec& spec, double scenario_power,
                                  TiePolicy policy) {
  InterferenceProfile prof;
  if (!spec.active()) return prof;
  validate_interferers(spec, "?");
  const double p = spec.resolved_power(scenario_power);
  if (!finite_pos(p))
    throw ValidationError("interferer power resolves to a non-positive value");

  std::vector<double> w = spec.variances.empty()
                              ? default_interferer_variances(spec.count)
                              : spec.variances;
  const size_t L = w.size();
  prof.xi.resize(L);
  for (size_t k = 0; k < L; ++k) prof.xi[k] = p * w[k];

  // Resolve exact collisions of component means.
  for (size_t k = 0; k < L; ++k) {
    int dup = 0;
    for (size_t i = 0; i < k; ++i)
      if (prof.xi[i] == prof.xi[k]) ++dup;
    if (dup > 0) {
      if (policy == TiePolicy::reject)
        throw TieError("two interferer components have equal mean power " +
                       std::to_string(prof.xi[k]) +
                       "; set distinct variances or enable the perturb tie policy");
      prof.xi[k] *= 1.0 + static_cast<double>(dup) * 1e-9;
    }
  }
  for (size_t k = 0; k < L; ++k)
    for (size_t i = 0; i < k; ++i)
      if (prof.xi[i] == prof.xi[k])
        throw TieError("interferer component means still collide after perturbation");

  // Conditioning of the partial-fraction expansion.
  const double xi_max = *std::max_element(prof.xi.begin(), prof.xi.end());
  double gap_min = std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < L; ++k)
    for (size_t i = 0; i < k; ++i)
      gap_min = std::min(gap_min, std::abs(prof.xi[k] - prof.xi[i]));
  if (L >= 2 && gap_min / xi_max < 1e-3) prof.ill_conditioned = true;

  // Partial-fraction weights of the sum-of-exponentials density:
  //   phi_k = xi_k^(L-2) * prod_{i != k} 1 / (xi_k - xi_i).
  // The xi^(L-2) factor carries the variance weighting that makes the
  // expansion integrate to one for three or more components; it reduces to
  // 1/xi for a single component and to +-1/(xi_a - xi_b) for two.
  prof.phi.resize(L);
  for (size_t k = 0; k < L; ++k) {
    double val = std::pow(prof.xi[k], static_cast<double>(L) - 2.0);
    for (size_t i = 0; i < L; ++i)
      if (i != k) val /= prof.xi[k] - prof.xi[i];
    prof.phi[k] = val;
  }

  double s1 = 0.0, s2 = 0.0;
  for (double xi : prof.xi) {
    s1 += xi;
    s2 += xi * xi;
  }
  prof.mean = s1;
  prof.mean_sq = s1 * s1 + s2;

  // Self-check: the weights must reproduce the distribution's first moments.
  // With near-coincident means the cancellation error can exceed the bound,
  // which the ill_conditioned flag already reports.
  double m0 = 0.0, m1 = 0.0, m2 = 0.0;
  for (size_t k = 0; k < L; ++k) {
    m0 += prof.phi[k] * prof.xi[k];
    m1 += prof.phi[k] * prof.xi[k] * prof.xi[k];
    m2 += 2.0 * prof.phi[k] * prof.xi[k] * prof.xi[k] * prof.xi[k];
  }
  const double resid = std::max({std::abs(m0 - 1.0), std::abs(m1 - prof.mean) / prof.mean,
                                 std::abs(m2 - prof.mean_sq) / prof.mean_sq});
  if (!(resid < 1e-6)) prof.ill_conditioned = true;
  return prof;
}

InterferenceProfile build_profile(const Scenario& s, NodeId node) {
  try {
    return build_profile(s.spec(node), s.power, s.tie_policy);
  } catch (const TieError& e) {
    throw TieError(std::string(node_name(node)) + ": " + e.what());
  }
}

double interference_pdf(const InterferenceProfile& p, double t) {
  if (!p.active() || t < 0.0) return 0.0;
  double acc = 0.0;
  for (size_t k = 0; k < p.size(); ++k) acc += p.phi[k] * std::exp(-t / p.xi[k]);
  return acc;
}

Scenario swap_roles(const Scenario& s) {
  Scenario r = s;
  r.d = 1.0 - s.d;
  r.omega = 1.0 - s.omega;
  r.spec(NodeId::T1) = s.spec(NodeId::T2);
  r.spec(NodeId::T2) = s.spec(NodeId::T1);
  return r;
}

void validate_scenario(const Scenario& s) {
  if (!finite_pos(s.power)) throw ValidationError("power must be finite and > 0");
  if (!(std::isfinite(s.v) && s.v >= 2.0)) throw ValidationError("path-loss exponent must be >= 2");
  if (!(std::isfinite(s.d) && s.d > 0.0 && s.d < 1.0))
    throw ValidationError("relay distance must lie strictly inside (0, 1)");
  if (!(std::isfinite(s.omega) && s.omega > 0.0 && s.omega < 1.0))
    throw ValidationError("omega must lie strictly inside (0, 1)");
  for (NodeId n : {NodeId::T1, NodeId::T2, NodeId::R})
    validate_interferers(s.spec(n), node_name(n));
}

namespace {

using nlohmann::json;

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

[[noreturn]] void parse_fail(const std::string& msg) { throw ParseError("scenario: " + msg); }

void check_keys(const json& obj, const char* where, std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const std::string& key = it.key();
    if (!key.empty() && key[0] == '_') continue;  // comment / version keys
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) ok = true;
    if (!ok) parse_fail(std::string("unknown field \"") + key + "\" in " + where);
  }
}

double num_field(const json& obj, const char* where, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_number())
    parse_fail(std::string(where) + "." + key + " must be a number");
  return it->get<double>();
}

InterfererSpec parse_interferers(const json& obj, const std::string& where) {
  if (!obj.is_object()) parse_fail(where + " must be an object");
  check_keys(obj, where.c_str(), {"L", "P_I_dB", "P_over_P_I_dB", "variances"});
  InterfererSpec spec;
  if (auto it = obj.find("L"); it != obj.end()) {
    if (!it->is_number_integer()) parse_fail(where + ".L must be an integer");
    spec.count = it->get<int>();
  }
  const auto abs_it = obj.find("P_I_dB");
  const auto rel_it = obj.find("P_over_P_I_dB");
  if (abs_it != obj.end() && rel_it != obj.end())
    parse_fail(where + ": give P_I_dB or P_over_P_I_dB, not both");
  if (abs_it != obj.end()) {
    if (abs_it->is_null()) {
      spec.power = 0.0;  // interference switched off at this node
    } else if (abs_it->is_number()) {
      spec.power = db_to_linear(abs_it->get<double>());
    } else {
      parse_fail(where + ".P_I_dB must be a number or null");
    }
  } else if (rel_it != obj.end()) {
    if (!rel_it->is_number()) parse_fail(where + ".P_over_P_I_dB must be a number");
    spec.power_ratio = db_to_linear(rel_it->get<double>());
  }
  if (auto it = obj.find("variances"); it != obj.end()) {
    if (!it->is_array()) parse_fail(where + ".variances must be an array");
    for (const auto& w : *it) {
      if (!w.is_number()) parse_fail(where + ".variances entries must be numbers");
      spec.variances.push_back(w.get<double>());
    }
  }
  return spec;
}

}  // namespace

Scenario parse_scenario_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    parse_fail(e.what());
  }
  if (!root.is_object()) parse_fail("top level must be an object");
  check_keys(root, "scenario", {"P_dB", "v", "D", "omega", "interferers", "tie_policy"});

  Scenario s;
  s.power = db_to_linear(num_field(root, "scenario", "P_dB"));
  s.v = num_field(root, "scenario", "v");
  s.d = num_field(root, "scenario", "D");
  s.omega = num_field(root, "scenario", "omega");
  if (auto it = root.find("tie_policy"); it != root.end()) {
    if (!it->is_string()) parse_fail("tie_policy must be a string");
    const std::string p = it->get<std::string>();
    if (p == "reject") {
      s.tie_policy = TiePolicy::reject;
    } else if (p == "perturb") {
      s.tie_policy = TiePolicy::perturb;
    } else {
      parse_fail("tie_policy must be \"reject\" or \"perturb\"");
    }
  }
  const auto it = root.find("interferers");
  if (it != root.end()) {
    if (!it->is_object()) parse_fail("interferers must be an object");
    check_keys(*it, "interferers", {"T1", "T2", "R"});
    for (NodeId n : {NodeId::T1, NodeId::T2, NodeId::R}) {
      const auto node_it = it->find(node_name(n));
      if (node_it != it->end())
        s.spec(n) = parse_interferers(*node_it, std::string("interferers.") + node_name(n));
    }
  }
  validate_scenario(s);
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_json(buf.str());
}

}  // namespace twr
