#include "twr/validate.hpp"

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <sstream>

#include <sys/wait.h>

#include "twr/mcsim.hpp"
#include "twr/metrics.hpp"
#include "twr/mutation.hpp"
#include "twr/optimizer.hpp"
#include "twr/sinrcdf.hpp"
#include "twr/sweep.hpp"

namespace twr {

namespace {

constexpr uint64_t kSeed = 20260822;

struct Scales {
  long long n_cdf_emp;   // empirical CDF draws (criterion 1)
  long long n_outage;    // outage comparison draws (criterion 2)
  long long n_deep;      // deep high-SNR ratio draws (criterion 3)
  long long n_rate;      // rate comparison draws (criterion 5)
};

Scales scales_for(ValidateLevel level) {
  if (level == ValidateLevel::fast) return {1000000, 100000, 1000000, 1000000};
  return {1000000, 1000000, 10000000, 1000000};
}

Scenario preset_scenario(const char* name) {
  return parse_scenario_json(find_preset(name)->scenario_json);
}

Scenario at_power_db(Scenario s, double p_db) {
  s.power = std::pow(10.0, p_db / 10.0);
  return s;
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

// --- C1: series CDF vs quadrature oracle vs empirical CDF ------------------
CriterionResult criterion_cdf_tiers(const Scales& sc) {
  CriterionResult r{"C1", "cdf_series_vs_oracle_vs_empirical", false, false, ""};
  const auto t0 = std::chrono::steady_clock::now();
  const Scenario base = preset_scenario("fig3");
  double worst_abs = 0.0, worst_z = 0.0;
  bool unconverged = false;
  // The series expansion has a finite convergence region; the 10 dB grid
  // sits entirely inside it, so there the series itself (no oracle
  // fallback) must reproduce the oracle.  At higher powers the upper grid
  // points cross the divergence threshold and the documented fallback is
  // exercised instead; value agreement is still required everywhere.
  bool series_pure_10db = true;
  for (double p_db : {10.0, 20.0, 30.0}) {
    const Scenario s = at_power_db(base, p_db);
    const CdfContext c = CdfContext::make(s, NodeId::T1);
    std::vector<double> gammas(10);
    for (int i = 0; i < 10; ++i)
      gammas[i] = s.gbar0() * std::pow(10.0, -1.3 + 2.0 * i / 9.0);
    const std::vector<MetricEstimate> emp =
        estimate_terminal_cdf(s, NodeId::T1, SinrKind::min_bound, gammas, sc.n_cdf_emp, kSeed);
    for (size_t i = 0; i < gammas.size(); ++i) {
      const AnalyticValue lb = cdf_lower_bound(c, gammas[i]);
      const AnalyticValue oracle = cdf_quad_oracle(c, gammas[i]);
      unconverged = unconverged || !lb.diag.converged;
      if (p_db == 10.0 && (lb.diag.used_fallback || lb.diag.series_diverged))
        series_pure_10db = false;
      worst_abs = std::max(worst_abs, std::abs(lb.value - oracle.value));
      // Null-hypothesis standard error: the analytic value is the truth.
      const double f = std::min(std::max(lb.value, 1e-12), 1.0 - 1e-12);
      const double se = std::sqrt(f * (1.0 - f) / static_cast<double>(sc.n_cdf_emp));
      worst_z = std::max(worst_z, std::abs(lb.value - emp[i].mean) / se);
    }
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.pass = worst_abs <= 1e-6 && worst_z <= 3.0 && !unconverged && series_pure_10db &&
           secs < 180.0;
  r.detail = "max|analytic-oracle|=" + fmt(worst_abs) + " (tol 1e-6), max|z|=" + fmt(worst_z) +
             " (tol 3), series pure at 10dB: " + (series_pure_10db ? "yes" : "no") + ", " +
             fmt(secs) + "s";
  return r;
}

// --- C2: analytic outage lower-bounds the exact-SINR outage ----------------
CriterionResult criterion_outage_bound(const Scales& sc) {
  CriterionResult r{"C2", "analytic_outage_is_lower_bound", false, false, ""};
  const Scenario base = preset_scenario("fig3");
  double worst_excess = -1e300;
  for (double p_db : {10.0, 20.0, 30.0}) {
    const Scenario s = at_power_db(base, p_db);
    for (double gamma_th : {1.0, 4.0, 7.0, 12.0}) {
      const double lb = protocol_outage(s, gamma_th, CdfMethod::lower_bound).value;
      const MetricEstimate mc = estimate_outage(s, gamma_th, OutageKind::protocol,
                                                SinrKind::exact, sc.n_outage, kSeed);
      worst_excess = std::max(worst_excess, lb - (mc.mean + 3.0 * mc.std_err));
    }
  }
  r.pass = worst_excess <= 0.0;
  r.detail = "max(lb - mc - 3se)=" + fmt(worst_excess) + " (must be <= 0)";
  return r;
}

// --- C3: asymptotic tier agreement and scale invariance --------------------
CriterionResult criterion_asymptotic(const Scales& sc) {
  CriterionResult r{"C3", "asymptotic_agreement_and_invariance", false, false, ""};
  const Scenario out_s = at_power_db(preset_scenario("fig3"), 40.0);
  const double asy_outage = protocol_outage_asymptotic(out_s, 7.0);
  const MetricEstimate mc_outage =
      estimate_outage(out_s, 7.0, OutageKind::system, SinrKind::exact, sc.n_deep, kSeed);
  const double outage_ratio = asy_outage / mc_outage.mean;

  const Scenario ber_s = at_power_db(preset_scenario("fig4"), 40.0);
  const double asy_ber = sum_ber_asymptotic(ber_s, kBpsk);
  const MetricEstimate mc_ber =
      estimate_sum_ber(ber_s, kBpsk.a, kBpsk.b, SinrKind::exact, sc.n_deep, kSeed);
  const double ber_ratio = asy_ber / mc_ber.mean;

  // At a fixed interference ratio the asymptotic outage must not depend on
  // the transmit power once deep in the interference-limited regime.
  const Scenario inv_base = preset_scenario("fig3");
  const double v150 = protocol_outage_asymptotic(at_power_db(inv_base, 150.0), 7.0);
  const double v170 = protocol_outage_asymptotic(at_power_db(inv_base, 170.0), 7.0);
  const double v190 = protocol_outage_asymptotic(at_power_db(inv_base, 190.0), 7.0);
  const double inv_dev =
      std::max(std::abs(v150 - v170), std::abs(v190 - v170)) / std::abs(v170);

  const bool outage_ok = outage_ratio >= 0.8 && outage_ratio <= 1.3;
  const bool ber_ok = ber_ratio >= 0.8 && ber_ratio <= 1.3;
  const bool inv_ok = inv_dev <= 1e-10;
  r.pass = outage_ok && ber_ok && inv_ok;
  r.detail = "outage asy/mc=" + fmt(outage_ratio) + ", ber asy/mc=" + fmt(ber_ratio) +
             " (window [0.8,1.3]), invariance dev=" + fmt(inv_dev) + " (tol 1e-10)";
  return r;
}

// --- C4: closed-form BER / outage asymptotic ratio -------------------------
CriterionResult criterion_ber_ratio() {
  CriterionResult r{"C4", "asymptotic_ber_outage_ratio", false, false, ""};
  const Scenario s = preset_scenario("fig4");
  const double ratio = sum_ber_asymptotic(s, kBpsk) / protocol_outage_asymptotic(s, 7.0);
  const double expected = 3.0 / 392.0;
  const double err = std::abs(ratio - expected);
  r.pass = err <= 1e-12;
  r.detail = "ratio=" + fmt(ratio) + ", |ratio-3/392|=" + fmt(err) + " (tol 1e-12)";
  return r;
}

// --- C5: rate approximation accuracy and power ordering --------------------
CriterionResult criterion_rate(const Scales& sc) {
  CriterionResult r{"C5", "rate_approx_accuracy", false, false, ""};
  Scenario base = preset_scenario("fig5");
  // Interferer powers are absolute quantities of the loaded scenario
  // (dB-to-linear happens once at load), so re-posing the transmit power
  // keeps them at the values they resolve to at the preset's own P.
  for (InterfererSpec& spec : base.interferers) {
    spec.power = spec.resolved_power(base.power);
    spec.power_ratio = 0.0;
  }
  double worst_gap = -1e300;
  double prev_app = -1.0;
  bool monotone = true;
  for (double p_db : {10.0, 20.0, 30.0}) {
    const Scenario s = at_power_db(base, p_db);
    const double app = ergodic_sum_rate(s).value;
    const MetricEstimate mc = estimate_sum_rate(s, SinrKind::min_bound, sc.n_rate, kSeed);
    const double tol = std::max(0.05, 3.0 * mc.std_err);
    worst_gap = std::max(worst_gap, std::abs(app - mc.mean) - tol);
    if (app < prev_app) monotone = false;
    prev_app = app;
  }
  // Qualitative half: strong interference at the relay must cost rate.
  Scenario heavy = preset_scenario("fig5");
  heavy.interferers[static_cast<int>(NodeId::R)].power_ratio = std::pow(10.0, 10.0 / 10.0);
  const MetricEstimate light_rate = estimate_sum_rate(preset_scenario("fig5"), SinrKind::exact,
                                                      sc.n_outage, kSeed);
  const MetricEstimate heavy_rate =
      estimate_sum_rate(heavy, SinrKind::exact, sc.n_outage, kSeed);
  const bool relay_ordering = heavy_rate.mean < light_rate.mean;
  r.pass = worst_gap <= 0.0 && monotone && relay_ordering;
  r.detail = "max(|app-mc|-tol)=" + fmt(worst_gap) +
             " (must be <= 0), monotone in P: " + (monotone ? "yes" : "no") +
             ", relay-interference rate penalty: " + (relay_ordering ? "yes" : "no");
  return r;
}

// --- C6: symmetric scenario drives every optimizer to the midpoint ---------
CriterionResult criterion_symmetric_optimum() {
  CriterionResult r{"C6", "symmetric_scenario_midpoint_optimum", false, false, ""};
  const Scenario s = preset_scenario("fig2");  // identical interference at all nodes
  const double w = optimal_omega(s, 0.5);
  const double d = optimal_location(s, 0.5);
  const OptResult joint = joint_optimize(s, 3);
  const OptResult grid = grid_search(s, 200);
  const double cell = 1.0 / 200.0 + 1e-12;
  const double worst_closed = std::max({std::abs(w - 0.5), std::abs(d - 0.5),
                                        std::abs(joint.omega - 0.5), std::abs(joint.d - 0.5)});
  const double worst_grid = std::max(std::abs(grid.omega - 0.5), std::abs(grid.d - 0.5));
  r.pass = worst_closed <= 1e-10 && worst_grid <= cell;
  r.detail = "closed-form dev=" + fmt(worst_closed) + " (tol 1e-10), grid dev=" +
             fmt(worst_grid) + " (tol one cell)";
  return r;
}

// --- C7: three alternating iterations land near the global grid optimum ----
CriterionResult criterion_joint_convergence() {
  CriterionResult r{"C7", "joint_optimizer_convergence", false, false, ""};
  const Scenario s = preset_scenario("fig6");
  const OptResult joint = joint_optimize(s, 3);
  const OptResult grid = grid_search(s, 1000);
  const double rel_gap = joint.objective / grid.objective - 1.0;
  bool nonincreasing = true;
  for (size_t i = 1; i < joint.trace.size(); ++i)
    if (joint.trace[i] > joint.trace[i - 1] * (1.0 + 1e-12)) nonincreasing = false;
  r.pass = rel_gap <= 0.01 && rel_gap >= -1e-6 && nonincreasing &&
           joint.trace.size() == 4;
  r.detail = "objective gap vs grid(1000)=" + fmt(rel_gap) +
             " (tol 1%), trace nonincreasing: " + (nonincreasing ? "yes" : "no");
  return r;
}

// --- C8: interference-profile moment identities ----------------------------
CriterionResult criterion_profile_identities() {
  CriterionResult r{"C8", "interference_profile_identities", false, false, ""};
  double worst_moment = 0.0, worst_norm = 0.0;
  // Deterministic corpus: component variances drawn without replacement
  // from a 0.05-spaced grid so the partial fractions stay well conditioned.
  for (int t = 0; t < 200; ++t) {
    const uint64_t s0 = 1000 + static_cast<uint64_t>(t);
    const int count = 1 + static_cast<int>(mix_u64(s0, 0) % 8);
    InterfererSpec spec;
    spec.count = count;
    spec.power = std::pow(10.0, (mix_unit(s0, 1) * 30.0 - 10.0) / 10.0);
    std::vector<double> grid(40);
    for (int i = 0; i < 40; ++i) grid[static_cast<size_t>(i)] = 0.05 * (i + 1);
    for (int i = 39; i > 0; --i)
      std::swap(grid[static_cast<size_t>(i)],
                grid[mix_u64(s0, 2 + static_cast<uint64_t>(i)) % static_cast<uint64_t>(i + 1)]);
    spec.variances.assign(grid.begin(), grid.begin() + count);

    const InterferenceProfile prof = build_profile(spec, 1.0, TiePolicy::reject);
    double m0 = 0, m1 = 0, m2 = 0;
    for (size_t k = 0; k < prof.size(); ++k) {
      m0 += prof.phi[k] * prof.xi[k];
      m1 += prof.phi[k] * prof.xi[k] * prof.xi[k];
      m2 += 2.0 * prof.phi[k] * prof.xi[k] * prof.xi[k] * prof.xi[k];
    }
    worst_moment = std::max({worst_moment, std::abs(m0 - 1.0),
                             std::abs(m1 - prof.mean) / prof.mean,
                             std::abs(m2 - prof.mean_sq) / prof.mean_sq});
    QuadratureSpec q;
    q.abs_tol = 1e-10;
    q.rel_tol = 1e-9;
    const QuadratureResult norm =
        integrate_semi_infinite([&prof](double x) { return interference_pdf(prof, x); }, q);
    worst_norm = std::max(worst_norm, std::abs(norm.value - 1.0));
  }
  r.pass = worst_moment <= 1e-9 && worst_norm <= 1e-6;
  r.detail = "max moment residual=" + fmt(worst_moment) + " (tol 1e-9), max |pdf integral - 1|=" +
             fmt(worst_norm) + " (tol 1e-6)";
  return r;
}

// --- C9: injected faults are caught by this very battery -------------------
CriterionResult criterion_mutation(const std::string& twr_binary) {
  CriterionResult r{"C9", "fault_injection_detected", false, false, ""};
  if (active_mutation() != Mutation::none) {
    r.skipped = true;
    r.detail = "running under TWR_MUTATION=" + std::string(mutation_name(active_mutation()));
    return r;
  }
  if (twr_binary.empty()) {
    r.detail = "CLI binary not found (set TWR_BIN)";
    return r;
  }
  bool all_caught = true;
  std::string outcome;
  for (const char* name : {"drop_interference_term", "swap_coefficient_roles"}) {
    std::ostringstream cmd;
    cmd << "TWR_MUTATION=" << name << " '" << twr_binary
        << "' validate --level fast > /dev/null 2>&1";
    const int status = std::system(cmd.str().c_str());
    const bool caught = !(WIFEXITED(status) && WEXITSTATUS(status) == 0);
    all_caught = all_caught && caught;
    if (!outcome.empty()) outcome += ", ";
    outcome += std::string(name) + (caught ? ": caught" : ": MISSED");
  }
  r.pass = all_caught;
  r.detail = outcome;
  return r;
}

CriterionResult guarded(CriterionResult (*fn)(const Scales&), const Scales& sc,
                        const char* id, const char* label) {
  try {
    return fn(sc);
  } catch (const std::exception& e) {
    return {id, label, false, false, std::string("exception: ") + e.what()};
  }
}

CriterionResult guarded(CriterionResult (*fn)(), const char* id, const char* label) {
  try {
    return fn();
  } catch (const std::exception& e) {
    return {id, label, false, false, std::string("exception: ") + e.what()};
  }
}

}  // namespace

std::vector<CriterionResult> run_validation(ValidateLevel level, std::ostream& log,
                                            const std::string& twr_binary) {
  const Scales sc = scales_for(level);
  std::vector<CriterionResult> results;
  results.push_back(guarded(criterion_cdf_tiers, sc, "C1", "cdf_series_vs_oracle_vs_empirical"));
  results.push_back(guarded(criterion_outage_bound, sc, "C2", "analytic_outage_is_lower_bound"));
  results.push_back(guarded(criterion_asymptotic, sc, "C3", "asymptotic_agreement_and_invariance"));
  results.push_back(guarded(criterion_ber_ratio, "C4", "asymptotic_ber_outage_ratio"));
  results.push_back(guarded(criterion_rate, sc, "C5", "rate_approx_accuracy"));
  results.push_back(guarded(criterion_symmetric_optimum, "C6", "symmetric_scenario_midpoint_optimum"));
  results.push_back(guarded(criterion_joint_convergence, "C7", "joint_optimizer_convergence"));
  results.push_back(guarded(criterion_profile_identities, "C8", "interference_profile_identities"));
  try {
    results.push_back(criterion_mutation(twr_binary));
  } catch (const std::exception& e) {
    results.push_back({"C9", "fault_injection_detected", false, false,
                       std::string("exception: ") + e.what()});
  }
  for (const CriterionResult& r : results) {
    log << '[' << r.id << "] " << (r.skipped ? "SKIP" : r.pass ? "PASS" : "FAIL") << ' '
        << r.label << " (" << r.detail << ")\n";
  }
  return results;
}

bool all_passed(const std::vector<CriterionResult>& results) {
  for (const CriterionResult& r : results)
    if (!r.skipped && !r.pass) return false;
  return true;
}

std::string default_twr_binary() {
  if (const char* env = std::getenv("TWR_BIN"); env != nullptr && *env != '\0') {
    if (access(env, X_OK) == 0) return env;
    return "";
  }
  char buf[4096];
  const ssize_t len = readlink("/proc/self/exe", buf, sizeof buf - 1);
  if (len <= 0) return "";
  buf[len] = '\0';
  std::string path(buf);
  const size_t slash = path.find_last_of('/');
  if (slash == std::string::npos) return "";
  path = path.substr(0, slash + 1) + "twr";
  if (access(path.c_str(), X_OK) == 0) return path;
  return "";
}

}  // namespace twr
