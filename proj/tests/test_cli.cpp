// End-to-end checks of the command-line tool: spawns the binary named by
// TWR_BIN and verifies output files, determinism, and exit codes.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace {

std::string twr_binary() {
  const char* env = std::getenv("TWR_BIN");
  return env ? env : "";
}

// Scratch directory shared by all cases in this binary.
const std::string& work_dir() {
  static const std::string dir = [] {
    char tmpl[] = "/tmp/twr_cli_XXXXXX";
    const char* d = mkdtemp(tmpl);
    return std::string(d ? d : "/tmp");
  }();
  return dir;
}

int run(const std::string& cmd) {
  const int raw = std::system(cmd.c_str());
  if (raw == -1) return -1;
  if (WIFEXITED(raw)) return WEXITSTATUS(raw);
  return 128;  // terminated by signal
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool file_exists(const std::string& path) { return access(path.c_str(), F_OK) == 0; }

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

std::vector<std::string> fields_of(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string f;
  while (std::getline(in, f, ',')) out.push_back(f);
  return out;
}

const char* kScenario = R"({
  "P_dB": 10, "v": 3, "D": 0.5, "omega": 0.5,
  "interferers": {
    "T1": {"L": 2, "P_over_P_I_dB": 20},
    "T2": {"L": 2, "P_over_P_I_dB": 20},
    "R":  {"L": 2, "P_over_P_I_dB": 20}
  }
})";

const char* kSweep = R"({
  "variable": "P_dB", "range": {"start": 0, "stop": 10, "steps": 3},
  "metrics": ["outage_pro_mc", "outage_lb"],
  "mc": {"n": 20000, "seed": 7}, "sinr_kind": "exact", "gamma_th": 7
})";

struct Paths {
  std::string scenario = work_dir() + "/scenario.json";
  std::string sweep = work_dir() + "/sweep.json";
  Paths() {
    write_file(scenario, kScenario);
    write_file(sweep, kSweep);
  }
};

}  // namespace

TEST_CASE("sweep: identical runs produce byte-identical CSV") {
  const std::string bin = twr_binary();
  REQUIRE_FALSE(bin.empty());
  const Paths p;
  const std::string out1 = work_dir() + "/run1.csv";
  const std::string out2 = work_dir() + "/run2.csv";
  const std::string cmd = "'" + bin + "' sweep --scenario '" + p.scenario + "' --sweep '" +
                          p.sweep + "' --out ";
  REQUIRE(run(cmd + "'" + out1 + "'") == 0);
  REQUIRE(run(cmd + "'" + out2 + "'") == 0);
  const std::string a = read_file(out1);
  CHECK(a == read_file(out2));

  const std::vector<std::string> ls = lines_of(a);
  REQUIRE(ls.size() == 4);  // header + 3 grid points
  CHECK(ls[0] == "P_dB,outage_pro_mc,outage_pro_mc_se,outage_lb");
  for (size_t i = 1; i < ls.size(); ++i) CHECK(fields_of(ls[i]).size() == 4);
}

TEST_CASE("sweep: seed override moves Monte Carlo cells, not analytic ones") {
  const std::string bin = twr_binary();
  REQUIRE_FALSE(bin.empty());
  const Paths p;
  const std::string base = work_dir() + "/base.csv";
  const std::string reseeded = work_dir() + "/reseeded.csv";
  REQUIRE(run("'" + bin + "' sweep --scenario '" + p.scenario + "' --sweep '" + p.sweep +
              "' --out '" + base + "'") == 0);
  REQUIRE(run("'" + bin + "' sweep --seed 99 --scenario '" + p.scenario + "' --sweep '" +
              p.sweep + "' --out '" + reseeded + "'") == 0);
  const std::vector<std::string> la = lines_of(read_file(base));
  const std::vector<std::string> lb = lines_of(read_file(reseeded));
  REQUIRE(la.size() == lb.size());
  bool mc_differs = false;
  for (size_t i = 1; i < la.size(); ++i) {
    const std::vector<std::string> fa = fields_of(la[i]);
    const std::vector<std::string> fb = fields_of(lb[i]);
    REQUIRE(fa.size() == 4);
    REQUIRE(fb.size() == 4);
    CHECK(fa[0] == fb[0]);  // abscissa
    CHECK(fa[3] == fb[3]);  // analytic column is seed-independent
    if (fa[1] != fb[1]) mc_differs = true;
  }
  CHECK(mc_differs);
}

TEST_CASE("sweep: named preset bundles scenario and spec") {
  const std::string bin = twr_binary();
  REQUIRE_FALSE(bin.empty());
  const std::string out = work_dir() + "/fig3.csv";
  REQUIRE(run("'" + bin + "' sweep --sweep fig3 --out '" + out + "'") == 0);
  const std::vector<std::string> ls = lines_of(read_file(out));
  REQUIRE(ls.size() == 22);  // header + 21 power points
  CHECK(ls[0] == "P_dB,outage_pro_mc,outage_pro_mc_se,outage_lb,outage_app,outage_asy");
  CHECK(read_file(out).find("nan") == std::string::npos);
}

TEST_CASE("sweep: malformed scenario exits 2 and writes nothing") {
  const std::string bin = twr_binary();
  REQUIRE_FALSE(bin.empty());
  const Paths p;
  const std::string bad = work_dir() + "/bad_scenario.json";
  write_file(bad, "{nope");
  const std::string out = work_dir() + "/never_written.csv";
  CHECK(run("'" + bin + "' sweep --scenario '" + bad + "' --sweep '" + p.sweep + "' --out '" +
            out + "' 2>/dev/null") == 2);
  CHECK_FALSE(file_exists(out));
}

TEST_CASE("sweep: out-of-range scenario values exit 3") {
  const std::string bin = twr_binary();
  REQUIRE_FALSE(bin.empty());
  const Paths p;
  const std::string bad = work_dir() + "/bad_range.json";
  write_file(bad, R"({"P_dB": 10, "v": 3, "D": 0.5, "omega": 1.5})");
  const std::string out = work_dir() + "/never_written2.csv";
  CHECK(run("'" + bin + "' sweep --scenario '" + bad + "' --sweep '" + p.sweep + "' --out '" +
            out + "' 2>/dev/null") == 3);
  CHECK_FALSE(file_exists(out));
}

TEST_CASE("sweep: unknown preset name is reported as a missing file") {
  const std::string bin = twr_binary();
  REQUIRE_FALSE(bin.empty());
  const std::string out = work_dir() + "/never_written3.csv";
  CHECK(run("'" + bin + "' sweep --sweep fig99 --out '" + out + "' 2>/dev/null") == 2);
  CHECK_FALSE(file_exists(out));
}

TEST_CASE("bad command-line usage exits 2") {
  const std::string bin = twr_binary();
  REQUIRE_FALSE(bin.empty());
  CHECK(run("'" + bin + "' sweep --no-such-flag 2>/dev/null") == 2);
  CHECK(run("'" + bin + "' 2>/dev/null") == 2);  // a subcommand is required
}

TEST_CASE("optimize: joint mode writes the full result document") {
  const std::string bin = twr_binary();
  REQUIRE_FALSE(bin.empty());
  const Paths p;
  const std::string out = work_dir() + "/opt_joint.json";
  REQUIRE(run("'" + bin + "' optimize --scenario '" + p.scenario +
              "' --mode joint --iters 3 --out '" + out + "'") == 0);
  const nlohmann::json doc = nlohmann::json::parse(read_file(out));
  REQUIRE(doc.contains("omega_opt"));
  REQUIRE(doc.contains("d_opt"));
  REQUIRE(doc.contains("objective"));
  REQUIRE(doc.contains("trace"));
  CHECK(doc["trace"].is_array());
  CHECK(doc["trace"].size() == 4);  // start plus three rounds
  const double omega = doc["omega_opt"].get<double>();
  const double d = doc["d_opt"].get<double>();
  CHECK(omega > 0.0);
  CHECK(omega < 1.0);
  CHECK(d > 0.0);
  CHECK(d < 1.0);
  // symmetric scenario: the optimum is the midpoint
  CHECK(omega == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(d == doctest::Approx(0.5).epsilon(1e-9));
  // trace is nonincreasing
  double prev = 1e300;
  for (const auto& t : doc["trace"]) {
    CHECK(t.get<double>() <= prev + 1e-12);
    prev = t.get<double>();
  }
}

TEST_CASE("optimize: single-coordinate and grid modes") {
  const std::string bin = twr_binary();
  REQUIRE_FALSE(bin.empty());
  const Paths p;
  const std::string out_w = work_dir() + "/opt_omega.json";
  REQUIRE(run("'" + bin + "' optimize --scenario '" + p.scenario +
              "' --mode omega --out '" + out_w + "'") == 0);
  const nlohmann::json w = nlohmann::json::parse(read_file(out_w));
  CHECK(w["trace"].size() == 1);
  CHECK(w["d_opt"].get<double>() == doctest::Approx(0.5).epsilon(1e-12));  // unchanged

  const std::string out_g = work_dir() + "/opt_grid.json";
  REQUIRE(run("'" + bin + "' optimize --scenario '" + p.scenario +
              "' --mode grid --resolution 16 --out '" + out_g + "'") == 0);
  const nlohmann::json g = nlohmann::json::parse(read_file(out_g));
  CHECK(g["omega_opt"].get<double>() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(g["d_opt"].get<double>() == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("optimize: malformed scenario exits 2 and writes nothing") {
  const std::string bin = twr_binary();
  REQUIRE_FALSE(bin.empty());
  const std::string bad = work_dir() + "/opt_bad.json";
  write_file(bad, "not json at all");
  const std::string out = work_dir() + "/opt_never.json";
  CHECK(run("'" + bin + "' optimize --scenario '" + bad + "' --out '" + out +
            "' 2>/dev/null") == 2);
  CHECK_FALSE(file_exists(out));
}

TEST_CASE("unknown fault-injection value refuses to run") {
  const std::string bin = twr_binary();
  REQUIRE_FALSE(bin.empty());
  CHECK(run("TWR_MUTATION=not_a_mutation '" + bin + "' validate --level fast 2>/dev/null") != 0);
}
