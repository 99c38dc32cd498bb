#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

std::string cli_path() {
  const char* p = std::getenv("CPDE_CLI_PATH");
  return p ? p : "./build/cpde";
}

const fs::path work = "/tmp/cpde_cli_tests";

struct run_result {
  int code = -1;
  std::string out, err;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

run_result run_cli(const std::string& args, const std::string& tag) {
  fs::create_directories(work);
  fs::path out = work / (tag + ".stdout");
  fs::path err = work / (tag + ".stderr");
  std::string cmd = cli_path() + " " + args + " > " + out.string() + " 2> " +
                    err.string();
  int status = std::system(cmd.c_str());
  run_result r;
  r.code = (status >= 0 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

void write_file(const fs::path& path, const std::string& body) {
  fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  f << body;
}

const char* base_cfg =
    "topology = cycle\n"
    "n = 16\n"
    "lambda = 2.0\n"
    "v = 1.0\n"
    "p = 0.5\n"
    "horizon = 3.0\n"
    "replicas = 200\n";

}  // namespace

TEST_CASE("simulate writes identical bytes for identical invocations") {
  fs::path cfg = work / "sim.cfg";
  write_file(cfg, base_cfg);
  fs::path csv_a = work / "a.csv", csv_b = work / "b.csv";
  auto a = run_cli("simulate --config " + cfg.string() + " --seed 9 --out " +
                       csv_a.string(),
                   "sim_a");
  auto b = run_cli("simulate --config " + cfg.string() + " --seed 9 --out " +
                       csv_b.string(),
                   "sim_b");
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  std::string body_a = slurp(csv_a), body_b = slurp(csv_b);
  CHECK(!body_a.empty());
  CHECK(body_a == body_b);

  SUBCASE("and for any worker count") {
    fs::path csv_c = work / "c.csv";
    auto c = run_cli("simulate --config " + cfg.string() +
                         " --seed 9 --parallelism 2 --out " + csv_c.string(),
                     "sim_c");
    REQUIRE(c.code == 0);
    CHECK(slurp(csv_c) == body_a);
  }

  SUBCASE("a different seed changes the results") {
    fs::path csv_d = work / "d.csv";
    auto d = run_cli("simulate --config " + cfg.string() + " --seed 10 --out " +
                         csv_d.string(),
                     "sim_d");
    REQUIRE(d.code == 0);
    CHECK(slurp(csv_d) != body_a);
  }

  SUBCASE("the manifest lands next to the csv and echoes the seed") {
    std::string man = slurp(csv_a.string() + ".manifest");
    CHECK(man.find("seed = 9") != std::string::npos);
    CHECK(man.find("topology = cycle") != std::string::npos);
    CHECK(man.find("wall_seconds") != std::string::npos);
  }

  SUBCASE("--set overrides a config key from the command line") {
    fs::path csv_e = work / "e.csv";
    auto e = run_cli("simulate --config " + cfg.string() +
                         " --seed 9 --set run.n=24 --out " + csv_e.string(),
                     "sim_e");
    REQUIRE(e.code == 0);
    CHECK(slurp(csv_e).find("cycle,survival,24,") != std::string::npos);
  }
}

TEST_CASE("config mistakes exit with code 2 and a named complaint") {
  fs::path cfg = work / "bad.cfg";
  write_file(cfg, std::string(base_cfg) + "bogus_key = 1\n");
  auto r = run_cli("simulate --config " + cfg.string() + " --seed 1", "bad_key");
  CHECK(r.code == 2);
  CHECK(r.err.find("config error") != std::string::npos);
  CHECK(r.err.find("run.bogus_key") != std::string::npos);

  fs::path range = work / "range.cfg";
  write_file(range, "topology = cycle\nn = 16\np = 1.5\n");
  auto r2 = run_cli("simulate --config " + range.string() + " --seed 1",
                    "bad_range");
  CHECK(r2.code == 2);
  CHECK(r2.err.find("run.p") != std::string::npos);
  CHECK(r2.err.find("1.5") != std::string::npos);

  auto r3 = run_cli("simulate --config /nonexistent.cfg --seed 1", "no_file");
  CHECK(r3.code == 2);

  /* explorative subcommands refuse to run without an explicit seed */
  fs::path sw = work / "sweep_noseed.cfg";
  write_file(sw, std::string(base_cfg) + "[sweep]\nlambda_list = 1, 2\n");
  auto r4 = run_cli("sweep --config " + sw.string(), "sweep_noseed");
  CHECK(r4.code == 2);
  CHECK(r4.err.find("seed") != std::string::npos);
}

TEST_CASE("an injected containment fault trips the invariant exit code") {
  fs::path cfg = work / "coup.cfg";
  write_file(cfg, std::string("topology = cycle\nn = 16\nlambda = 2.0\n"
                              "v = 1.0\np = 0.5\nhorizon = 3.0\nreplicas = 20\n"
                              "[couplings]\nharness = sandwich\n"));
  auto clean = run_cli("couplings --config " + cfg.string() + " --seed 4",
                       "coup_clean");
  CHECK(clean.code == 0);
  auto faulty = run_cli("couplings --config " + cfg.string() +
                            " --seed 4 --inject-fault containment",
                        "coup_fault");
  CHECK(faulty.code == 3);
  auto unknown = run_cli("couplings --config " + cfg.string() +
                             " --seed 4 --inject-fault gremlins",
                         "coup_unknown");
  CHECK(unknown.code == 2);
}

TEST_CASE("sweep emits one row per grid cell plus immunity markers") {
  fs::path cfg = work / "sweep.cfg";
  write_file(cfg, std::string("topology = cycle\nn = 16\nv = 1.0\np = 0.3\n"
                              "horizon = 20.0\nreplicas = 300\n"
                              "[sweep]\nlambda_list = 0.05, 0.1\n"));
  fs::path csv = work / "sweep.csv";
  auto r = run_cli("sweep --config " + cfg.string() + " --seed 31 --out " +
                       csv.string(),
                   "sweep");
  REQUIRE(r.code == 0);
  std::istringstream lines(slurp(csv));
  std::string line;
  int rows = 0, immunity = 0;
  std::getline(lines, line); /* header */
  while (std::getline(lines, line)) {
    ++rows;
    if (line.find(",immunity,") != std::string::npos) ++immunity;
  }
  /* two cells, deep subcritical: the larger lambda is marked immune */
  CHECK(rows == 3);
  CHECK(immunity == 1);
  CHECK(fs::exists(csv.string() + ".manifest"));
}

TEST_CASE("oracle-check passes on a healthy build") {
  auto r = run_cli("oracle-check --seed 5", "oracle");
  CHECK(r.code == 0);
  CHECK(r.out.find("[ok]") != std::string::npos);
  CHECK(r.out.find("[FAIL]") == std::string::npos);
}
