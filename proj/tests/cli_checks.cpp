// Exercises the installed CLI as a black box: exit codes, output files and
// byte-level determinism. Takes the CLI binary path as argv[1].
#include <cstdio>
#include <cstdlib>
#include <sys/wait.h>
#include <unistd.h>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int g_failures = 0;
std::string g_cli;
fs::path g_work;

void check(bool ok, const std::string& what) {
  std::cout << (ok ? "ok: " : "FAIL: ") << what << std::endl;
  if (!ok) ++g_failures;
}

int run(const std::string& args) {
  std::string cmd = g_cli + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(is), {});
}

std::string data_flags(const fs::path& fix) {
  return "--returns " + (fix / "returns.csv").string() + " --factors " +
         (fix / "factors.csv").string() + " --events " +
         (fix / "events.csv").string() + " --characteristics " +
         (fix / "characteristics.csv").string();
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: cli_checks <path-to-evstud>" << std::endl;
    return 2;
  }
  g_cli = argv[1];
  g_work = fs::temp_directory_path() / ("evstud_cli_" + std::to_string(::getpid()));
  fs::remove_all(g_work);
  fs::create_directories(g_work);

  fs::path fix = g_work / "fix";
  check(run("simulate --n-firms 10 --n-days 320 --n-events 18 --rho 0.02 --seed 9 "
            "--dump-rep 0 --output-dir " +
            fix.string()) == 0,
        "simulate --dump-rep writes fixture CSVs");
  check(fs::exists(fix / "returns.csv") && fs::exists(fix / "events.csv"),
        "fixture files exist");

  check(run("ingest-check " + data_flags(fix)) == 0, "ingest-check accepts fixture");

  std::string common = data_flags(fix) + " --min-obs 50 --limited-start 2013-12-19 "
                       "--limited-end 2015-12-31";
  fs::path out = g_work / "out";
  check(run("estimate " + common + " --estimator ols --output-dir " + out.string()) == 0,
        "estimate exits 0");
  check(fs::exists(out / "car_table.tsv") && fs::exists(out / "stat_report.json") &&
            fs::exists(out / "table1.tsv"),
        "estimate writes car_table.tsv, stat_report.json, table1.tsv");

  for (const char* flags : {"--estimator ols --benchmark zero",
                            "--estimator ols_limited --benchmark ff3",
                            "--estimator sur --benchmark ff3",
                            "--estimator sur --benchmark zero"}) {
    check(run("estimate " + common + " " + flags + " --output-dir " +
              (g_work / "cell").string()) == 0,
          std::string("estimate cell runs: ") + flags);
  }

  check(run("curves " + common + " --output-dir " + out.string()) == 0,
        "curves exits 0");
  check(fs::exists(out / "aar_curve.tsv"), "curves writes aar_curve.tsv");

  for (const char* table : {"years", "type_sector", "characteristics", "source"}) {
    check(run("determinants " + common + " --table " + table + " --model 2 "
              "--output-dir " +
              out.string()) == 0,
          std::string("determinants --table ") + table);
  }
  check(fs::exists(out / "table2.tsv") && fs::exists(out / "table3.tsv") &&
            fs::exists(out / "table4.tsv") && fs::exists(out / "table5.tsv"),
        "determinant tables written");

  check(run("report " + common + " --estimator sur --output-dir " +
            (g_work / "rep").string()) == 0,
        "report bundles all outputs");

  // Repeated runs are byte-identical.
  fs::path out2 = g_work / "out2";
  check(run("estimate " + common + " --estimator ols --output-dir " + out2.string()) ==
            0,
        "estimate rerun exits 0");
  check(slurp(out / "car_table.tsv") == slurp(out2 / "car_table.tsv") &&
            slurp(out / "table1.tsv") == slurp(out2 / "table1.tsv"),
        "estimate outputs are byte-identical across runs");

  // Error paths: JSON diagnostics and exit code 2.
  check(run("estimate --returns nope.csv --factors nope.csv --events nope.csv") == 2,
        "missing input exits 2");
  check(run("simulate --rho 1.5 --reps 5") == 2, "invalid rho exits 2");
  check(run("estimate " + common + " --benchmark capm") != 0,
        "unknown benchmark flag rejected");
  {
    std::string cmd = g_cli + " estimate --returns nope.csv --factors nope.csv "
                      "--events nope.csv 2>" +
                      (g_work / "err.json").string() + " >/dev/null";
    (void)std::system(cmd.c_str());
    std::string err = slurp(g_work / "err.json");
    check(err.find("\"code\"") != std::string::npos &&
              err.find("\"message\"") != std::string::npos &&
              err.find("\"context\"") != std::string::npos,
          "stderr carries a JSON diagnostic");
  }

  // Simulation path with a report.
  check(run("simulate --n-firms 8 --n-days 260 --n-events 12 --rho 0.01 --seed 4 "
            "--reps 10 --threads 2 --output-dir " +
            (g_work / "sim").string()) == 0,
        "simulate writes size_power.json");
  check(fs::exists(g_work / "sim" / "size_power.json"), "size_power.json exists");

  fs::remove_all(g_work);
  if (g_failures > 0) {
    std::cout << g_failures << " CLI check(s) failed" << std::endl;
    return 1;
  }
  std::cout << "all CLI checks passed" << std::endl;
  return 0;
}
