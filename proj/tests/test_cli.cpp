// End-to-end checks of the popnet binary. The test runner sets POPNET_BIN to
// the built executable path.
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

std::string bin_path() {
  const char* p = std::getenv("POPNET_BIN");
  return p ? p : "";
}

int run(const std::string& args) {
  const int status = std::system((bin_path() + " " + args).c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("popnet_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("cli: generate then analyze conserves edges") {
  if (bin_path().empty()) return;  // not driven through ctest
  TempDir tmp;
  const std::string g = (tmp.path / "g.txt").string();
  const std::string report = (tmp.path / "report.txt").string();

  CHECK(run("generate --n 100 --m 1000 --mu 5 --alpha 3 --seed 7 --out " + g) == 0);
  CHECK(run("analyze " + g + " > " + report) == 0);
  const std::string text = slurp(report);
  CHECK(text.find("degree_sum = 500") != std::string::npos);
  CHECK(text.find("mean_degree = 5") != std::string::npos);
}

TEST_CASE("cli: attack writes a trace") {
  if (bin_path().empty()) return;
  TempDir tmp;
  const std::string g = (tmp.path / "g.txt").string();
  const std::string tr = (tmp.path / "trace.txt").string();
  const std::string out = (tmp.path / "out.txt").string();

  CHECK(run("generate --n 300 --m 100 --mu 5 --alpha 3 --seed 7 --out " + g) == 0);
  CHECK(run("attack --graph " + g + " --strategy aits --noiseless --epsilon 0.05 --seed 3 --trace " +
            tr + " > " + out) == 0);
  const std::string trace = slurp(tr);
  CHECK(trace.rfind("q 1 group=", 0) == 0);
  CHECK(trace.find("survivors=") != std::string::npos);
  CHECK(slurp(out).find("resolved = ") != std::string::npos);
}

TEST_CASE("cli: sweep writes csv, plot data, and the resolved config") {
  if (bin_path().empty()) return;
  TempDir tmp;
  const std::string cfg_path = (tmp.path / "cfg.txt").string();
  {
    std::ofstream cfg(cfg_path);
    cfg << "base_seed = 5\nmu = 3\nbeta = 1\nnq = 0.05\nepsilon = 0.05\n"
        << "graphs = 2\nvictims = 5\n[grid]\nm = 40\nalpha = 3\nstrategy = its aits\n";
  }
  const std::string out_dir = (tmp.path / "out").string();
  CHECK(run("sweep --config " + cfg_path + " --out " + out_dir + " 2> /dev/null") == 0);
  CHECK(fs::exists(fs::path(out_dir) / "sweep.csv"));
  CHECK(fs::exists(fs::path(out_dir) / "plot.dat"));
  CHECK(fs::exists(fs::path(out_dir) / "resolved_config.txt"));

  const std::string csv = slurp(fs::path(out_dir) / "sweep.csv");
  CHECK(csv.rfind("m,alpha,strategy,", 0) == 0);
  int lines = 0;
  for (char c : csv)
    if (c == '\n') ++lines;
  CHECK(lines == 3);  // header + 2 grid points
}

TEST_CASE("cli: bounds prints the intermediates") {
  if (bin_path().empty()) return;
  TempDir tmp;
  const std::string out = (tmp.path / "bounds.txt").string();
  CHECK(run("bounds --m 100 --n 1000 --mu 5 --alpha 3 --nq 0.05 --epsilon 0.01 > " + out) == 0);
  const std::string text = slurp(out);
  CHECK(text.find("[theorem2]") != std::string::npos);
  CHECK(text.find("[corollary1]") != std::string::npos);
  CHECK(text.find("psi = ") != std::string::npos);
  CHECK(text.find("d_star_theta0 = 2") != std::string::npos);  // matches the library oracle
  CHECK(text.find("p_e_bound = 0.01") != std::string::npos);
}

TEST_CASE("cli: exit codes (usage=1, runtime=2)") {
  if (bin_path().empty()) return;
  CHECK(run("bogus-subcommand 2> /dev/null") == 1);
  CHECK(run("generate --n 10 2> /dev/null") == 1);  // missing required flags
  CHECK(run("attack --graph /nonexistent/file.txt 2> /dev/null") == 2);
  CHECK(run("--help > /dev/null") == 0);
}
