// Compares the OpenMP sweep/batch kernels against their serial reference
// implementations, both for wall time and for result identity.
#include <chrono>
#include <cstdio>
#include <sstream>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "popnet/bigraph.hpp"
#include "popnet/harness.hpp"

using namespace popnet;
using h_clock = std::chrono::steady_clock;

namespace {

double seconds_since(h_clock::time_point t0) {
  return std::chrono::duration<double>(h_clock::now() - t0).count();
}

std::string strip_seconds(const std::string& csv) {
  std::istringstream in(csv);
  std::string out, line;
  while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + "\n";
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  int scale = 1;
  if (argc > 1) scale = std::atoi(argv[1]);
  if (scale < 1) scale = 1;

#ifdef _OPENMP
  std::printf("openmp: max_threads=%d\n", omp_get_max_threads());
#else
  std::printf("openmp: disabled\n");
#endif

  // Batch generation: G independent graphs.
  {
    BigraphParams base;
    base.n = 4000;
    base.m = 400;
    base.mu = 50;
    base.alpha = 3.0;
    base.seed = 7;
    const int count = 8 * scale;

    auto t0 = h_clock::now();
    auto serial = generate_batch(base, count, false);
    const double ts = seconds_since(t0);

    t0 = h_clock::now();
    auto parallel = generate_batch(base, count, true);
    const double tp = seconds_since(t0);

    bool identical = serial.size() == parallel.size();
    for (std::size_t i = 0; identical && i < serial.size(); ++i)
      identical = serial[i] == parallel[i];
    std::printf("generate_batch (%d graphs, n=%lld, delta=%lld): serial %.3fs | openmp %.3fs | "
                "speedup %.2fx | identical %s\n",
                count, static_cast<long long>(base.n), static_cast<long long>(base.edge_budget()),
                ts, tp, ts / tp, identical ? "yes" : "NO");
  }

  // Sweep engine: trials over a shared immutable graph.
  {
    harness::ExperimentConfig cfg;
    cfg.base_seed = 13;
    cfg.mu = 50;
    cfg.beta = 0.1;
    cfg.nq = 0.05;
    cfg.epsilon = 0.01;
    cfg.graphs = 3;
    cfg.victims = 40 * scale;
    cfg.m_values = {400};
    cfg.alpha_values = {3.0};
    cfg.strategies = {Strategy::kITS, Strategy::kAITS};

    auto t0 = h_clock::now();
    auto serial = harness::run_sweep_serial(cfg);
    const double ts = seconds_since(t0);

    t0 = h_clock::now();
    auto parallel = harness::run_sweep(cfg);
    const double tp = seconds_since(t0);

    std::ostringstream a, b;
    harness::export_csv(serial, a);
    harness::export_csv(parallel, b);
    const bool identical = strip_seconds(a.str()) == strip_seconds(b.str());
    std::printf("run_sweep (%d trials x %zu points): serial %.3fs | openmp %.3fs | speedup %.2fx "
                "| identical %s\n",
                cfg.graphs * cfg.victims, parallel.points.size(), ts, tp, ts / tp,
                identical ? "yes" : "NO");
    return identical ? 0 : 1;
  }
}
