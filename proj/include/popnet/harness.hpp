#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "popnet/attack.hpp"

namespace popnet::harness {

struct EpsilonOverride {
  std::int64_t m = 0;
  double alpha = 0;
  Strategy strategy = Strategy::kITS;
  double epsilon = 0;
};

// Monte Carlo sweep over the (m, alpha, strategy) grid, G graphs x V victims
// per point.
struct ExperimentConfig {
  std::uint64_t base_seed = 1;
  std::int64_t mu = 100;
  double beta = 0.1;
  double nq = 0.05;
  double epsilon = 0.01;
  int graphs = 5;
  int victims = 100;
  int workers = 0;  // 0 = OpenMP default; env POPNET_WORKERS overrides
  std::vector<std::int64_t> m_values;
  std::vector<double> alpha_values;
  std::vector<Strategy> strategies;
  std::vector<EpsilonOverride> epsilon_overrides;

  std::int64_t n_for(std::int64_t m) const;
  double epsilon_for(std::int64_t m, double alpha, Strategy strategy) const;
  void validate() const;
};

struct GridPointResult {
  std::int64_t m = 0;
  double alpha = 0;
  Strategy strategy = Strategy::kITS;
  std::int64_t n = 0;
  std::int64_t mu = 0;
  double beta = 0;
  double nq = 0;
  double epsilon = 0;
  std::int64_t trials = 0;
  double mean_q = 0;   // unresolved trials contribute n (the maximum)
  double ci95_q = 0;   // normal-approximation 95% half-width
  double pe = 0;       // (wrong identifications + unresolved) / trials
  std::int64_t errors = 0;      // wrong identifications
  std::int64_t unresolved = 0;
  double seconds = 0;
};

struct SweepResult {
  std::vector<GridPointResult> points;
};

using PointCallback = std::function<void(const GridPointResult&)>;

// Deterministic per-item streams: results are identical for any worker count
// and identical between the OpenMP and serial paths.
std::uint64_t graph_seed(std::uint64_t base_seed, std::int64_t m, double alpha,
                         Strategy strategy, int g);
std::uint64_t trial_seed(std::uint64_t base_seed, std::int64_t m, double alpha,
                         Strategy strategy, int g, int v);

SweepResult run_sweep(const ExperimentConfig& config, const PointCallback& on_point = {});
// Serial reference implementation (plain loops), kept for testing and for the
// benchmark comparison.
SweepResult run_sweep_serial(const ExperimentConfig& config, const PointCallback& on_point = {});

// CSV schema (bit-exact column order):
// m,alpha,strategy,n,mu,beta,nq,epsilon,trials,mean_Q,ci95_Q,pe,errors,unresolved,seconds
void export_csv(const SweepResult& result, std::ostream& out);
std::string csv_header();
std::string csv_row(const GridPointResult& point);

// One two-column block (m, mean_Q) per (alpha, strategy) series, blocks
// separated by blank lines with "# series ..." headers.
void export_plot_data(const SweepResult& result, std::ostream& out);

// Flat key=value config text with [grid] and [overrides] sections.
ExperimentConfig load_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);
void write_config(std::ostream& out, const ExperimentConfig& config);

// Reduced grid for desk runs: m in {1000,2000}, alpha in {3,10}, 100 trials
// per point, per-point epsilon tuned so the empirical error stays below 0.1.
ExperimentConfig desk_preset();
// The full simulation grid: alpha in {3,5,10}, m in {1000,...,10000}, 500
// trials per point.
ExperimentConfig full_preset();

int resolve_workers(const ExperimentConfig& config);

}  // namespace popnet::harness
