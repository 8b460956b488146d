#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "popnet/bigraph.hpp"
#include "popnet/rng.hpp"

namespace popnet {

// Pooled empirical degree distribution over all groups of all graphs.
struct DegreePmf {
  std::vector<std::int32_t> support;  // k = 0 .. max degree
  std::vector<double> mass;           // normalized, sums to 1
  std::vector<std::int64_t> counts;   // raw counts per k
  std::int64_t sample_count = 0;
};

struct MomentReport {
  double mean_degree = 0;        // pooled E(D_j); equals mu for every graph
  double mean_square_degree = 0; // pooled E(D_j^2)
  double pair_product_mean = 0;  // pooled E(D_i D_j), i != j
  std::vector<double> product_means;  // order r = 1..xi, E(D_1 ... D_r)
  double mean_degree_se = 0;
  double mean_square_se = 0;
  double pair_product_se = 0;
  std::vector<double> product_se;
  int graph_count = 0;
};

struct SparsityReport {
  double psi = 0;
  double lambda = 0;          // mu + zeta(m, alpha-1)
  double threshold_ell = 0;   // (n/m) * lambda * (1+psi)
  double empirical_tail = 0;  // fraction of users with weight >= ell
  double chernoff_bound = 0;  // 2^{-n D_b(...)} with the unknown constant c = 1
};

struct SummaryStats {
  double mean = 0;
  double variance = 0;  // unbiased sample variance
};

DegreePmf empirical_degree_pmf(std::span<const BipartiteGraph> graphs);

// Least-squares slope of ln(mass) vs ln(k) over positive-mass support points
// in [k_min, k_max]; returns -slope as the exponent estimate.
double fit_powerlaw_exponent(const DegreePmf& pmf, std::int32_t k_min, std::int32_t k_max);

// Default exponent-fit window [2, n^(1/3)], the degree-law validity range.
std::pair<std::int32_t, std::int32_t> default_fit_window(std::int64_t n);

// Sample mean/variance of Y = sum_j tau_j(0) over independent replications.
SummaryStats popularity_sum_stats(const BigraphParams& params, std::int64_t draw_count, Rng& rng);

// Estimates of the group-size moments (means of products of distinct group
// degrees up to order xi, via elementary symmetric polynomials).
MomentReport degree_moment_stats(std::span<const BipartiteGraph> graphs, int xi = 3);

// Fingerprint-weight tail diagnostic at slack psi in (0, m/lambda - 1).
SparsityReport fingerprint_sparsity(const BipartiteGraph& graph, double psi);

// Ratio of the empirical joint frequency of `pattern` on `groups` (pooled over
// users and graphs) to the product of the per-group empirical marginals.
double memorylessness_ratio(std::span<const BipartiteGraph> graphs,
                            std::span<const std::int32_t> groups,
                            std::span<const std::int32_t> pattern);

// key=value report serialization and the pmf CSV (columns: k, mass, stderr).
void write_report(std::ostream& out, const MomentReport& report);
void write_report(std::ostream& out, const SparsityReport& report);
void write_degree_csv(std::ostream& out, const DegreePmf& pmf);

}  // namespace popnet
