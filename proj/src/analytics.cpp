#include "popnet/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "popnet/numerics.hpp"

namespace popnet {

namespace {

double sample_se(const std::vector<double>& per_graph, double mean) {
  const std::size_t g = per_graph.size();
  if (g < 2) return 0.0;
  double ss = 0.0;
  for (double v : per_graph) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(g - 1) / static_cast<double>(g));
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

DegreePmf empirical_degree_pmf(std::span<const BipartiteGraph> graphs) {
  if (graphs.empty()) fail(ErrorCode::kDomain, "empirical_degree_pmf: no graphs");
  const BigraphParams& ref = graphs.front().params();
  for (const auto& g : graphs)
    if (!g.params().same_model(ref))
      fail(ErrorCode::kParamMismatch, "empirical_degree_pmf: graphs have different parameters");

  std::int32_t max_degree = 0;
  for (const auto& g : graphs)
    for (std::int32_t d : g.degrees()) max_degree = std::max(max_degree, d);

  DegreePmf pmf;
  pmf.counts.assign(static_cast<std::size_t>(max_degree) + 1, 0);
  for (const auto& g : graphs)
    for (std::int32_t d : g.degrees()) pmf.counts[static_cast<std::size_t>(d)]++;

  pmf.sample_count = static_cast<std::int64_t>(graphs.size()) * ref.n;
  pmf.support.resize(pmf.counts.size());
  pmf.mass.resize(pmf.counts.size());
  for (std::size_t k = 0; k < pmf.counts.size(); ++k) {
    pmf.support[k] = static_cast<std::int32_t>(k);
    pmf.mass[k] = static_cast<double>(pmf.counts[k]) / static_cast<double>(pmf.sample_count);
  }
  return pmf;
}

double fit_powerlaw_exponent(const DegreePmf& pmf, std::int32_t k_min, std::int32_t k_max) {
  if (k_min < 1 || k_max < k_min)
    fail(ErrorCode::kDomain, "fit_powerlaw_exponent: bad window");
  std::vector<double> xs, ys;
  for (std::int32_t k = k_min; k <= k_max && k < static_cast<std::int32_t>(pmf.mass.size()); ++k) {
    if (pmf.mass[static_cast<std::size_t>(k)] > 0.0) {
      xs.push_back(std::log(static_cast<double>(k)));
      ys.push_back(std::log(pmf.mass[static_cast<std::size_t>(k)]));
    }
  }
  if (xs.size() < 3)
    fail(ErrorCode::kInsufficientSupport,
         "fit_powerlaw_exponent: fewer than 3 positive-mass points in window");
  double xbar = 0, ybar = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    xbar += xs[i];
    ybar += ys[i];
  }
  xbar /= static_cast<double>(xs.size());
  ybar /= static_cast<double>(xs.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - xbar) * (ys[i] - ybar);
    sxx += (xs[i] - xbar) * (xs[i] - xbar);
  }
  return -(sxy / sxx);
}

std::pair<std::int32_t, std::int32_t> default_fit_window(std::int64_t n) {
  auto k_max = static_cast<std::int32_t>(std::floor(std::cbrt(static_cast<double>(n))));
  return {2, std::max<std::int32_t>(k_max, 4)};
}

SummaryStats popularity_sum_stats(const BigraphParams& params, std::int64_t draw_count, Rng& rng) {
  params.validate();
  if (draw_count < 2) fail(ErrorCode::kDomain, "popularity_sum_stats: need >= 2 replications");
  if (std::isinf(params.alpha)) {
    // All popularities are 1: Y = n with zero variance.
    return {static_cast<double>(params.n), 0.0};
  }
  ZetaLaw law(params.m, params.alpha);
  double sum = 0.0, sumsq = 0.0;
  for (std::int64_t r = 0; r < draw_count; ++r) {
    std::int64_t y = 0;
    for (std::int64_t j = 0; j < params.n; ++j) y += law.draw(rng);
    const double yd = static_cast<double>(y);
    sum += yd;
    sumsq += yd * yd;
  }
  const double mean = sum / static_cast<double>(draw_count);
  const double var =
      (sumsq - sum * sum / static_cast<double>(draw_count)) / static_cast<double>(draw_count - 1);
  return {mean, var};
}

MomentReport degree_moment_stats(std::span<const BipartiteGraph> graphs, int xi) {
  if (graphs.empty()) fail(ErrorCode::kDomain, "degree_moment_stats: no graphs");
  if (xi < 1 || xi > 12) fail(ErrorCode::kDomain, "degree_moment_stats: xi out of range");
  const BigraphParams& ref = graphs.front().params();
  for (const auto& g : graphs)
    if (!g.params().same_model(ref))
      fail(ErrorCode::kParamMismatch, "degree_moment_stats: graphs have different parameters");
  const double n = static_cast<double>(ref.n);

  std::vector<double> means, squares, pairs;
  std::vector<std::vector<double>> products(static_cast<std::size_t>(xi));
  for (const auto& g : graphs) {
    // Power sums p_r, then elementary symmetric e_r by Newton's identities;
    // the mean over distinct r-tuples is e_r / C(n, r).
    std::vector<double> p(static_cast<std::size_t>(xi) + 1, 0.0);
    for (std::int32_t d : g.degrees()) {
      double dr = 1.0;
      for (int r = 1; r <= xi; ++r) {
        dr *= static_cast<double>(d);
        p[static_cast<std::size_t>(r)] += dr;
      }
    }
    std::vector<double> e(static_cast<std::size_t>(xi) + 1, 0.0);
    e[0] = 1.0;
    for (int r = 1; r <= xi; ++r) {
      double acc = 0.0;
      double sign = 1.0;
      for (int i = 1; i <= r; ++i) {
        acc += sign * e[static_cast<std::size_t>(r - i)] * p[static_cast<std::size_t>(i)];
        sign = -sign;
      }
      e[static_cast<std::size_t>(r)] = acc / static_cast<double>(r);
    }
    means.push_back(p[1] / n);
    squares.push_back(p[2] / n);
    double choose = 1.0;
    for (int r = 1; r <= xi; ++r) {
      choose *= (n - static_cast<double>(r - 1)) / static_cast<double>(r);
      products[static_cast<std::size_t>(r - 1)].push_back(e[static_cast<std::size_t>(r)] / choose);
    }
    pairs.push_back(xi >= 2 ? products[1].back()
                            : (p[1] * p[1] - p[2]) / (n * (n - 1.0)));
  }

  MomentReport report;
  report.graph_count = static_cast<int>(graphs.size());
  auto mean_of = [](const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  report.mean_degree = mean_of(means);
  report.mean_square_degree = mean_of(squares);
  report.pair_product_mean = mean_of(pairs);
  report.mean_degree_se = sample_se(means, report.mean_degree);
  report.mean_square_se = sample_se(squares, report.mean_square_degree);
  report.pair_product_se = sample_se(pairs, report.pair_product_mean);
  for (int r = 1; r <= xi; ++r) {
    const auto& v = products[static_cast<std::size_t>(r - 1)];
    const double m = mean_of(v);
    report.product_means.push_back(m);
    report.product_se.push_back(sample_se(v, m));
  }
  return report;
}

SparsityReport fingerprint_sparsity(const BipartiteGraph& graph, double psi) {
  const BigraphParams& p = graph.params();
  const double lambda = static_cast<double>(p.mu) + partial_zeta(p.m, p.alpha - 1.0);
  const double psi_sup = static_cast<double>(p.m) / lambda - 1.0;
  if (!(psi > 0.0 && psi < psi_sup))
    fail(ErrorCode::kDomain, "fingerprint_sparsity: psi must lie in (0, m/lambda - 1)");

  SparsityReport report;
  report.psi = psi;
  report.lambda = lambda;
  report.threshold_ell = static_cast<double>(p.n) / static_cast<double>(p.m) * lambda * (1.0 + psi);

  std::int64_t over = 0;
  for (std::int64_t u = 0; u < p.m; ++u)
    if (static_cast<double>(graph.user_weight(static_cast<std::int32_t>(u))) >=
        report.threshold_ell)
      over++;
  report.empirical_tail = static_cast<double>(over) / static_cast<double>(p.m);

  const double rate = lambda / static_cast<double>(p.m);
  report.chernoff_bound =
      std::exp2(-static_cast<double>(p.n) * binary_kl(rate * (1.0 + psi), rate));
  return report;
}

double memorylessness_ratio(std::span<const BipartiteGraph> graphs,
                            std::span<const std::int32_t> groups,
                            std::span<const std::int32_t> pattern) {
  if (graphs.empty()) fail(ErrorCode::kDomain, "memorylessness_ratio: no graphs");
  if (groups.empty() || groups.size() > 3)
    fail(ErrorCode::kDomain, "memorylessness_ratio: subset size must be 1..3");
  if (groups.size() != pattern.size())
    fail(ErrorCode::kDomain, "memorylessness_ratio: pattern length != subset size");
  for (std::int32_t b : pattern)
    if (b != 0 && b != 1) fail(ErrorCode::kDomain, "memorylessness_ratio: pattern bits must be 0/1");
  const BigraphParams& ref = graphs.front().params();
  for (std::int32_t j : groups)
    if (j < 0 || j >= ref.n) fail(ErrorCode::kDomain, "memorylessness_ratio: group out of range");

  const std::size_t k = groups.size();
  std::vector<std::int64_t> marginal(k, 0);
  std::int64_t joint = 0, total = 0;
  for (const auto& g : graphs) {
    if (!g.params().same_model(ref))
      fail(ErrorCode::kParamMismatch, "memorylessness_ratio: graphs have different parameters");
    for (std::int64_t u = 0; u < ref.m; ++u) {
      bool all = true;
      for (std::size_t i = 0; i < k; ++i) {
        const bool bit = g.has_edge(static_cast<std::int32_t>(u), groups[i]);
        const bool match = (bit == (pattern[i] != 0));
        if (match) marginal[i]++;
        all = all && match;
      }
      if (all) joint++;
      total++;
    }
  }

  double denom = 1.0;
  for (std::size_t i = 0; i < k; ++i) {
    if (marginal[i] == 0)
      fail(ErrorCode::kEmptySupport, "memorylessness_ratio: a marginal frequency is zero");
    denom *= static_cast<double>(marginal[i]) / static_cast<double>(total);
  }
  return (static_cast<double>(joint) / static_cast<double>(total)) / denom;
}

void write_report(std::ostream& out, const MomentReport& r) {
  out << "graphs = " << r.graph_count << "\n";
  out << "mean_degree = " << fmt(r.mean_degree) << "\n";
  out << "mean_degree_se = " << fmt(r.mean_degree_se) << "\n";
  out << "mean_square_degree = " << fmt(r.mean_square_degree) << "\n";
  out << "mean_square_se = " << fmt(r.mean_square_se) << "\n";
  out << "pair_product_mean = " << fmt(r.pair_product_mean) << "\n";
  out << "pair_product_se = " << fmt(r.pair_product_se) << "\n";
  for (std::size_t i = 0; i < r.product_means.size(); ++i) {
    out << "product_mean_" << (i + 1) << " = " << fmt(r.product_means[i]) << "\n";
    out << "product_se_" << (i + 1) << " = " << fmt(r.product_se[i]) << "\n";
  }
}

void write_report(std::ostream& out, const SparsityReport& r) {
  out << "psi = " << fmt(r.psi) << "\n";
  out << "lambda = " << fmt(r.lambda) << "\n";
  out << "threshold_ell = " << fmt(r.threshold_ell) << "\n";
  out << "empirical_tail = " << fmt(r.empirical_tail) << "\n";
  out << "chernoff_bound = " << fmt(r.chernoff_bound) << "\n";
}

void write_degree_csv(std::ostream& out, const DegreePmf& pmf) {
  out << "k,mass,stderr\n";
  for (std::size_t k = 0; k < pmf.mass.size(); ++k) {
    const double p = pmf.mass[k];
    const double se =
        std::sqrt(p * (1.0 - p) / static_cast<double>(pmf.sample_count));
    out << pmf.support[k] << "," << fmt(p) << "," << fmt(se) << "\n";
  }
}

}  // namespace popnet
