// popnet: popularity-based bipartite graph simulator and fingerprinting
// attack toolkit. Subcommands: generate, analyze, attack, sweep, bounds.
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "popnet/analytics.hpp"
#include "popnet/attack.hpp"
#include "popnet/bigraph.hpp"
#include "popnet/bounds.hpp"
#include "popnet/harness.hpp"

namespace fs = std::filesystem;
using namespace popnet;

namespace {

double parse_alpha(const std::string& s) {
  if (s == "inf") return kInfiniteAlpha;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size())
    fail(ErrorCode::kConfig, "bad alpha '" + s + "' (number or 'inf')");
  return v;
}

int cmd_generate(std::int64_t n, std::int64_t m, std::int64_t mu, const std::string& alpha,
                 std::uint64_t seed, const std::string& out) {
  BigraphParams params;
  params.n = n;
  params.m = m;
  params.mu = mu;
  params.alpha = parse_alpha(alpha);
  params.seed = seed;
  params.validate();
  auto graph = generate(params);
  save_edge_list(graph, out);
  std::cout << "wrote " << out << " (n=" << n << " m=" << m << " edges=" << graph.edge_count()
            << ")\n";
  return 0;
}

int cmd_analyze(const std::vector<std::string>& files, const std::string& pmf_csv, double psi,
                int fit_kmin, int fit_kmax, int xi) {
  std::vector<BipartiteGraph> graphs;
  for (const auto& f : files) graphs.push_back(load_edge_list(f));
  const auto& p = graphs.front().params();

  std::cout << "graphs = " << graphs.size() << "\n";
  std::cout << "n = " << p.n << "\n";
  std::cout << "m = " << p.m << "\n";
  std::cout << "mu = " << p.mu << "\n";
  if (std::isinf(p.alpha)) {
    std::cout << "alpha = inf\n";
  } else {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", p.alpha);
    std::cout << "alpha = " << buf << "\n";
  }

  auto pmf = empirical_degree_pmf(graphs);
  std::int64_t degree_sum = 0;
  for (const auto& g : graphs)
    for (std::int32_t d : g.degrees()) degree_sum += d;
  std::cout << "degree_sum = " << degree_sum << "\n";
  std::cout << "max_degree = " << (pmf.support.empty() ? 0 : pmf.support.back()) << "\n";

  write_report(std::cout, degree_moment_stats(graphs, xi));

  if (fit_kmin == 0 || fit_kmax == 0) {
    auto [lo, hi] = default_fit_window(p.n);
    if (fit_kmin == 0) fit_kmin = lo;
    if (fit_kmax == 0) fit_kmax = hi;
  }
  std::cout << "fit_kmin = " << fit_kmin << "\n";
  std::cout << "fit_kmax = " << fit_kmax << "\n";
  try {
    std::cout << "powerlaw_exponent = " << fit_powerlaw_exponent(pmf, fit_kmin, fit_kmax) << "\n";
  } catch (const SimError& e) {
    std::cout << "powerlaw_exponent = n/a (" << e.what() << ")\n";
  }

  try {
    write_report(std::cout, fingerprint_sparsity(graphs.front(), psi));
  } catch (const SimError& e) {
    std::cout << "sparsity = n/a (" << e.what() << ")\n";
  }

  if (!pmf_csv.empty()) {
    std::ofstream os(pmf_csv);
    if (!os) fail(ErrorCode::kIo, "cannot open " + pmf_csv);
    write_degree_csv(os, pmf);
    std::cout << "pmf_csv = " << pmf_csv << "\n";
  }
  return 0;
}

int cmd_attack(const std::string& graph_file, double nq, bool noiseless,
               const std::string& strategy_name_arg, double epsilon, std::uint64_t seed,
               std::int64_t victim, const std::string& trace_file, bool compat_marginal) {
  auto graph = load_edge_list(graph_file);
  auto strategy = parse_strategy(strategy_name_arg);
  if (!strategy) fail(ErrorCode::kConfig, "strategy must be 'its' or 'aits'");
  const double crossover = noiseless ? 0.0 : nq;

  AttackOptions options;
  options.record_trace = !trace_file.empty();
  if (compat_marginal) options.marginal_mode = MarginalMode::kReciprocalDegree;
  if (victim > 0) options.forced_victim = static_cast<std::int32_t>(victim - 1);

  Rng rng(seed);
  auto outcome = run_attack(graph, ChannelAssignment::single(ChannelSpec::bsc(crossover),
                                                             graph.user_count()),
                            VictimModel::uniform(graph.user_count()), *strategy, epsilon, rng,
                            options);

  std::cout << "strategy = " << strategy_name(*strategy) << "\n";
  std::cout << "epsilon = " << epsilon << "\n";
  std::cout << "nq = " << crossover << "\n";
  std::cout << "victim = " << (outcome.victim + 1) << "\n";
  std::cout << "resolved = " << (outcome.resolved ? "yes" : "no") << "\n";
  if (outcome.resolved) {
    std::cout << "identified = " << (outcome.identified_user + 1) << "\n";
    std::cout << "correct = " << (outcome.correct ? "yes" : "no") << "\n";
  }
  std::cout << "queries = " << outcome.queries_used << "\n";

  if (!trace_file.empty()) {
    std::ofstream os(trace_file);
    if (!os) fail(ErrorCode::kIo, "cannot open " + trace_file);
    write_trace(os, outcome);
    std::cout << "trace = " << trace_file << "\n";
  }
  return 0;
}

int cmd_sweep(const std::string& config_file, const std::string& preset, const std::string& out_dir,
              bool serial, int workers) {
  harness::ExperimentConfig cfg;
  if (!config_file.empty()) {
    cfg = harness::load_config(config_file);
  } else if (preset == "desk") {
    cfg = harness::desk_preset();
  } else if (preset == "full") {
    cfg = harness::full_preset();
  } else {
    fail(ErrorCode::kConfig, "need --config FILE or --preset desk|full");
  }
  if (workers > 0) cfg.workers = workers;

  fs::create_directories(out_dir);
  {
    std::ofstream os(fs::path(out_dir) / "resolved_config.txt");
    if (!os) fail(ErrorCode::kIo, "cannot write resolved config");
    harness::write_config(os, cfg);
  }

  std::ofstream csv(fs::path(out_dir) / "sweep.csv");
  if (!csv) fail(ErrorCode::kIo, "cannot write sweep.csv");
  csv << harness::csv_header() << "\n";
  csv.flush();

  auto on_point = [&](const harness::GridPointResult& p) {
    csv << harness::csv_row(p) << "\n";
    csv.flush();  // partial results survive an interrupt
    std::fprintf(stderr, "m=%lld alpha=%g %s: mean_Q=%.2f pe=%.3f (%.1fs)\n",
                 static_cast<long long>(p.m), p.alpha, strategy_name(p.strategy), p.mean_q, p.pe,
                 p.seconds);
  };
  auto result = serial ? harness::run_sweep_serial(cfg, on_point) : harness::run_sweep(cfg, on_point);

  std::ofstream plot(fs::path(out_dir) / "plot.dat");
  if (!plot) fail(ErrorCode::kIo, "cannot write plot.dat");
  harness::export_plot_data(result, plot);

  std::cout << "wrote " << (fs::path(out_dir) / "sweep.csv").string() << " ("
            << result.points.size() << " grid points)\n";
  return 0;
}

int cmd_bounds(std::int64_t m, std::int64_t n, std::int64_t mu, const std::string& alpha,
               double nq, double epsilon, double c, double cprime) {
  BigraphParams params;
  params.n = n;
  params.m = m;
  params.mu = mu;
  params.alpha = parse_alpha(alpha);
  params.validate();
  const double h_m = std::log(static_cast<double>(m));  // uniform victim prior

  bounds::BoundInputs inputs;
  inputs.params = params;
  inputs.channels = {QueryChannel{ChannelSpec::bsc(nq), 0}};
  inputs.p_theta = {1.0};
  inputs.epsilon = epsilon;
  inputs.h_m_nats = h_m;
  inputs.c_prime = cprime;
  inputs.c_thm1 = c;

  std::cout << "[theorem2]\n";
  bounds::write_result(std::cout, bounds::theorem2_bounds(inputs));
  std::cout << "[corollary1]\n";
  bounds::write_result(std::cout, bounds::corollary1_bound(params, nq, epsilon, c, cprime, h_m));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"popularity-based bigraph simulator and fingerprinting attack toolkit"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "generate a bigraph and write an edge-list file");
  std::int64_t g_n = 100, g_m = 1000, g_mu = 5;
  std::string g_alpha = "3";
  std::uint64_t g_seed = 1;
  std::string g_out;
  gen->add_option("--n", g_n, "group count")->required();
  gen->add_option("--m", g_m, "user count")->required();
  gen->add_option("--mu", g_mu, "edges per group")->required();
  gen->add_option("--alpha", g_alpha, "power-law parameter (> 2) or 'inf'")->required();
  gen->add_option("--seed", g_seed, "RNG seed");
  gen->add_option("--out", g_out, "output edge-list path")->required();

  // analyze
  auto* ana = app.add_subcommand("analyze", "degree/moment/sparsity reports from edge-list files");
  std::vector<std::string> a_files;
  std::string a_pmf_csv;
  double a_psi = 1.0;
  int a_kmin = 0, a_kmax = 0, a_xi = 3;
  ana->add_option("files", a_files, "edge-list files")->required()->expected(-1);
  ana->add_option("--pmf-csv", a_pmf_csv, "write the pooled degree pmf as CSV");
  ana->add_option("--psi", a_psi, "sparsity slack psi");
  ana->add_option("--fit-kmin", a_kmin, "power-law fit window lower edge");
  ana->add_option("--fit-kmax", a_kmax, "power-law fit window upper edge");
  ana->add_option("--xi", a_xi, "highest product-moment order");

  // attack
  auto* att = app.add_subcommand("attack", "run a single attack with optional trace");
  std::string t_graph, t_strategy = "aits", t_trace;
  double t_nq = 0.05, t_eps = 0.01;
  std::uint64_t t_seed = 1;
  std::int64_t t_victim = 0;
  bool t_noiseless = false, t_compat = false;
  att->add_option("--graph", t_graph, "edge-list file")->required();
  att->add_option("--strategy", t_strategy, "its or aits");
  att->add_option("--nq", t_nq, "BSC crossover probability");
  att->add_flag("--noiseless", t_noiseless, "use a noiseless channel");
  att->add_option("--epsilon", t_eps, "identification threshold parameter");
  att->add_option("--seed", t_seed, "RNG seed");
  att->add_option("--victim", t_victim, "force the victim (1-based; 0 = draw from the prior)");
  att->add_option("--trace", t_trace, "write the query trace to this file");
  att->add_flag("--compat-marginal", t_compat, "use the literal 1/D(r_t) response marginal");

  // sweep
  auto* swp = app.add_subcommand("sweep", "Monte Carlo sweep over (m, alpha, strategy)");
  std::string s_config, s_preset, s_out = "sweep-out";
  bool s_serial = false;
  int s_workers = 0;
  swp->add_option("--config", s_config, "config file (key = value)");
  swp->add_option("--preset", s_preset, "desk or full");
  swp->add_option("--out", s_out, "output directory")->required();
  swp->add_flag("--serial", s_serial, "use the serial reference engine");
  swp->add_option("--workers", s_workers, "OpenMP worker count (0 = default)");

  // bounds
  auto* bnd = app.add_subcommand("bounds", "expected-query and error-probability bound calculator");
  std::int64_t b_m = 100, b_n = 1000, b_mu = 5;
  std::string b_alpha = "3";
  double b_nq = 0.05, b_eps = 0.01, b_c = 1.0, b_cprime = 1.0;
  bnd->add_option("--m", b_m, "user count")->required();
  bnd->add_option("--n", b_n, "group count")->required();
  bnd->add_option("--mu", b_mu, "edges per group")->required();
  bnd->add_option("--alpha", b_alpha, "power-law parameter (> 2)")->required();
  bnd->add_option("--nq", b_nq, "BSC crossover probability")->required();
  bnd->add_option("--epsilon", b_eps, "error parameter")->required();
  bnd->add_option("--c", b_c, "degree-law constant");
  bnd->add_option("--cprime", b_cprime, "correlation-decay constant");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (gen->parsed()) return cmd_generate(g_n, g_m, g_mu, g_alpha, g_seed, g_out);
    if (ana->parsed()) return cmd_analyze(a_files, a_pmf_csv, a_psi, a_kmin, a_kmax, a_xi);
    if (att->parsed())
      return cmd_attack(t_graph, t_nq, t_noiseless, t_strategy, t_eps, t_seed, t_victim, t_trace,
                        t_compat);
    if (swp->parsed()) return cmd_sweep(s_config, s_preset, s_out, s_serial, s_workers);
    if (bnd->parsed()) return cmd_bounds(b_m, b_n, b_mu, b_alpha, b_nq, b_eps, b_c, b_cprime);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
