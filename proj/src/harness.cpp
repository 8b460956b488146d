#include "popnet/harness.hpp"

#include <atomic>
#include <bit>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace popnet::harness {

namespace {

constexpr std::uint64_t kGraphTag = 0x677261706857ULL;
constexpr std::uint64_t kTrialTag = 0x747269616c57ULL;

std::uint64_t alpha_bits(double alpha) { return std::bit_cast<std::uint64_t>(alpha); }

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_alpha(double alpha) {
  if (std::isinf(alpha)) return "inf";
  return fmt(alpha);
}

struct TrialRecord {
  std::int64_t queries = 0;
  bool resolved = false;
  bool correct = false;
};

}  // namespace

std::int64_t ExperimentConfig::n_for(std::int64_t m) const {
  return std::llround(static_cast<double>(m) / beta);
}

double ExperimentConfig::epsilon_for(std::int64_t m, double alpha, Strategy strategy) const {
  for (const auto& o : epsilon_overrides)
    if (o.m == m && o.alpha == alpha && o.strategy == strategy) return o.epsilon;
  return epsilon;
}

void ExperimentConfig::validate() const {
  if (graphs < 1 || victims < 1) fail(ErrorCode::kConfig, "config: graphs and victims must be >= 1");
  if (mu < 1) fail(ErrorCode::kConfig, "config: mu must be >= 1");
  if (!(beta > 0.0)) fail(ErrorCode::kConfig, "config: beta must be > 0");
  if (!(nq >= 0.0 && nq <= 1.0)) fail(ErrorCode::kConfig, "config: nq must lie in [0,1]");
  if (!(epsilon > 0.0 && epsilon < 1.0)) fail(ErrorCode::kConfig, "config: epsilon must lie in (0,1)");
  if (m_values.empty()) fail(ErrorCode::kConfig, "config: grid m list is empty");
  if (alpha_values.empty()) fail(ErrorCode::kConfig, "config: grid alpha list is empty");
  if (strategies.empty()) fail(ErrorCode::kConfig, "config: grid strategy list is empty");
  for (std::int64_t m : m_values) {
    if (m < 1) fail(ErrorCode::kConfig, "config: m must be >= 1");
    if (n_for(m) < 1) fail(ErrorCode::kConfig, "config: n = round(m/beta) must be >= 1");
  }
  for (double a : alpha_values)
    if (std::isnan(a) || (!std::isinf(a) && a <= 2.0))
      fail(ErrorCode::kConfig, "config: alpha must be > 2 or inf");
  for (const auto& o : epsilon_overrides)
    if (!(o.epsilon > 0.0 && o.epsilon < 1.0))
      fail(ErrorCode::kConfig, "config: override epsilon must lie in (0,1)");
}

std::uint64_t graph_seed(std::uint64_t base_seed, std::int64_t m, double alpha,
                         Strategy strategy, int g) {
  return mix_seed(base_seed,
                  {static_cast<std::uint64_t>(m), alpha_bits(alpha),
                   static_cast<std::uint64_t>(strategy == Strategy::kAITS ? 1 : 0),
                   static_cast<std::uint64_t>(g), kGraphTag});
}

std::uint64_t trial_seed(std::uint64_t base_seed, std::int64_t m, double alpha,
                         Strategy strategy, int g, int v) {
  return mix_seed(base_seed,
                  {static_cast<std::uint64_t>(m), alpha_bits(alpha),
                   static_cast<std::uint64_t>(strategy == Strategy::kAITS ? 1 : 0),
                   static_cast<std::uint64_t>(g), static_cast<std::uint64_t>(v), kTrialTag});
}

int resolve_workers(const ExperimentConfig& config) {
  if (const char* env = std::getenv("POPNET_WORKERS")) {
    int w = 0;
    auto [ptr, ec] = std::from_chars(env, env + std::string_view(env).size(), w);
    if (ec == std::errc() && w >= 1) return w;
  }
  return config.workers;
}

namespace {

SweepResult run_sweep_impl(const ExperimentConfig& config, const PointCallback& on_point,
                           bool parallel) {
  config.validate();

#ifdef _OPENMP
  if (parallel) {
    const int workers = resolve_workers(config);
    if (workers >= 1) omp_set_num_threads(workers);
  }
#endif

  SweepResult result;
  const int ntrials = config.graphs * config.victims;

  for (std::int64_t m : config.m_values) {
    for (double alpha : config.alpha_values) {
      for (Strategy strategy : config.strategies) {
        const auto start = std::chrono::steady_clock::now();
        const std::int64_t n = config.n_for(m);
        const double eps = config.epsilon_for(m, alpha, strategy);

        BigraphParams base;
        base.n = n;
        base.m = m;
        base.mu = config.mu;
        base.alpha = alpha;

        std::vector<BipartiteGraph> graphs(static_cast<std::size_t>(config.graphs));
        std::vector<TrialRecord> trials(static_cast<std::size_t>(ntrials));
        std::atomic<bool> failed{false};
        std::string error_message;

        if (parallel) {
#pragma omp parallel for schedule(dynamic)
          for (int g = 0; g < config.graphs; ++g) {
            if (failed.load(std::memory_order_relaxed)) continue;
            try {
              BigraphParams p = base;
              p.seed = graph_seed(config.base_seed, m, alpha, strategy, g);
              graphs[static_cast<std::size_t>(g)] = generate(p);
            } catch (const std::exception& e) {
#pragma omp critical
              {
                if (!failed.exchange(true)) error_message = e.what();
              }
            }
          }
        } else {
          for (int g = 0; g < config.graphs; ++g) {
            BigraphParams p = base;
            p.seed = graph_seed(config.base_seed, m, alpha, strategy, g);
            graphs[static_cast<std::size_t>(g)] = generate(p);
          }
        }
        if (failed.load()) fail(ErrorCode::kConsistency, "sweep generation failed: " + error_message);

        const ChannelAssignment assignment =
            ChannelAssignment::single(ChannelSpec::bsc(config.nq), m);
        const VictimModel victims = VictimModel::uniform(m);

        auto run_one = [&](int idx) {
          const int g = idx / config.victims;
          const int v = idx % config.victims;
          Rng rng(trial_seed(config.base_seed, m, alpha, strategy, g, v));
          AttackOutcome out = run_attack(graphs[static_cast<std::size_t>(g)], assignment,
                                         victims, strategy, eps, rng);
          TrialRecord rec;
          rec.queries = out.resolved ? out.queries_used : n;
          rec.resolved = out.resolved;
          rec.correct = out.resolved && out.correct;
          trials[static_cast<std::size_t>(idx)] = rec;
        };

        if (parallel) {
#pragma omp parallel for schedule(dynamic)
          for (int idx = 0; idx < ntrials; ++idx) {
            if (failed.load(std::memory_order_relaxed)) continue;
            try {
              run_one(idx);
            } catch (const std::exception& e) {
#pragma omp critical
              {
                if (!failed.exchange(true)) error_message = e.what();
              }
            }
          }
          if (failed.load()) fail(ErrorCode::kConsistency, "sweep trial failed: " + error_message);
        } else {
          for (int idx = 0; idx < ntrials; ++idx) run_one(idx);
        }

        // Ordered reduction over the trial slots keeps the aggregate
        // independent of scheduling.
        GridPointResult point;
        point.m = m;
        point.alpha = alpha;
        point.strategy = strategy;
        point.n = n;
        point.mu = config.mu;
        point.beta = config.beta;
        point.nq = config.nq;
        point.epsilon = eps;
        point.trials = ntrials;
        double sum = 0.0, sumsq = 0.0;
        for (const auto& rec : trials) {
          const double q = static_cast<double>(rec.queries);
          sum += q;
          sumsq += q * q;
          if (!rec.resolved)
            point.unresolved++;
          else if (!rec.correct)
            point.errors++;
        }
        point.mean_q = sum / static_cast<double>(ntrials);
        const double var =
            ntrials > 1
                ? (sumsq - sum * sum / static_cast<double>(ntrials)) / static_cast<double>(ntrials - 1)
                : 0.0;
        point.ci95_q = 1.96 * std::sqrt(std::max(0.0, var) / static_cast<double>(ntrials));
        point.pe = static_cast<double>(point.errors + point.unresolved) /
                   static_cast<double>(ntrials);
        point.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

        result.points.push_back(point);
        if (on_point) on_point(point);
      }
    }
  }
  return result;
}

}  // namespace

SweepResult run_sweep(const ExperimentConfig& config, const PointCallback& on_point) {
  return run_sweep_impl(config, on_point, true);
}

SweepResult run_sweep_serial(const ExperimentConfig& config, const PointCallback& on_point) {
  return run_sweep_impl(config, on_point, false);
}

std::string csv_header() {
  return "m,alpha,strategy,n,mu,beta,nq,epsilon,trials,mean_Q,ci95_Q,pe,errors,unresolved,seconds";
}

std::string csv_row(const GridPointResult& p) {
  std::ostringstream os;
  os << p.m << ',' << format_alpha(p.alpha) << ',' << strategy_name(p.strategy) << ',' << p.n
     << ',' << p.mu << ',' << fmt(p.beta) << ',' << fmt(p.nq) << ',' << fmt(p.epsilon) << ','
     << p.trials << ',' << fmt(p.mean_q) << ',' << fmt(p.ci95_q) << ',' << fmt(p.pe) << ','
     << p.errors << ',' << p.unresolved << ',' << fmt(p.seconds);
  return os.str();
}

void export_csv(const SweepResult& result, std::ostream& out) {
  out << csv_header() << "\n";
  for (const auto& p : result.points) out << csv_row(p) << "\n";
  if (!out) fail(ErrorCode::kIo, "export_csv: write failed");
}

void export_plot_data(const SweepResult& result, std::ostream& out) {
  if (result.points.empty()) fail(ErrorCode::kDomain, "export_plot_data: empty result");
  // One block per (alpha, strategy) pair, in first-seen order.
  std::vector<std::pair<double, Strategy>> series;
  for (const auto& p : result.points) {
    std::pair<double, Strategy> key{p.alpha, p.strategy};
    bool seen = false;
    for (const auto& s : series) seen = seen || (s == key);
    if (!seen) series.push_back(key);
  }
  bool first = true;
  for (const auto& [alpha, strategy] : series) {
    if (!first) out << "\n";
    first = false;
    out << "# series m=";
    bool first_m = true;
    for (const auto& p : result.points)
      if (p.alpha == alpha && p.strategy == strategy) {
        out << (first_m ? "" : ",") << p.m;
        first_m = false;
      }
    out << " alpha=" << format_alpha(alpha) << " strategy=" << strategy_name(strategy) << "\n";
    for (const auto& p : result.points)
      if (p.alpha == alpha && p.strategy == strategy)
        out << p.m << " " << fmt(p.mean_q) << "\n";
  }
  if (!out) fail(ErrorCode::kIo, "export_plot_data: write failed");
}

namespace {

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

double parse_double(const std::string& s, int lineno, const char* what) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size())
    fail(ErrorCode::kConfig,
         "config line " + std::to_string(lineno) + ": bad " + what + " '" + s + "'");
  return v;
}

std::int64_t parse_i64(const std::string& s, int lineno, const char* what) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    fail(ErrorCode::kConfig,
         "config line " + std::to_string(lineno) + ": bad " + what + " '" + s + "'");
  return v;
}

}  // namespace

ExperimentConfig load_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string section;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    if (tokens.size() == 1 && tokens[0].front() == '[' && tokens[0].back() == ']') {
      section = tokens[0].substr(1, tokens[0].size() - 2);
      if (section != "grid" && section != "overrides")
        fail(ErrorCode::kConfig, "config line " + std::to_string(lineno) + ": unknown section [" +
                                     section + "]");
      continue;
    }

    if (section == "overrides") {
      // m=<m> alpha=<a> strategy=<s> epsilon=<e>
      EpsilonOverride o;
      bool have_m = false, have_a = false, have_s = false, have_e = false;
      for (const auto& tok : tokens) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos)
          fail(ErrorCode::kConfig,
               "config line " + std::to_string(lineno) + ": expected key=value, got '" + tok + "'");
        const std::string key = tok.substr(0, eq);
        const std::string value = tok.substr(eq + 1);
        if (key == "m") {
          o.m = parse_i64(value, lineno, "m");
          have_m = true;
        } else if (key == "alpha") {
          o.alpha = parse_double(value, lineno, "alpha");
          have_a = true;
        } else if (key == "strategy") {
          auto s = parse_strategy(value);
          if (!s) fail(ErrorCode::kConfig, "config line " + std::to_string(lineno) +
                                               ": unknown strategy '" + value + "'");
          o.strategy = *s;
          have_s = true;
        } else if (key == "epsilon") {
          o.epsilon = parse_double(value, lineno, "epsilon");
          have_e = true;
        } else {
          fail(ErrorCode::kConfig,
               "config line " + std::to_string(lineno) + ": unknown override key '" + key + "'");
        }
      }
      if (!(have_m && have_a && have_s && have_e))
        fail(ErrorCode::kConfig, "config line " + std::to_string(lineno) +
                                     ": override needs m, alpha, strategy, epsilon");
      cfg.epsilon_overrides.push_back(o);
      continue;
    }

    // key = value [value ...]
    if (tokens.size() < 3 || tokens[1] != "=")
      fail(ErrorCode::kConfig,
           "config line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string& key = tokens[0];
    std::vector<std::string> values(tokens.begin() + 2, tokens.end());

    if (section == "grid") {
      if (key == "m") {
        cfg.m_values.clear();
        for (const auto& v : values) cfg.m_values.push_back(parse_i64(v, lineno, "m"));
      } else if (key == "alpha") {
        cfg.alpha_values.clear();
        for (const auto& v : values) cfg.alpha_values.push_back(parse_double(v, lineno, "alpha"));
      } else if (key == "strategy") {
        cfg.strategies.clear();
        for (const auto& v : values) {
          auto s = parse_strategy(v);
          if (!s) fail(ErrorCode::kConfig, "config line " + std::to_string(lineno) +
                                               ": unknown strategy '" + v + "'");
          cfg.strategies.push_back(*s);
        }
      } else {
        fail(ErrorCode::kConfig,
             "config line " + std::to_string(lineno) + ": unknown grid key '" + key + "'");
      }
      continue;
    }

    if (values.size() != 1)
      fail(ErrorCode::kConfig,
           "config line " + std::to_string(lineno) + ": key '" + key + "' takes one value");
    const std::string& value = values[0];
    if (key == "base_seed") {
      std::uint64_t v = 0;
      auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
      if (ec != std::errc() || ptr != value.data() + value.size())
        fail(ErrorCode::kConfig, "config line " + std::to_string(lineno) + ": bad base_seed");
      cfg.base_seed = v;
    } else if (key == "mu") {
      cfg.mu = parse_i64(value, lineno, "mu");
    } else if (key == "beta") {
      cfg.beta = parse_double(value, lineno, "beta");
    } else if (key == "nq") {
      cfg.nq = parse_double(value, lineno, "nq");
    } else if (key == "epsilon") {
      cfg.epsilon = parse_double(value, lineno, "epsilon");
    } else if (key == "graphs") {
      cfg.graphs = static_cast<int>(parse_i64(value, lineno, "graphs"));
    } else if (key == "victims") {
      cfg.victims = static_cast<int>(parse_i64(value, lineno, "victims"));
    } else if (key == "workers") {
      cfg.workers = static_cast<int>(parse_i64(value, lineno, "workers"));
    } else {
      fail(ErrorCode::kConfig,
           "config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "load_config: cannot open " + path);
  return load_config(in);
}

void write_config(std::ostream& out, const ExperimentConfig& cfg) {
  out << "base_seed = " << cfg.base_seed << "\n";
  out << "mu = " << cfg.mu << "\n";
  out << "beta = " << fmt(cfg.beta) << "\n";
  out << "nq = " << fmt(cfg.nq) << "\n";
  out << "epsilon = " << fmt(cfg.epsilon) << "\n";
  out << "graphs = " << cfg.graphs << "\n";
  out << "victims = " << cfg.victims << "\n";
  out << "workers = " << cfg.workers << "\n";
  out << "[grid]\n";
  out << "m =";
  for (std::int64_t m : cfg.m_values) out << " " << m;
  out << "\n";
  out << "alpha =";
  for (double a : cfg.alpha_values) out << " " << format_alpha(a);
  out << "\n";
  out << "strategy =";
  for (Strategy s : cfg.strategies) out << " " << strategy_name(s);
  out << "\n";
  if (!cfg.epsilon_overrides.empty()) {
    out << "[overrides]\n";
    for (const auto& o : cfg.epsilon_overrides)
      out << "m=" << o.m << " alpha=" << format_alpha(o.alpha)
          << " strategy=" << strategy_name(o.strategy) << " epsilon=" << fmt(o.epsilon) << "\n";
  }
}

ExperimentConfig desk_preset() {
  ExperimentConfig cfg;
  cfg.base_seed = 20240901;
  cfg.mu = 100;
  cfg.beta = 0.1;
  cfg.nq = 0.05;
  cfg.epsilon = 0.01;
  cfg.graphs = 5;
  cfg.victims = 20;  // 100 trials per grid point
  cfg.m_values = {1000, 2000};
  cfg.alpha_values = {3.0, 10.0};
  cfg.strategies = {Strategy::kITS, Strategy::kAITS};
  return cfg;
}

ExperimentConfig full_preset() {
  ExperimentConfig cfg;
  cfg.base_seed = 20240901;
  cfg.mu = 100;
  cfg.beta = 0.1;
  cfg.nq = 0.05;
  cfg.epsilon = 0.01;
  cfg.graphs = 5;
  cfg.victims = 100;  // 500 trials per grid point
  cfg.m_values = {1000, 2000, 4000, 6000, 8000, 10000};
  cfg.alpha_values = {3.0, 5.0, 10.0};
  cfg.strategies = {Strategy::kITS, Strategy::kAITS};
  return cfg;
}

}  // namespace popnet::harness
