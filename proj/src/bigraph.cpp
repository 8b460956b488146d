#include "popnet/bigraph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <unordered_set>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "popnet/numerics.hpp"
#include "popnet/prefix_sum_tree.hpp"

namespace popnet {

namespace {

constexpr std::uint64_t kBatchTag = 0x6261746368ULL;  // "batch"

std::string format_alpha(double alpha) {
  if (std::isinf(alpha)) return "inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", alpha);
  return buf;
}

}  // namespace

void BigraphParams::validate() const {
  if (n < 1) fail(ErrorCode::kDomain, "params: n must be >= 1");
  if (m < 1) fail(ErrorCode::kDomain, "params: m must be >= 1");
  if (mu < 1) fail(ErrorCode::kDomain, "params: mu must be >= 1");
  if (std::isnan(alpha) || (!std::isinf(alpha) && alpha <= 2.0))
    fail(ErrorCode::kDomain,
         "params: alpha must be > 2 or INFINITE_ALPHA (the validated regime needs alpha > 2)");
}

ZetaLaw::ZetaLaw(std::int64_t m, double alpha) {
  if (m < 1) fail(ErrorCode::kDomain, "ZetaLaw: m must be >= 1");
  if (std::isinf(alpha)) return;  // degenerate at 1
  cum_.resize(static_cast<std::size_t>(m));
  double acc = 0.0;
  for (std::int64_t k = 1; k <= m; ++k) {
    acc += std::pow(static_cast<double>(k), -alpha);
    cum_[static_cast<std::size_t>(k - 1)] = acc;
  }
}

std::int32_t ZetaLaw::draw(Rng& rng) const {
  if (cum_.empty()) return 1;
  const double u = rng.u01() * cum_.back();
  auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
  if (it == cum_.end()) --it;
  return static_cast<std::int32_t>(it - cum_.begin()) + 1;
}

std::vector<std::int32_t> sample_initial_popularities(const BigraphParams& params, Rng& rng) {
  params.validate();
  std::vector<std::int32_t> tau0(static_cast<std::size_t>(params.n), 1);
  if (std::isinf(params.alpha)) return tau0;
  ZetaLaw law(params.m, params.alpha);
  for (auto& t : tau0) t = law.draw(rng);
  return tau0;
}

BipartiteGraph BipartiteGraph::from_parts(
    BigraphParams params, std::vector<std::int32_t> initial_popularity,
    std::vector<std::vector<std::int32_t>> members_by_group) {
  if (params.n < 1 || params.m < 1)
    fail(ErrorCode::kDomain, "from_parts: n and m must be >= 1");
  if (static_cast<std::int64_t>(initial_popularity.size()) != params.n)
    fail(ErrorCode::kConsistency, "from_parts: popularity count != n");
  if (static_cast<std::int64_t>(members_by_group.size()) != params.n)
    fail(ErrorCode::kConsistency, "from_parts: group count != n");
  for (std::int32_t t : initial_popularity)
    if (t < 1) fail(ErrorCode::kConsistency, "from_parts: tau0 must be >= 1");

  BipartiteGraph g;
  g.params_ = params;
  g.tau0_ = std::move(initial_popularity);
  g.degrees_.resize(static_cast<std::size_t>(params.n));
  g.member_off_.assign(static_cast<std::size_t>(params.n) + 1, 0);

  std::int64_t total = 0;
  for (std::int64_t j = 0; j < params.n; ++j)
    total += static_cast<std::int64_t>(members_by_group[static_cast<std::size_t>(j)].size());
  g.member_dat_.reserve(static_cast<std::size_t>(total));

  for (std::int64_t j = 0; j < params.n; ++j) {
    auto& list = members_by_group[static_cast<std::size_t>(j)];
    std::sort(list.begin(), list.end());
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::int32_t u = list[i];
      if (u < 0 || u >= params.m)
        fail(ErrorCode::kConsistency, "from_parts: user index out of range");
      if (i > 0 && list[i - 1] == u)
        fail(ErrorCode::kConsistency, "from_parts: duplicate (user, group) edge");
      g.member_dat_.push_back(u);
    }
    g.degrees_[static_cast<std::size_t>(j)] = static_cast<std::int32_t>(list.size());
    g.member_off_[static_cast<std::size_t>(j) + 1] =
        g.member_off_[static_cast<std::size_t>(j)] + static_cast<std::int64_t>(list.size());
  }

  // Transpose into per-user membership lists (group-ascending, hence sorted).
  g.membership_off_.assign(static_cast<std::size_t>(params.m) + 1, 0);
  for (std::int32_t u : g.member_dat_) g.membership_off_[static_cast<std::size_t>(u) + 1]++;
  for (std::int64_t i = 0; i < params.m; ++i)
    g.membership_off_[static_cast<std::size_t>(i) + 1] += g.membership_off_[static_cast<std::size_t>(i)];
  g.membership_dat_.resize(g.member_dat_.size());
  std::vector<std::int64_t> cursor(g.membership_off_.begin(), g.membership_off_.end() - 1);
  for (std::int64_t j = 0; j < params.n; ++j) {
    for (std::int64_t e = g.member_off_[static_cast<std::size_t>(j)];
         e < g.member_off_[static_cast<std::size_t>(j) + 1]; ++e) {
      const std::int32_t u = g.member_dat_[static_cast<std::size_t>(e)];
      g.membership_dat_[static_cast<std::size_t>(cursor[static_cast<std::size_t>(u)]++)] =
          static_cast<std::int32_t>(j);
    }
  }
  return g;
}

bool BipartiteGraph::has_edge(std::int32_t user, std::int32_t group) const {
  if (user < 0 || user >= params_.m || group < 0 || group >= params_.n)
    fail(ErrorCode::kDomain, "has_edge: index out of range");
  auto members = group_members(group);
  auto groups = user_groups(user);
  if (groups.size() < members.size())
    return std::binary_search(groups.begin(), groups.end(), group);
  return std::binary_search(members.begin(), members.end(), user);
}

BipartiteGraph generate(const BigraphParams& params, Rng& rng) {
  params.validate();
  const std::int64_t n = params.n;
  const std::int64_t m = params.m;
  const std::int64_t budget = params.edge_budget();

  std::vector<std::int32_t> tau0 = sample_initial_popularities(params, rng);
  std::vector<std::int64_t> weights(tau0.begin(), tau0.end());
  PrefixSumTree tree(weights);

  std::vector<std::vector<std::int32_t>> members(static_cast<std::size_t>(n));
  std::vector<std::int32_t> degrees(static_cast<std::size_t>(n), 0);
  std::unordered_set<std::uint64_t> edges;
  edges.reserve(static_cast<std::size_t>(budget) * 2);
  std::vector<std::uint8_t> mark;  // scratch for the complement fallback
  std::int64_t saturated = 0;

  auto edge_key = [m](std::int64_t j, std::int64_t u) {
    return static_cast<std::uint64_t>(j) * static_cast<std::uint64_t>(m) +
           static_cast<std::uint64_t>(u);
  };

  for (std::int64_t t = 0; t < budget; ++t) {
    if (saturated == n)
      fail(ErrorCode::kGenerationStalled,
           "every group is saturated before the edge budget was placed");
    // Draw a group proportionally to popularity; a saturated group is redrawn
    // without updating any popularity.
    std::int64_t j;
    do {
      j = tree.find(static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(tree.total()))));
    } while (degrees[static_cast<std::size_t>(j)] >= m);

    const std::int64_t d = degrees[static_cast<std::size_t>(j)];
    std::int64_t u;
    if (d <= m / 2) {
      // Rejection against the member set; expected O(1) retries while sparse.
      do {
        u = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(m)));
      } while (edges.contains(edge_key(j, u)));
    } else {
      // Dense group: draw uniformly from the explicit complement.
      if (mark.empty()) mark.assign(static_cast<std::size_t>(m), 0);
      for (std::int32_t v : members[static_cast<std::size_t>(j)]) mark[static_cast<std::size_t>(v)] = 1;
      std::int64_t pick = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(m - d)));
      u = -1;
      for (std::int64_t v = 0; v < m; ++v) {
        if (!mark[static_cast<std::size_t>(v)] && pick-- == 0) {
          u = v;
          break;
        }
      }
      for (std::int32_t v : members[static_cast<std::size_t>(j)]) mark[static_cast<std::size_t>(v)] = 0;
    }

    members[static_cast<std::size_t>(j)].push_back(static_cast<std::int32_t>(u));
    edges.insert(edge_key(j, u));
    degrees[static_cast<std::size_t>(j)]++;
    if (degrees[static_cast<std::size_t>(j)] == m) saturated++;
    tree.add(j, 1);
  }

  return BipartiteGraph::from_parts(params, std::move(tau0), std::move(members));
}

BipartiteGraph generate(const BigraphParams& params) {
  Rng rng(params.seed);
  return generate(params, rng);
}

std::vector<BipartiteGraph> generate_batch(const BigraphParams& base, int count, bool parallel) {
  base.validate();
  if (count < 0) fail(ErrorCode::kDomain, "generate_batch: negative count");
  std::vector<BipartiteGraph> graphs(static_cast<std::size_t>(count));
  const bool threaded = parallel;
#pragma omp parallel for schedule(dynamic) if (threaded)
  for (int g = 0; g < count; ++g) {
    BigraphParams p = base;
    p.seed = mix_seed(base.seed, {static_cast<std::uint64_t>(g), kBatchTag});
    graphs[static_cast<std::size_t>(g)] = generate(p);
  }
  return graphs;
}

Fingerprint fingerprint(const BipartiteGraph& graph, std::int32_t user) {
  if (user < 0 || user >= graph.user_count())
    fail(ErrorCode::kDomain, "fingerprint: user index out of range");
  auto groups = graph.user_groups(user);
  Fingerprint fp;
  fp.owner = user;
  fp.member_groups.assign(groups.begin(), groups.end());
  fp.weight = static_cast<std::int32_t>(fp.member_groups.size());
  return fp;
}

void save_edge_list(const BipartiteGraph& graph, std::ostream& out) {
  const auto& p = graph.params();
  out << "bigraph v1 n=" << p.n << " m=" << p.m << " mu=" << p.mu
      << " alpha=" << format_alpha(p.alpha) << " seed=" << p.seed << "\n";
  for (std::int64_t j = 0; j < p.n; ++j)
    out << "g " << (j + 1) << " tau0=" << graph.initial_popularities()[static_cast<std::size_t>(j)]
        << "\n";
  for (std::int64_t j = 0; j < p.n; ++j)
    for (std::int32_t u : graph.group_members(static_cast<std::int32_t>(j)))
      out << "e " << (u + 1) << " " << (j + 1) << "\n";
  if (!out) fail(ErrorCode::kIo, "save_edge_list: write failed");
}

void save_edge_list(const BipartiteGraph& graph, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::kIo, "save_edge_list: cannot open " + path);
  save_edge_list(graph, out);
}

namespace {

[[noreturn]] void parse_fail(std::int64_t line, const std::string& what) {
  fail(ErrorCode::kParse, "line " + std::to_string(line) + ": " + what);
}

// Accepts "key=value", returns value or fails.
std::string expect_kv(const std::string& token, const std::string& key, std::int64_t line) {
  if (token.size() <= key.size() + 1 || token.compare(0, key.size(), key) != 0 ||
      token[key.size()] != '=')
    parse_fail(line, "expected " + key + "=<value>, got '" + token + "'");
  return token.substr(key.size() + 1);
}

std::int64_t parse_int(const std::string& s, std::int64_t line, const std::string& what) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    parse_fail(line, "bad integer for " + what + ": '" + s + "'");
  return v;
}

std::uint64_t parse_uint(const std::string& s, std::int64_t line, const std::string& what) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    parse_fail(line, "bad integer for " + what + ": '" + s + "'");
  return v;
}

}  // namespace

BipartiteGraph load_edge_list(std::istream& in) {
  std::string line;
  std::int64_t lineno = 0;

  if (!std::getline(in, line)) fail(ErrorCode::kParse, "line 1: empty stream");
  lineno = 1;
  std::istringstream header(line);
  std::string magic, version, tok;
  header >> magic >> version;
  if (magic != "bigraph" || version != "v1")
    parse_fail(1, "expected 'bigraph v1' header");
  BigraphParams params;
  if (!(header >> tok)) parse_fail(1, "missing n=");
  params.n = parse_int(expect_kv(tok, "n", 1), 1, "n");
  if (!(header >> tok)) parse_fail(1, "missing m=");
  params.m = parse_int(expect_kv(tok, "m", 1), 1, "m");
  if (!(header >> tok)) parse_fail(1, "missing mu=");
  params.mu = parse_int(expect_kv(tok, "mu", 1), 1, "mu");
  if (!(header >> tok)) parse_fail(1, "missing alpha=");
  {
    std::string a = expect_kv(tok, "alpha", 1);
    if (a == "inf") {
      params.alpha = kInfiniteAlpha;
    } else {
      char* end = nullptr;
      params.alpha = std::strtod(a.c_str(), &end);
      if (end != a.c_str() + a.size()) parse_fail(1, "bad alpha: '" + a + "'");
    }
  }
  if (!(header >> tok)) parse_fail(1, "missing seed=");
  params.seed = parse_uint(expect_kv(tok, "seed", 1), 1, "seed");
  if (params.n < 1 || params.m < 1 || params.mu < 0)
    parse_fail(1, "header out of range (need n>=1, m>=1, mu>=0)");
  if (params.n > 1000000000 || params.m > 1000000000)
    parse_fail(1, "header counts implausibly large");

  std::vector<std::int32_t> tau0(static_cast<std::size_t>(params.n), 0);
  std::int64_t groups_seen = 0;
  std::vector<std::vector<std::int32_t>> members(static_cast<std::size_t>(params.n));
  std::unordered_set<std::uint64_t> seen;
  std::int64_t edges_seen = 0;

  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string kind;
    if (!(ls >> kind)) continue;
    if (kind == "g") {
      std::string js, ts;
      if (!(ls >> js >> ts)) parse_fail(lineno, "malformed group line");
      std::int64_t j = parse_int(js, lineno, "group index");
      if (j < 1 || j > params.n) parse_fail(lineno, "group index out of range");
      std::int64_t t = parse_int(expect_kv(ts, "tau0", lineno), lineno, "tau0");
      if (t < 1) parse_fail(lineno, "tau0 must be >= 1");
      if (tau0[static_cast<std::size_t>(j - 1)] != 0) parse_fail(lineno, "duplicate group line");
      tau0[static_cast<std::size_t>(j - 1)] = static_cast<std::int32_t>(t);
      ++groups_seen;
    } else if (kind == "e") {
      std::string us, js;
      if (!(ls >> us >> js)) parse_fail(lineno, "malformed edge line");
      std::int64_t u = parse_int(us, lineno, "user index");
      std::int64_t j = parse_int(js, lineno, "group index");
      if (u < 1 || u > params.m) parse_fail(lineno, "user index out of range");
      if (j < 1 || j > params.n) parse_fail(lineno, "group index out of range");
      const std::uint64_t key = static_cast<std::uint64_t>(j - 1) *
                                    static_cast<std::uint64_t>(params.m) +
                                static_cast<std::uint64_t>(u - 1);
      if (!seen.insert(key).second)
        fail(ErrorCode::kConsistency,
             "line " + std::to_string(lineno) + ": duplicate edge");
      members[static_cast<std::size_t>(j - 1)].push_back(static_cast<std::int32_t>(u - 1));
      ++edges_seen;
    } else if (kind[0] == '#') {
      continue;
    } else {
      parse_fail(lineno, "unknown record '" + kind + "'");
    }
  }

  if (groups_seen != params.n)
    fail(ErrorCode::kConsistency, "header says n=" + std::to_string(params.n) + " but " +
                                      std::to_string(groups_seen) + " group lines found");
  if (edges_seen != params.mu * params.n)
    fail(ErrorCode::kConsistency,
         "header implies " + std::to_string(params.mu * params.n) + " edges but " +
             std::to_string(edges_seen) + " edge lines found");

  return BipartiteGraph::from_parts(params, std::move(tau0), std::move(members));
}

BipartiteGraph load_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "load_edge_list: cannot open " + path);
  return load_edge_list(in);
}

}  // namespace popnet
