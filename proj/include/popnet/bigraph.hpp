#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "popnet/errors.hpp"
#include "popnet/rng.hpp"

namespace popnet {

// Sentinel for the alpha -> infinity regime (all initial popularities 1).
inline constexpr double kInfiniteAlpha = std::numeric_limits<double>::infinity();

struct BigraphParams {
  std::int64_t n = 1;   // group (right-vertex) count
  std::int64_t m = 1;   // user (left-vertex) count
  std::int64_t mu = 1;  // edges per group; total edge budget is mu*n
  double alpha = kInfiniteAlpha;
  std::uint64_t seed = 0;

  std::int64_t edge_budget() const { return mu * n; }
  double beta() const { return static_cast<double>(m) / static_cast<double>(n); }

  void validate() const;  // throws SimError on invalid model parameters

  bool same_model(const BigraphParams& other) const {
    return n == other.n && m == other.m && mu == other.mu &&
           ((alpha == other.alpha) ||
            (alpha != alpha && other.alpha != other.alpha));
  }

  friend bool operator==(const BigraphParams&, const BigraphParams&) = default;
};

// Inverse-CDF sampler for the initial-popularity law
// P(tau0 = k) = k^{-alpha} / zeta(m, alpha), k in [1, m].
class ZetaLaw {
 public:
  ZetaLaw(std::int64_t m, double alpha);
  std::int32_t draw(Rng& rng) const;

 private:
  std::vector<double> cum_;  // empty when alpha is infinite (always 1)
};

// Immutable generated bipartite graph in CSR form (both directions).
// Group and user indices are 0-based in the API; the edge-list file format is
// 1-based.
class BipartiteGraph {
 public:
  static BipartiteGraph from_parts(BigraphParams params,
                                   std::vector<std::int32_t> initial_popularity,
                                   std::vector<std::vector<std::int32_t>> members_by_group);

  const BigraphParams& params() const { return params_; }
  std::int64_t group_count() const { return params_.n; }
  std::int64_t user_count() const { return params_.m; }
  std::int64_t edge_count() const { return static_cast<std::int64_t>(member_dat_.size()); }

  std::int32_t degree(std::int32_t group) const { return degrees_[group]; }
  std::span<const std::int32_t> degrees() const { return degrees_; }
  std::span<const std::int32_t> initial_popularities() const { return tau0_; }

  std::span<const std::int32_t> group_members(std::int32_t group) const {
    return {member_dat_.data() + member_off_[group],
            member_dat_.data() + member_off_[group + 1]};
  }
  std::span<const std::int32_t> user_groups(std::int32_t user) const {
    return {membership_dat_.data() + membership_off_[user],
            membership_dat_.data() + membership_off_[user + 1]};
  }

  // Fingerprint weight C_i: number of group memberships of the user.
  std::int32_t user_weight(std::int32_t user) const {
    return static_cast<std::int32_t>(membership_off_[user + 1] - membership_off_[user]);
  }

  bool has_edge(std::int32_t user, std::int32_t group) const;

  friend bool operator==(const BipartiteGraph&, const BipartiteGraph&) = default;

 private:
  BigraphParams params_;
  std::vector<std::int32_t> tau0_;
  std::vector<std::int32_t> degrees_;
  std::vector<std::int64_t> member_off_;      // n+1
  std::vector<std::int32_t> member_dat_;      // sorted user ids per group
  std::vector<std::int64_t> membership_off_;  // m+1
  std::vector<std::int32_t> membership_dat_;  // sorted group ids per user
};

// Sparse fingerprint row of one user: sorted group ids plus its weight.
struct Fingerprint {
  std::int32_t owner = 0;
  std::vector<std::int32_t> member_groups;
  std::int32_t weight = 0;
};

// n independent draws of the initial-popularity law (all ones for infinite
// alpha).
std::vector<std::int32_t> sample_initial_popularities(const BigraphParams& params, Rng& rng);

// The iterative popularity-weighted attachment process: mu*n steps, each
// drawing a group proportionally to tau(t-1) (redrawing saturated groups
// without a popularity update), then a uniform non-member user.
BipartiteGraph generate(const BigraphParams& params, Rng& rng);
BipartiteGraph generate(const BigraphParams& params);  // seeds from params.seed

// `count` independent graphs with per-graph streams derived from base.seed;
// the result is identical whether or not OpenMP parallelism is enabled.
std::vector<BipartiteGraph> generate_batch(const BigraphParams& base, int count,
                                           bool parallel = true);

Fingerprint fingerprint(const BipartiteGraph& graph, std::int32_t user);

// Text edge-list format, bit-exact round-trip:
//   bigraph v1 n=<n> m=<m> mu=<mu> alpha=<alpha|inf> seed=<seed>
//   g <j> tau0=<tau_j(0)>          (one per group, 1-based j)
//   e <user> <group>               (one per edge, 1-based)
void save_edge_list(const BipartiteGraph& graph, std::ostream& out);
void save_edge_list(const BipartiteGraph& graph, const std::string& path);
BipartiteGraph load_edge_list(std::istream& in);
BipartiteGraph load_edge_list(const std::string& path);

}  // namespace popnet
