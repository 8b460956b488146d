#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "popnet/bigraph.hpp"
#include "popnet/numerics.hpp"
#include "popnet/rng.hpp"

namespace popnet {

enum class Strategy { kITS, kAITS };

const char* strategy_name(Strategy s);
std::optional<Strategy> parse_strategy(const std::string& name);

// Noise law of one victim class theta.
struct QueryChannel {
  ChannelSpec spec;
  int theta = 0;

  friend bool operator==(const QueryChannel&, const QueryChannel&) = default;
};

// user -> theta map plus the per-theta channels; P_Theta(theta) is the
// fraction of users in class theta.
class ChannelAssignment {
 public:
  ChannelAssignment(std::vector<std::int32_t> user_to_theta,
                    std::vector<QueryChannel> channels);

  // |Theta| = 1: every user gets the same channel.
  static ChannelAssignment single(const ChannelSpec& spec, std::int64_t user_count);

  const QueryChannel& channel_for(std::int32_t user) const {
    return channels_[user_to_theta_[user]];
  }
  std::span<const QueryChannel> channels() const { return channels_; }
  double p_theta(int theta) const;
  std::int64_t user_count() const { return static_cast<std::int64_t>(user_to_theta_.size()); }

 private:
  std::vector<std::int32_t> user_to_theta_;
  std::vector<QueryChannel> channels_;
  std::vector<double> p_theta_;
};

// Prior P_M over victims.
class VictimModel {
 public:
  explicit VictimModel(std::vector<double> pmf);
  static VictimModel uniform(std::int64_t user_count);

  std::int32_t sample(Rng& rng) const;
  double prob(std::int32_t user) const { return pmf_[user]; }
  double entropy_nats() const;
  std::int64_t size() const { return static_cast<std::int64_t>(pmf_.size()); }

 private:
  std::vector<double> pmf_;
  std::vector<double> cum_;
};

// Per-user information values I_t(k). Eliminated users (zero likelihood) hold
// -infinity and never re-enter. Internally a shared offset absorbs the common
// per-query increment so an update touches only the queried group's members.
class InformationState {
 public:
  explicit InformationState(std::int64_t user_count);

  double info(std::int32_t user) const;
  bool eliminated(std::int32_t user) const;
  std::int64_t survivors() const { return survivors_; }
  std::int64_t user_count() const { return static_cast<std::int64_t>(value_.size()); }

  int t = 0;                 // queries made
  double threshold = 0;      // ln(1/epsilon), set by run_attack

  // Implementation hooks used by the update/identify operations.
  std::vector<double> value_;
  double shared_ = 0;
  std::int64_t survivors_ = 0;

  void eliminate(std::int32_t user);
};

enum class MarginalMode {
  kChannelOutput,     // P(Y=1) under the edge prior D_j/m (default)
  kReciprocalDegree,  // literal reciprocal-degree form 1/D(r_t) (compatibility mode)
};

struct TraceEntry {
  int t = 0;
  std::int32_t group = 0;
  std::int32_t degree = 0;
  int response = 0;
  std::int64_t survivors = 0;
  std::int32_t top_user = -1;
  double top_info = 0;
};

struct AttackOutcome {
  bool resolved = false;               // Identified vs Unresolved
  std::int32_t identified_user = -1;   // valid when resolved
  bool correct = false;                // defined only when resolved
  std::int64_t queries_used = 0;
  std::int32_t victim = -1;
  std::vector<TraceEntry> trace;       // filled when requested
};

struct AttackOptions {
  MarginalMode marginal_mode = MarginalMode::kChannelOutput;
  bool record_trace = false;
  std::optional<std::int32_t> forced_victim;  // bypass the P_M draw (tests/CLI)
};

// Groups sorted by degree descending, ties by ascending index.
std::vector<std::int32_t> query_order_aits(const BipartiteGraph& graph);
// Identity order; ITS is agnostic to the degree distribution.
std::vector<std::int32_t> query_order_its(const BipartiteGraph& graph);

// q = P(Y=1|R=1) d/m + P(Y=1|R=0) (1 - d/m).
double marginal_response_prob(const BipartiteGraph& graph, std::int32_t group,
                              const QueryChannel& channel,
                              MarginalMode mode = MarginalMode::kChannelOutput);

// I_0(k) = ln P_M(k); zero-prior users start eliminated.
InformationState init_information(const VictimModel& victims);

// One query update: every surviving user k gains
// ln(P(y | f_{k,group}) / P_Y(y)) with P_Y(1) = q. Zero likelihood eliminates.
void update_information(InformationState& state, const BipartiteGraph& graph,
                        std::int32_t group, int response, const QueryChannel& channel,
                        double q);

// Identified iff exactly one user's information value strictly exceeds
// ln(1/epsilon).
std::optional<std::int32_t> identify(const InformationState& state, double epsilon);

AttackOutcome run_attack(const BipartiteGraph& graph, const ChannelAssignment& channels,
                         const VictimModel& victims, Strategy strategy, double epsilon,
                         Rng& rng, const AttackOptions& options = {});

// One line per query:
//   q <t> group=<j> degree=<d> y=<bit> survivors=<count> top=<user>:<info>
void write_trace(std::ostream& out, const AttackOutcome& outcome);

}  // namespace popnet
