#include "popnet/attack.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>

namespace popnet {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

const char* strategy_name(Strategy s) {
  return s == Strategy::kITS ? "its" : "aits";
}

std::optional<Strategy> parse_strategy(const std::string& name) {
  if (name == "its") return Strategy::kITS;
  if (name == "aits") return Strategy::kAITS;
  return std::nullopt;
}

ChannelAssignment::ChannelAssignment(std::vector<std::int32_t> user_to_theta,
                                     std::vector<QueryChannel> channels)
    : user_to_theta_(std::move(user_to_theta)), channels_(std::move(channels)) {
  if (channels_.empty()) fail(ErrorCode::kDomain, "ChannelAssignment: no channels");
  if (user_to_theta_.empty()) fail(ErrorCode::kDomain, "ChannelAssignment: no users");
  for (const auto& c : channels_) c.spec.validate();
  std::vector<std::int64_t> counts(channels_.size(), 0);
  for (std::int32_t t : user_to_theta_) {
    if (t < 0 || t >= static_cast<std::int32_t>(channels_.size()))
      fail(ErrorCode::kDomain, "ChannelAssignment: user mapped to unknown theta");
    counts[static_cast<std::size_t>(t)]++;
  }
  p_theta_.resize(channels_.size());
  for (std::size_t i = 0; i < channels_.size(); ++i)
    p_theta_[i] = static_cast<double>(counts[i]) / static_cast<double>(user_to_theta_.size());
}

ChannelAssignment ChannelAssignment::single(const ChannelSpec& spec, std::int64_t user_count) {
  if (user_count < 1) fail(ErrorCode::kDomain, "ChannelAssignment: need >= 1 user");
  return ChannelAssignment(std::vector<std::int32_t>(static_cast<std::size_t>(user_count), 0),
                           {QueryChannel{spec, 0}});
}

double ChannelAssignment::p_theta(int theta) const {
  if (theta < 0 || theta >= static_cast<int>(p_theta_.size()))
    fail(ErrorCode::kDomain, "p_theta: unknown theta");
  return p_theta_[static_cast<std::size_t>(theta)];
}

VictimModel::VictimModel(std::vector<double> pmf) : pmf_(std::move(pmf)) {
  if (pmf_.empty()) fail(ErrorCode::kDomain, "VictimModel: empty pmf");
  double sum = 0.0;
  for (double p : pmf_) {
    if (!(p >= 0.0)) fail(ErrorCode::kDomain, "VictimModel: negative mass");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) fail(ErrorCode::kDomain, "VictimModel: pmf does not sum to 1");
  cum_.resize(pmf_.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < pmf_.size(); ++i) {
    acc += pmf_[i];
    cum_[i] = acc;
  }
}

VictimModel VictimModel::uniform(std::int64_t user_count) {
  if (user_count < 1) fail(ErrorCode::kDomain, "VictimModel: need >= 1 user");
  return VictimModel(std::vector<double>(static_cast<std::size_t>(user_count),
                                         1.0 / static_cast<double>(user_count)));
}

std::int32_t VictimModel::sample(Rng& rng) const {
  const double u = rng.u01() * cum_.back();
  auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
  if (it == cum_.end()) --it;
  return static_cast<std::int32_t>(it - cum_.begin());
}

double VictimModel::entropy_nats() const {
  double h = 0.0;
  for (double p : pmf_)
    if (p > 0.0) h -= p * std::log(p);
  return h;
}

InformationState::InformationState(std::int64_t user_count)
    : value_(static_cast<std::size_t>(user_count), 0.0), survivors_(user_count) {}

double InformationState::info(std::int32_t user) const {
  const double v = value_[static_cast<std::size_t>(user)];
  return v == kNegInf ? kNegInf : v + shared_;
}

bool InformationState::eliminated(std::int32_t user) const {
  return value_[static_cast<std::size_t>(user)] == kNegInf;
}

void InformationState::eliminate(std::int32_t user) {
  auto& v = value_[static_cast<std::size_t>(user)];
  if (v != kNegInf) {
    v = kNegInf;
    survivors_--;
  }
}

std::vector<std::int32_t> query_order_aits(const BipartiteGraph& graph) {
  std::vector<std::int32_t> order(static_cast<std::size_t>(graph.group_count()));
  std::iota(order.begin(), order.end(), 0);
  auto degrees = graph.degrees();
  std::sort(order.begin(), order.end(), [&](std::int32_t a, std::int32_t b) {
    if (degrees[static_cast<std::size_t>(a)] != degrees[static_cast<std::size_t>(b)])
      return degrees[static_cast<std::size_t>(a)] > degrees[static_cast<std::size_t>(b)];
    return a < b;
  });
  return order;
}

std::vector<std::int32_t> query_order_its(const BipartiteGraph& graph) {
  std::vector<std::int32_t> order(static_cast<std::size_t>(graph.group_count()));
  std::iota(order.begin(), order.end(), 0);
  return order;
}

double marginal_response_prob(const BipartiteGraph& graph, std::int32_t group,
                              const QueryChannel& channel, MarginalMode mode) {
  if (group < 0 || group >= graph.group_count())
    fail(ErrorCode::kDomain, "marginal_response_prob: group out of range");
  const double d = static_cast<double>(graph.degree(group));
  if (mode == MarginalMode::kReciprocalDegree)
    return d > 0.0 ? 1.0 / d : 0.0;
  const double p1 = d / static_cast<double>(graph.user_count());
  return channel.spec.p_y1_given_r1 * p1 + channel.spec.p_y1_given_r0 * (1.0 - p1);
}

InformationState init_information(const VictimModel& victims) {
  InformationState state(victims.size());
  for (std::int64_t k = 0; k < victims.size(); ++k) {
    const double p = victims.prob(static_cast<std::int32_t>(k));
    if (p > 0.0)
      state.value_[static_cast<std::size_t>(k)] = std::log(p);
    else
      state.eliminate(static_cast<std::int32_t>(k));
  }
  return state;
}

void update_information(InformationState& state, const BipartiteGraph& graph,
                        std::int32_t group, int response, const QueryChannel& channel,
                        double q) {
  if (!(q > 0.0 && q < 1.0))
    fail(ErrorCode::kDegenerateMarginal, "update_information: marginal must lie in (0,1)");
  if (group < 0 || group >= graph.group_count())
    fail(ErrorCode::kDomain, "update_information: group out of range");
  if (state.user_count() != graph.user_count())
    fail(ErrorCode::kConsistency, "update_information: state/graph size mismatch");
  const bool y = response != 0;
  const double qy = y ? q : 1.0 - q;
  const double py1 = channel.spec.p_y_given_r(y, true);
  const double py0 = channel.spec.p_y_given_r(y, false);
  auto members = graph.group_members(group);

  if (py0 == 0.0) {
    // Response impossible for non-members: they are eliminated; members gain
    // their increment directly (the shared offset is untouched).
    const double inc1 = std::log(py1 / qy);
    std::vector<char> is_member(static_cast<std::size_t>(graph.user_count()), 0);
    for (std::int32_t u : members) is_member[static_cast<std::size_t>(u)] = 1;
    for (std::int64_t u = 0; u < graph.user_count(); ++u) {
      if (is_member[static_cast<std::size_t>(u)]) {
        auto& v = state.value_[static_cast<std::size_t>(u)];
        if (v != kNegInf) v += inc1;
      } else {
        state.eliminate(static_cast<std::int32_t>(u));
      }
    }
  } else if (py1 == 0.0) {
    // Response impossible for members.
    const double inc0 = std::log(py0 / qy);
    for (std::int32_t u : members) state.eliminate(u);
    state.shared_ += inc0;
  } else {
    const double inc0 = std::log(py0 / qy);
    const double inc1 = std::log(py1 / qy);
    state.shared_ += inc0;
    const double delta = inc1 - inc0;
    for (std::int32_t u : members) {
      auto& v = state.value_[static_cast<std::size_t>(u)];
      if (v != kNegInf) v += delta;
    }
  }
  state.t += 1;
}

std::optional<std::int32_t> identify(const InformationState& state, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    fail(ErrorCode::kDomain, "identify: epsilon must lie in (0,1)");
  const double threshold = std::log(1.0 / epsilon);
  std::int32_t hit = -1;
  int count = 0;
  for (std::int64_t k = 0; k < state.user_count(); ++k) {
    const double v = state.value_[static_cast<std::size_t>(k)];
    if (v == kNegInf) continue;
    if (v + state.shared_ > threshold) {
      if (++count > 1) return std::nullopt;
      hit = static_cast<std::int32_t>(k);
    }
  }
  if (count == 1) return hit;
  return std::nullopt;
}

AttackOutcome run_attack(const BipartiteGraph& graph, const ChannelAssignment& channels,
                         const VictimModel& victims, Strategy strategy, double epsilon,
                         Rng& rng, const AttackOptions& options) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    fail(ErrorCode::kDomain, "run_attack: epsilon must lie in (0,1)");
  if (victims.size() != graph.user_count() || channels.user_count() != graph.user_count())
    fail(ErrorCode::kConsistency, "run_attack: victim/channel model size mismatch");

  AttackOutcome outcome;
  outcome.victim = options.forced_victim ? *options.forced_victim : victims.sample(rng);
  if (outcome.victim < 0 || outcome.victim >= graph.user_count())
    fail(ErrorCode::kDomain, "run_attack: victim out of range");
  // The attacker knows the victim's hardware/software class theta(M).
  const QueryChannel& channel = channels.channel_for(outcome.victim);

  const std::vector<std::int32_t> order =
      strategy == Strategy::kAITS ? query_order_aits(graph) : query_order_its(graph);

  InformationState state = init_information(victims);
  state.threshold = std::log(1.0 / epsilon);

  for (std::int32_t j : order) {
    const double q = marginal_response_prob(graph, j, channel, options.marginal_mode);
    const bool bit = graph.has_edge(outcome.victim, j);
    const bool y = rng.bernoulli(channel.spec.p_y_given_r(true, bit));
    if (q > 0.0 && q < 1.0) {
      update_information(state, graph, j, y ? 1 : 0, channel, q);
    } else {
      // Degenerate marginal: the realized increment is 0 for every user, so
      // the query is counted but carries no information.
      state.t += 1;
    }
    if (options.record_trace) {
      TraceEntry e;
      e.t = state.t;
      e.group = j;
      e.degree = graph.degree(j);
      e.response = y ? 1 : 0;
      e.survivors = state.survivors();
      double best = kNegInf;
      std::int32_t best_user = -1;
      for (std::int64_t k = 0; k < state.user_count(); ++k) {
        const double v = state.info(static_cast<std::int32_t>(k));
        if (v > best) {
          best = v;
          best_user = static_cast<std::int32_t>(k);
        }
      }
      e.top_user = best_user;
      e.top_info = best;
      outcome.trace.push_back(e);
    }
    if (auto id = identify(state, epsilon)) {
      outcome.resolved = true;
      outcome.identified_user = *id;
      outcome.correct = (*id == outcome.victim);
      outcome.queries_used = state.t;
      return outcome;
    }
  }
  outcome.resolved = false;
  outcome.queries_used = state.t;
  return outcome;
}

void write_trace(std::ostream& out, const AttackOutcome& outcome) {
  char buf[160];
  for (const auto& e : outcome.trace) {
    std::snprintf(buf, sizeof(buf), "q %d group=%d degree=%d y=%d survivors=%lld top=%d:%.6g\n",
                  e.t, e.group + 1, e.degree, e.response,
                  static_cast<long long>(e.survivors), e.top_user + 1, e.top_info);
    out << buf;
  }
}

}  // namespace popnet
