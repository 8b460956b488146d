#include "popnet/bounds.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>

#include "popnet/numerics.hpp"

namespace popnet::bounds {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// max over y of ln(P(y|r)/q_y) contributions for one (channel, marginal) pair;
// +inf when a positive numerator meets a zero output marginal.
double max_ratio(const ChannelSpec& spec, double q1) {
  double best = -kInf;
  for (int r = 0; r <= 1; ++r) {
    for (int y = 0; y <= 1; ++y) {
      const double pyr = spec.p_y_given_r(y != 0, r != 0);
      if (pyr == 0.0) continue;
      const double qy = y ? q1 : 1.0 - q1;
      if (qy == 0.0) return kInf;
      best = std::max(best, std::log(pyr / qy));
    }
  }
  return best;
}

}  // namespace

double psi(double h_m_nats, double epsilon, double i_max) {
  if (!(epsilon > 0.0 && epsilon <= 1.0))
    fail(ErrorCode::kDomain, "psi: epsilon must lie in (0,1]");
  if (h_m_nats < 0.0) fail(ErrorCode::kDomain, "psi: H(M) must be nonnegative");
  return h_m_nats + std::log(1.0 / epsilon) + i_max;
}

double i_max(std::span<const QueryChannel> channels, std::span<const std::int32_t> degrees,
             std::int64_t m) {
  if (channels.empty()) fail(ErrorCode::kDomain, "i_max: no channels");
  if (m < 1) fail(ErrorCode::kDomain, "i_max: m must be >= 1");
  double best = 0.0;
  for (const auto& ch : channels) {
    ch.spec.validate();
    for (std::int32_t d : degrees) {
      const double p1 = static_cast<double>(d) / static_cast<double>(m);
      const double q1 = ch.spec.p_y1_given_r1 * p1 + ch.spec.p_y1_given_r0 * (1.0 - p1);
      const double r = max_ratio(ch.spec, q1);
      if (r == kInf) return kInf;
      best = std::max(best, r);
    }
  }
  return best;
}

double i_max(std::span<const QueryChannel> channels, std::int64_t m) {
  std::vector<std::int32_t> all(static_cast<std::size_t>(m));
  for (std::int64_t d = 1; d <= m; ++d) all[static_cast<std::size_t>(d - 1)] = static_cast<std::int32_t>(d);
  return i_max(channels, all, m);
}

BoundResult theorem2_bounds(const BoundInputs& inputs) {
  const BigraphParams& p = inputs.params;
  p.validate();
  if (std::isinf(p.alpha))
    fail(ErrorCode::kDomain, "theorem2_bounds: requires finite alpha > 2");
  if (inputs.channels.empty() || inputs.channels.size() != inputs.p_theta.size())
    fail(ErrorCode::kDomain, "theorem2_bounds: channels/p_theta size mismatch");
  if (!(inputs.epsilon > 0.0 && inputs.epsilon < 1.0))
    fail(ErrorCode::kDomain, "theorem2_bounds: epsilon must lie in (0,1)");
  if (inputs.c_prime <= 0.0) fail(ErrorCode::kDomain, "theorem2_bounds: c_prime must be > 0");

  const std::int64_t m = p.m;
  const std::size_t thetas = inputs.channels.size();

  BoundResult result;
  result.c_prime = inputs.c_prime;
  result.c_thm1 = inputs.c_thm1;
  result.i_max = i_max(inputs.channels, m);
  result.psi = psi(inputs.h_m_nats, inputs.epsilon, result.i_max);
  result.p_e_bound = inputs.epsilon / inputs.c_prime;
  if (!std::isfinite(result.psi)) return result;  // vacuous bound

  // Idealized expected group counts E(N_d) = n / (zeta(m,alpha) d^alpha).
  const double zeta = partial_zeta(m, p.alpha);
  std::vector<double> en(static_cast<std::size_t>(m) + 1, 0.0);
  for (std::int64_t d = 1; d <= m; ++d)
    en[static_cast<std::size_t>(d)] = static_cast<double>(p.n) /
                                      (zeta * std::pow(static_cast<double>(d), p.alpha));

  // Per-theta suffix sums S_theta(x) = sum_{d'=x..m} E(N_d') I_{d',theta},
  // accumulated from d = m downward.
  std::vector<std::vector<double>> mi(thetas, std::vector<double>(static_cast<std::size_t>(m) + 1, 0.0));
  std::vector<std::vector<double>> suffix(thetas,
                                          std::vector<double>(static_cast<std::size_t>(m) + 2, 0.0));
  for (std::size_t t = 0; t < thetas; ++t) {
    for (std::int64_t d = 1; d <= m; ++d)
      mi[t][static_cast<std::size_t>(d)] = bernoulli_channel_mi(d, m, inputs.channels[t].spec);
    for (std::int64_t d = m; d >= 1; --d)
      suffix[t][static_cast<std::size_t>(d)] = suffix[t][static_cast<std::size_t>(d) + 1] +
                                               en[static_cast<std::size_t>(d)] *
                                                   mi[t][static_cast<std::size_t>(d)];
  }
  std::vector<double> en_suffix(static_cast<std::size_t>(m) + 2, 0.0);
  for (std::int64_t d = m; d >= 1; --d)
    en_suffix[static_cast<std::size_t>(d)] =
        en_suffix[static_cast<std::size_t>(d) + 1] + en[static_cast<std::size_t>(d)];

  // d*_theta: largest d in [m] whose information mass over d' >= d-1 still
  // covers psi (descending exhaustive scan).
  result.d_star.assign(thetas, 0);
  for (std::size_t t = 0; t < thetas; ++t) {
    std::int64_t found = 0;
    for (std::int64_t d = m; d >= 1; --d) {
      const std::int64_t from = std::max<std::int64_t>(d - 1, 1);
      if (result.psi <= inputs.c_prime * suffix[t][static_cast<std::size_t>(from)]) {
        found = d;
        break;
      }
    }
    if (found == 0) return result;  // infeasible for this theta
    result.d_star[static_cast<std::size_t>(t)] = found;
  }

  // i*: smallest integer i >= 0 with
  // psi <= c' sum_theta P(theta) [S_theta(d*_theta) + i I_{d*_theta - 1, theta}].
  double base = 0.0, rate = 0.0;
  for (std::size_t t = 0; t < thetas; ++t) {
    const std::int64_t ds = result.d_star[t];
    base += inputs.p_theta[t] * suffix[t][static_cast<std::size_t>(ds)];
    const std::int64_t prev = ds - 1;
    const double mi_prev = prev >= 1 ? mi[t][static_cast<std::size_t>(prev)] : 0.0;
    rate += inputs.p_theta[t] * mi_prev;
  }
  std::int64_t i = 0;
  while (result.psi > inputs.c_prime * (base + static_cast<double>(i) * rate)) {
    if (rate <= 0.0) return result;  // cannot close the gap: infeasible
    ++i;
  }
  result.i_star = i;
  result.feasible = true;

  // Range note from the bound's displayed constraint: i in [n/(zeta(m,alpha)(d*-1)^alpha)].
  double range_limit = kInf;
  for (std::size_t t = 0; t < thetas; ++t) {
    const std::int64_t prev = result.d_star[t] - 1;
    if (prev >= 1) range_limit = std::min(range_limit, en[static_cast<std::size_t>(prev)]);
  }
  result.i_star_exceeds_range = static_cast<double>(result.i_star) > range_limit;

  double q_bar = 0.0;
  for (std::size_t t = 0; t < thetas; ++t)
    q_bar += inputs.p_theta[t] * en_suffix[static_cast<std::size_t>(result.d_star[t])];
  result.q_bar_bound = q_bar + static_cast<double>(result.i_star);
  return result;
}

Corollary1Result corollary1_bound(const BigraphParams& params, double n_q, double epsilon,
                                  double c_thm1, double c_prime, double h_m_nats) {
  params.validate();
  if (std::isinf(params.alpha))
    fail(ErrorCode::kDomain, "corollary1_bound: requires finite alpha > 2");
  if (!(n_q >= 0.0 && n_q <= 0.5))
    fail(ErrorCode::kDomain, "corollary1_bound: n_q must lie in [0, 1/2]");
  if (!(epsilon > 0.0 && epsilon < 1.0))
    fail(ErrorCode::kDomain, "corollary1_bound: epsilon must lie in (0,1)");
  if (c_prime <= 0.0 || c_thm1 <= 0.0)
    fail(ErrorCode::kDomain, "corollary1_bound: constants must be > 0");

  const std::int64_t m = params.m;
  const double n = static_cast<double>(params.n);
  const double alpha = params.alpha;
  const double zeta = partial_zeta(m, alpha);
  const double hb_nq = binary_entropy(n_q);

  Corollary1Result result;
  result.c_prime = c_prime;
  result.c_thm1 = c_thm1;
  std::vector<QueryChannel> chs{QueryChannel{ChannelSpec::bsc(n_q), 0}};
  result.i_max = i_max(chs, m);
  result.psi = psi(h_m_nats, epsilon, result.i_max);
  result.p_e_bound = epsilon / c_prime;
  if (!std::isfinite(result.psi)) return result;

  for (std::int64_t d = m; d >= 3; --d) {
    const double info =
        binary_entropy(binary_convolution(static_cast<double>(d) / static_cast<double>(m), n_q)) -
        hb_nq;
    const double mass = c_prime * c_thm1 * n /
                        ((alpha - 1.0) * zeta * std::pow(static_cast<double>(d), alpha - 1.0));
    if (result.psi <= mass * info) {
      result.d_star = d;
      break;
    }
  }
  if (result.d_star == 0) return result;

  result.feasible = true;
  result.q_bar_bound =
      c_thm1 * n /
      ((alpha - 1.0) * zeta * std::pow(static_cast<double>(result.d_star - 2), alpha - 1.0));
  return result;
}

void write_result(std::ostream& out, const BoundResult& r) {
  out << "# bound holds up to the unspecified constants c, c_prime\n";
  out << "c_thm1 = " << fmt(r.c_thm1) << "\n";
  out << "c_prime = " << fmt(r.c_prime) << "\n";
  out << "feasible = " << (r.feasible ? "yes" : "no") << "\n";
  out << "psi = " << fmt(r.psi) << "\n";
  out << "i_max = " << fmt(r.i_max) << "\n";
  for (std::size_t t = 0; t < r.d_star.size(); ++t)
    out << "d_star_theta" << t << " = " << r.d_star[t] << "\n";
  out << "i_star = " << r.i_star << "\n";
  out << "i_star_exceeds_range = " << (r.i_star_exceeds_range ? "yes" : "no") << "\n";
  out << "q_bar_bound = " << fmt(r.q_bar_bound) << "\n";
  out << "p_e_bound = " << fmt(r.p_e_bound) << "\n";
}

void write_result(std::ostream& out, const Corollary1Result& r) {
  out << "# bound holds up to the unspecified constants c, c_prime\n";
  out << "c_thm1 = " << fmt(r.c_thm1) << "\n";
  out << "c_prime = " << fmt(r.c_prime) << "\n";
  out << "feasible = " << (r.feasible ? "yes" : "no") << "\n";
  out << "psi = " << fmt(r.psi) << "\n";
  out << "i_max = " << fmt(r.i_max) << "\n";
  out << "d_star = " << r.d_star << "\n";
  out << "q_bar_bound = " << fmt(r.q_bar_bound) << "\n";
  out << "p_e_bound = " << fmt(r.p_e_bound) << "\n";
}

}  // namespace popnet::bounds
