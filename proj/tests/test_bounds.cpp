#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "popnet/bounds.hpp"
#include "popnet/numerics.hpp"

using namespace popnet;
namespace bd = popnet::bounds;

namespace {

BigraphParams make_params(std::int64_t n, std::int64_t m, std::int64_t mu, double alpha) {
  BigraphParams p;
  p.n = n;
  p.m = m;
  p.mu = mu;
  p.alpha = alpha;
  return p;
}

bd::BoundInputs small_inputs(double nq, double epsilon = 0.01, double c_prime = 1.0) {
  bd::BoundInputs in;
  in.params = make_params(1000, 100, 5, 3.0);
  in.channels = {QueryChannel{ChannelSpec::bsc(nq), 0}};
  in.p_theta = {1.0};
  in.epsilon = epsilon;
  in.h_m_nats = std::log(100.0);
  in.c_prime = c_prime;
  return in;
}

// Independent exhaustive-scan oracle: recompute every condition by direct
// summation (descending accumulation, matching the implementation's order so
// integer outputs agree exactly).
struct OracleOut {
  bool feasible = false;
  std::int64_t d_star = 0;
  std::int64_t i_star = 0;
  double q_bar = 0;
};

OracleOut theorem2_oracle(const bd::BoundInputs& in) {
  OracleOut out;
  const std::int64_t m = in.params.m;
  const double zeta = partial_zeta(m, in.params.alpha);
  auto en = [&](std::int64_t d) {
    return static_cast<double>(in.params.n) /
           (zeta * std::pow(static_cast<double>(d), in.params.alpha));
  };
  const double imax = bd::i_max(in.channels, m);
  const double psi = in.h_m_nats + std::log(1.0 / in.epsilon) + imax;
  auto mass_from = [&](std::int64_t lo) {
    double s = 0.0;
    for (std::int64_t d = m; d >= lo; --d)
      s += en(d) * bernoulli_channel_mi(d, m, in.channels[0].spec);
    return s;
  };
  std::int64_t dstar = 0;
  for (std::int64_t d = m; d >= 1; --d) {
    if (psi <= in.c_prime * mass_from(std::max<std::int64_t>(d - 1, 1))) {
      dstar = d;
      break;
    }
  }
  if (dstar == 0) return out;
  out.feasible = true;
  out.d_star = dstar;
  const double base = mass_from(dstar);
  const double rate =
      dstar >= 2 ? bernoulli_channel_mi(dstar - 1, m, in.channels[0].spec) : 0.0;
  std::int64_t i = 0;
  while (psi > in.c_prime * (base + static_cast<double>(i) * rate)) ++i;
  out.i_star = i;
  double groups = 0.0;
  for (std::int64_t d = m; d >= dstar; --d) groups += en(d);
  out.q_bar = groups + static_cast<double>(i);
  return out;
}

}  // namespace

TEST_CASE("psi: direct evaluation and monotonicity") {
  CHECK(std::abs(bd::psi(std::log(100.0), 0.01, 2.0) -
                 (std::log(100.0) + std::log(100.0) + 2.0)) <= 1e-12);
  CHECK(bd::psi(0.0, 1.0, 0.0) == 0.0);
  double prev = -1.0;
  for (double eps : {0.5, 0.1, 0.01, 0.001}) {
    const double v = bd::psi(1.0, eps, 0.5);
    CHECK(v > prev);
    prev = v;
  }
  CHECK_THROWS_AS((void)bd::psi(-1.0, 0.1, 0.0), SimError);
}

TEST_CASE("i_max: degenerate and standard channels") {
  std::vector<QueryChannel> coin{QueryChannel{ChannelSpec::bsc(0.5), 0}};
  CHECK(bd::i_max(coin, 100) == 0.0);

  // Single group with d/m = 1/2, noiseless: ln 2.
  std::vector<QueryChannel> clean{QueryChannel{ChannelSpec::noiseless(), 0}};
  std::vector<std::int32_t> degrees{1};
  CHECK(std::abs(bd::i_max(clean, degrees, 2) - std::log(2.0)) <= 1e-12);

  // BSC(0.05) at d/m = 0.1: max of the four log-ratios = ln(0.95/0.14).
  std::vector<QueryChannel> bsc{QueryChannel{ChannelSpec::bsc(0.05), 0}};
  std::vector<std::int32_t> d10{1};
  CHECK(std::abs(bd::i_max(bsc, d10, 10) - std::log(0.95 / 0.14)) <= 1e-12);
  CHECK(std::abs(bd::i_max(bsc, d10, 10) - 1.9148195619852822) <= 1e-12);

  // Noiseless with a full group present: infinite (vacuous bound).
  std::vector<std::int32_t> full{2};
  CHECK(std::isinf(bd::i_max(clean, full, 2)));
  CHECK(std::isinf(bd::i_max(clean, 10)));  // params mode includes d = m
}

TEST_CASE("theorem2_bounds: BSC(0.5) is infeasible") {
  auto result = bd::theorem2_bounds(small_inputs(0.5));
  CHECK(!result.feasible);
  CHECK(result.p_e_bound == 0.01);
  CHECK(result.i_max == 0.0);
}

TEST_CASE("theorem2_bounds: matches the exhaustive-scan oracle exactly") {
  for (double nq : {0.05, 0.1, 0.2}) {
    for (double eps : {0.01, 0.001}) {
      auto in = small_inputs(nq, eps);
      auto result = bd::theorem2_bounds(in);
      auto oracle = theorem2_oracle(in);
      REQUIRE(result.feasible == oracle.feasible);
      if (!oracle.feasible) continue;
      CHECK(result.d_star.size() == 1);
      CHECK(result.d_star[0] == oracle.d_star);
      CHECK(result.i_star == oracle.i_star);
      CHECK(result.q_bar_bound == doctest::Approx(oracle.q_bar).epsilon(1e-12));
      CHECK(result.p_e_bound == eps / in.c_prime);
    }
  }
}

TEST_CASE("theorem2_bounds: returned d* and i* re-satisfy their inequalities") {
  auto in = small_inputs(0.05);
  auto result = bd::theorem2_bounds(in);
  REQUIRE(result.feasible);
  const std::int64_t m = in.params.m;
  const double zeta = partial_zeta(m, in.params.alpha);
  auto en = [&](std::int64_t d) {
    return static_cast<double>(in.params.n) /
           (zeta * std::pow(static_cast<double>(d), in.params.alpha));
  };
  auto mass_from = [&](std::int64_t lo) {
    double s = 0.0;
    for (std::int64_t d = m; d >= lo; --d)
      s += en(d) * bernoulli_channel_mi(d, m, in.channels[0].spec);
    return s;
  };
  const std::int64_t ds = result.d_star[0];
  // d* satisfies; d*+1 violates (maximality).
  CHECK(result.psi <= in.c_prime * mass_from(std::max<std::int64_t>(ds - 1, 1)));
  if (ds < m) CHECK(result.psi > in.c_prime * mass_from(ds));
  // i* satisfies; i*-1 violates (minimality).
  const double base = mass_from(ds);
  const double rate = ds >= 2 ? bernoulli_channel_mi(ds - 1, m, in.channels[0].spec) : 0.0;
  CHECK(result.psi <= in.c_prime * (base + static_cast<double>(result.i_star) * rate));
  if (result.i_star > 0)
    CHECK(result.psi > in.c_prime * (base + static_cast<double>(result.i_star - 1) * rate));
}

TEST_CASE("theorem2_bounds: nonincreasing in channel quality") {
  auto r1 = bd::theorem2_bounds(small_inputs(0.02));
  auto r2 = bd::theorem2_bounds(small_inputs(0.05));
  auto r3 = bd::theorem2_bounds(small_inputs(0.10));
  REQUIRE(r1.feasible);
  REQUIRE(r2.feasible);
  if (r2.feasible) CHECK(r1.q_bar_bound <= r2.q_bar_bound);
  if (r3.feasible) CHECK(r2.q_bar_bound <= r3.q_bar_bound);
}

TEST_CASE("corollary1_bound: infeasible cases and p_e scaling") {
  auto p = make_params(1000, 100, 5, 3.0);
  auto r = bd::corollary1_bound(p, 0.5, 0.01, 1.0, 1.0, std::log(100.0));
  CHECK(!r.feasible);
  CHECK(r.p_e_bound == 0.01);

  auto r2 = bd::corollary1_bound(p, 0.05, 0.01, 1.0, 4.0, std::log(100.0));
  CHECK(r2.p_e_bound == 0.01 / 4.0);
  CHECK_THROWS_AS((void)bd::corollary1_bound(p, 0.7, 0.01, 1.0, 1.0, 0.0), SimError);
}

TEST_CASE("corollary1_bound: matches the direct formula chain") {
  const auto p = make_params(1000, 100, 5, 3.0);
  for (double c : {1.0, 5.0, 20.0}) {
    auto r = bd::corollary1_bound(p, 0.05, 0.01, c, 1.0, std::log(100.0));

    // Independent re-evaluation of the closed-form chain.
    const double zeta = partial_zeta(100, 3.0);
    std::vector<QueryChannel> chs{QueryChannel{ChannelSpec::bsc(0.05), 0}};
    const double psi = std::log(100.0) + std::log(1.0 / 0.01) + bd::i_max(chs, 100);
    std::int64_t dstar = 0;
    for (std::int64_t d = 100; d >= 3; --d) {
      const double info =
          binary_entropy(binary_convolution(static_cast<double>(d) / 100.0, 0.05)) -
          binary_entropy(0.05);
      const double mass = c * 1000.0 / (2.0 * zeta * std::pow(static_cast<double>(d), 2.0));
      if (psi <= mass * info) {
        dstar = d;
        break;
      }
    }
    CHECK(r.feasible == (dstar != 0));
    if (dstar != 0) {
      CHECK(r.d_star == dstar);
      const double expected =
          c * 1000.0 / (2.0 * zeta * std::pow(static_cast<double>(dstar - 2), 2.0));
      CHECK(r.q_bar_bound == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("theorem2 and corollary1 are order-of-magnitude consistent") {
  auto in = small_inputs(0.05);
  auto thm = bd::theorem2_bounds(in);
  auto cor = bd::corollary1_bound(in.params, 0.05, 0.01, 20.0, 1.0, std::log(100.0));
  REQUIRE(thm.feasible);
  REQUIRE(cor.feasible);
  const double ratio = thm.q_bar_bound / cor.q_bar_bound;
  CHECK(ratio > 0.0);
  CHECK(std::isfinite(ratio));
}

TEST_CASE("bound result serialization carries the intermediates") {
  auto result = bd::theorem2_bounds(small_inputs(0.05));
  std::ostringstream os;
  bd::write_result(os, result);
  const std::string text = os.str();
  CHECK(text.find("psi = ") != std::string::npos);
  CHECK(text.find("i_max = ") != std::string::npos);
  CHECK(text.find("d_star_theta0 = ") != std::string::npos);
  CHECK(text.find("i_star = ") != std::string::npos);
  CHECK(text.find("q_bar_bound = ") != std::string::npos);
}

TEST_CASE("theorem2_bounds rejects infinite alpha and bad inputs") {
  auto in = small_inputs(0.05);
  in.params.alpha = kInfiniteAlpha;
  CHECK_THROWS_AS((void)bd::theorem2_bounds(in), SimError);
  auto in2 = small_inputs(0.05);
  in2.p_theta.clear();
  CHECK_THROWS_AS((void)bd::theorem2_bounds(in2), SimError);
}
