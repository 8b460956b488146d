#include "popnet/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "popnet/errors.hpp"

namespace popnet {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDomain: return "DOMAIN_ERROR";
    case ErrorCode::kParse: return "PARSE_ERROR";
    case ErrorCode::kConsistency: return "CONSISTENCY_ERROR";
    case ErrorCode::kGenerationStalled: return "GENERATION_STALLED";
    case ErrorCode::kParamMismatch: return "PARAM_MISMATCH";
    case ErrorCode::kInsufficientSupport: return "INSUFFICIENT_SUPPORT";
    case ErrorCode::kEmptySupport: return "EMPTY_SUPPORT";
    case ErrorCode::kDegenerateMarginal: return "DEGENERATE_MARGINAL";
    case ErrorCode::kConfig: return "CONFIG_ERROR";
    case ErrorCode::kIo: return "IO_ERROR";
  }
  return "UNKNOWN_ERROR";
}

namespace {

void require_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0))
    fail(ErrorCode::kDomain, std::string(name) + " must lie in [0,1]");
}

}  // namespace

double partial_zeta(std::int64_t m, double s) {
  if (m < 1) fail(ErrorCode::kDomain, "partial_zeta: m must be >= 1");
  double sum = 0.0;
  for (std::int64_t i = 1; i <= m; ++i)
    sum += std::pow(static_cast<double>(i), -s);
  return sum;
}

double binary_entropy(double p) {
  require_probability(p, "binary_entropy: p");
  double h = 0.0;
  if (p > 0.0) h -= p * std::log(p);
  if (p < 1.0) h -= (1.0 - p) * std::log1p(-p);
  return h;
}

double binary_kl(double p, double q) {
  require_probability(p, "binary_kl: p");
  require_probability(q, "binary_kl: q");
  if ((q == 0.0 && p > 0.0) || (q == 1.0 && p < 1.0))
    fail(ErrorCode::kDomain, "binary_kl: divergence is infinite for this q");
  double d = 0.0;
  if (p > 0.0) d += p * std::log(p / q);
  if (p < 1.0) d += (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
  return std::max(0.0, d);
}

double binary_convolution(double a, double b) {
  require_probability(a, "binary_convolution: a");
  require_probability(b, "binary_convolution: b");
  return a * (1.0 - b) + b * (1.0 - a);
}

ChannelSpec ChannelSpec::bsc(double crossover) {
  require_probability(crossover, "bsc crossover");
  return ChannelSpec{1.0 - crossover, crossover};
}

void ChannelSpec::validate() const {
  require_probability(p_y1_given_r1, "P(Y=1|R=1)");
  require_probability(p_y1_given_r0, "P(Y=1|R=0)");
}

double bernoulli_channel_mi(std::int64_t d, std::int64_t m, const ChannelSpec& channel) {
  if (m < 1 || d < 0 || d > m)
    fail(ErrorCode::kDomain, "bernoulli_channel_mi: need 0 <= d <= m");
  channel.validate();
  const double p1 = static_cast<double>(d) / static_cast<double>(m);
  const double q1 = channel.p_y1_given_r1 * p1 + channel.p_y1_given_r0 * (1.0 - p1);
  double mi = 0.0;
  for (int r = 0; r <= 1; ++r) {
    const double pr = r ? p1 : 1.0 - p1;
    if (pr == 0.0) continue;
    for (int y = 0; y <= 1; ++y) {
      const double pyr = channel.p_y_given_r(y != 0, r != 0);
      if (pyr == 0.0) continue;
      const double qy = y ? q1 : 1.0 - q1;
      mi += pr * pyr * std::log(pyr / qy);
    }
  }
  return std::max(0.0, mi);
}

}  // namespace popnet
