#pragma once

#include <cstdint>

namespace popnet {

// Partial zeta sum zeta(m, s) = sum_{i=1..m} i^{-s}. Any real s is accepted
// (s <= 0 shows up in moment formulas such as zeta(m, alpha-2)).
double partial_zeta(std::int64_t m, double s);

// Binary entropy in nats, with the 0*ln(0) == 0 convention.
double binary_entropy(double p);

// Binary Kullback-Leibler divergence D_b(p || q) in nats.
double binary_kl(double p, double q);

// a*b = a(1-b) + b(1-a), the crossover probability of cascaded binary
// symmetric noise.
double binary_convolution(double a, double b);

// Binary conditional law P(Y|R), rows over R in {0,1}.
struct ChannelSpec {
  double p_y1_given_r1 = 1.0;
  double p_y1_given_r0 = 0.0;

  static ChannelSpec bsc(double crossover);
  static ChannelSpec noiseless() { return ChannelSpec{1.0, 0.0}; }

  double p_y_given_r(bool y, bool r) const {
    double p1 = r ? p_y1_given_r1 : p_y1_given_r0;
    return y ? p1 : 1.0 - p1;
  }

  void validate() const;

  friend bool operator==(const ChannelSpec&, const ChannelSpec&) = default;
};

// I(Y; E0) in nats for E0 ~ Bernoulli(d/m) pushed through the channel.
double bernoulli_channel_mi(std::int64_t d, std::int64_t m,
                            const ChannelSpec& channel);

}  // namespace popnet
