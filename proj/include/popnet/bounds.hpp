#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "popnet/attack.hpp"
#include "popnet/bigraph.hpp"

namespace popnet::bounds {

struct BoundInputs {
  BigraphParams params;
  std::vector<QueryChannel> channels;
  std::vector<double> p_theta;  // P_Theta, same length as channels
  double epsilon = 0.01;
  double h_m_nats = 0;   // victim entropy H(M)
  double c_prime = 1.0;  // correlation-decay constant (unquantified; default 1)
  double c_thm1 = 1.0;   // degree-law constant (unquantified; default 1)
};

struct BoundResult {
  bool feasible = false;
  double psi = 0;
  double i_max = 0;
  double c_prime = 1.0;  // echoed inputs; the bound holds up to these
  double c_thm1 = 1.0;   // unspecified constants
  std::vector<std::int64_t> d_star;  // per theta
  std::int64_t i_star = 0;
  bool i_star_exceeds_range = false;  // i* beyond n/(zeta(m,alpha)(d*-1)^alpha)
  double q_bar_bound = 0;
  double p_e_bound = 0;
};

struct Corollary1Result {
  bool feasible = false;
  double psi = 0;
  double i_max = 0;
  double c_prime = 1.0;
  double c_thm1 = 1.0;
  std::int64_t d_star = 0;
  double q_bar_bound = 0;
  double p_e_bound = 0;
};

// psi = H(M) + ln(1/epsilon) + i_max.
double psi(double h_m_nats, double epsilon, double i_max);

// Maximum per-query information increment max ln(P(y|r)/P_Y(y)) over
// responses, bits, channels, and the given degrees (group marginals under the
// d/m edge prior). +infinity when a zero output marginal meets a positive
// numerator (noiseless channel with a degree-0 or degree-m group).
double i_max(std::span<const QueryChannel> channels, std::span<const std::int32_t> degrees,
             std::int64_t m);
// Params-only variant: maximized over all d in [1, m].
double i_max(std::span<const QueryChannel> channels, std::int64_t m);

// Upper bounds on the A-ITS expected query count and error probability,
// with the idealized group counts E(N_d) = n/(zeta(m,alpha) d^alpha);
// d*_theta by exhaustive descending scan, i* by ascending scan.
BoundResult theorem2_bounds(const BoundInputs& inputs);

// Closed form of the bound for the BSC(n_q) specialization.
Corollary1Result corollary1_bound(const BigraphParams& params, double n_q, double epsilon,
                                  double c_thm1, double c_prime, double h_m_nats);

void write_result(std::ostream& out, const BoundResult& result);
void write_result(std::ostream& out, const Corollary1Result& result);

}  // namespace popnet::bounds
