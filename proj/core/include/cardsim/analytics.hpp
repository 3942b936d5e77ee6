#pragma once

#include "cardsim/distribution.hpp"

namespace cardsim {

// Mean work in the resource-pooled single queue: lambda E[S^2] / (2 eps)
// with eps = 1 - lambda E[S]. Requires eps > 0.
double mg1_mean_work(double lambda, const JobSizeModel& model);

// Heavy-traffic constant of the dispatching problem: n P{S >= m} at the
// size m splitting off a 1 - 1/n load fraction of the smallest jobs.
double k_card(int n, const JobSizeModel& model);

// Universal floor on mean response time at arrival rate lambda:
//   k_card E[W_pooled] - (n-1) E[S^2] / (2m) + n E[S].
// May be negative at light load; returned unclamped.
double lower_bound_mean_response(int n, double lambda, const JobSizeModel& model);

// Exact two-server mean response time under the equal-load size split:
//   2 lambda / eps (P{S<m} E[S^2 1(S<m)] + P{S>=m} E[S^2 1(S>=m)]) + 2 E[S].
double sita_e_mean_response(double lambda, const JobSizeModel& model);

// Heavy-traffic constants of the benchmark dispatchers, two servers.
// k_sita_e is the limit of sita_e_mean_response / mg1_mean_work; k_sita_o
// additionally optimizes the O(eps) load shaving between the two bands.
double k_sita_e(const JobSizeModel& model, int n = 2);
double k_sita_o(const JobSizeModel& model, int n = 2);
inline double k_lwl() { return 1.0; }

// Explicit two-server upper bound on CARD's mean response time:
//   (k_card + 4b/(a+b)) (1 + d/eps) E[W_pooled] + 2 E[S]
//     + 44 m_plus max{ b/(a^2 (a+b)),
//                      sqrt(b/(a^2 eps (a+b))),
//                      L/(b (a+b)),
//                      sqrt(L/b),
//                      sqrt(d) L/(a^2 b^2 eps) }   with L = ln(3/(2 b d)).
// Preconditions delta <= epsilon < 1/2 and beta >= 2 delta; violations
// raise an error naming the broken inequality.
double card_upper_bound_explicit(double alpha, double beta, double delta,
                                 double epsilon, double m_plus,
                                 const JobSizeModel& model, double lambda);

// Load-driven parameter schedule that attains the k_card constant in the
// eps -> 0 limit: alpha = 1/(4n) fixed, beta = eps^(1/3) (ln(1/eps))^(2/3)
// clipped to 0.9 of its feasibility ceiling rho/(n-1) - 1/n, delta = eps^3,
// c from the idleness formula. The thresholds for lambda = (1-eps)/E[S]
// ride along for convenience. Requires eps in (0, 1/n).
struct HeavyTrafficParams {
  double alpha;
  double beta;
  double delta;
  double c;
  double m_minus;
  double m_plus;
};
HeavyTrafficParams heavy_traffic_recipe(double epsilon, int n,
                                        const JobSizeModel& model);

}  // namespace cardsim
