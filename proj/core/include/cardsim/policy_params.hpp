#pragma once

#include <optional>

#include "cardsim/distribution.hpp"
#include "cardsim/policy.hpp"

namespace cardsim {

struct CardThresholds {
  double m_minus;
  double m_plus;
};

// Inverts the drift targets: with per-class loads
//   rho_s = lambda E[S 1(S < m_minus)],  rho_m likewise for the medium band,
// alpha = 1/n - rho_s/(n-1) and beta = (rho_s + rho_m)/(n-1) - 1/n.
// Requires 0 < alpha <= 1/n and beta > 0, and the implied load fractions
// must stay inside [0, 1).
CardThresholds card_params_from_alpha_beta(int n, double lambda,
                                           const JobSizeModel& model,
                                           double alpha, double beta);

// Work cap that keeps the short-server idleness below delta:
//   c = n(n-1) m_plus / beta * ln((n+1) / (n beta delta)).
// The log argument must exceed 1.
double card_threshold_c(int n, double m_plus, double beta, double delta);

// Work-cap scale constant for the load-tuned recipe, keyed by the model's
// coefficient of variation: 0.3, 0.6, 2.5 for cv = 1, 10, 100. Other cv
// values have no tuned constant and raise an error.
double practical_gamma(const JobSizeModel& model);

// Two-server load-tuned parameters. The short server takes the smallest
// jobs carrying fraction 1/2 - alpha_prime of the load, the long server the
// largest jobs carrying 1/2 - beta_prime, and c = gamma / sqrt(epsilon) *
// ln(1/epsilon). Omitting gamma selects practical_gamma(model). The
// resulting config relaxes c >= m_plus.
CardConfig card_params_practical(double rho, double epsilon,
                                 const JobSizeModel& model,
                                 double alpha_prime = 0.15,
                                 double beta_prime = 0.15,
                                 std::optional<double> gamma = std::nullopt,
                                 bool flexible = true,
                                 ShortSelection short_selection =
                                     ShortSelection::uniform_random);

// n-band config: cutoffs at cumulative load fractions
// 1/(2n), 1/(2n) + 1/n, ..., 1 - 1/(2n); thresholds c_i = m_i / sqrt(epsilon).
MultiBandConfig multiband_config(int n, double rho, double epsilon,
                                 const JobSizeModel& model, bool flexible);

// Load-dependent gaps. Two servers: tau = eta * epsilon^(-1/3) with eta
// keyed by the model's cv (1 -> 1.8, 10 -> 5.2, 100 -> 20); other cv values
// need an explicit eta. More servers: tau_i = 2 m_i epsilon^(-1/3) with m_i
// the multiband cutoffs.
DiceConfig dice_thresholds(int n, double epsilon, const JobSizeModel& model,
                           std::optional<double> eta_override = std::nullopt);

// Equal-load size-interval split: cutoff i at load fraction i/n.
SitaConfig sita_equal_load(int n, const JobSizeModel& model);

}  // namespace cardsim
