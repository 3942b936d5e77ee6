#include "cardsim/policy_params.hpp"

#include <cmath>
#include <stdexcept>

namespace cardsim {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

// Size m with E[S 1(S < m)] = fraction * E[S]. fraction in [0, 1].
double threshold_at_load_fraction(const JobSizeModel& model, double fraction) {
  return model.solve_size_threshold(fraction);
}

void check_rho_epsilon(double rho, double epsilon) {
  require(rho > 0.0 && rho < 1.0, "utilization must lie in (0, 1)");
  require(std::abs((1.0 - rho) - epsilon) <= 1e-9,
          "epsilon must equal 1 - rho");
}

}  // namespace

CardThresholds card_params_from_alpha_beta(int n, double lambda,
                                           const JobSizeModel& model,
                                           double alpha, double beta) {
  require(n >= 2, "need n >= 2");
  require(lambda > 0.0, "arrival rate must be positive");
  require(alpha > 0.0 && alpha <= 1.0 / n, "need 0 < alpha <= 1/n");
  require(beta > 0.0, "need beta > 0");
  double mean = model.mean();
  // Target truncated means, then their fractions of E[S].
  double t_minus = (n - 1) * (1.0 / n - alpha) / lambda;
  double t_plus = (n - 1) * (1.0 / n + beta) / lambda;
  double f_minus = t_minus / mean;
  double f_plus = t_plus / mean;
  require(f_minus >= 0.0 && f_minus < 1.0,
          "alpha puts the small-band load outside [0, 1)");
  require(f_plus < 1.0, "beta puts the small+medium load outside [0, 1)");
  return {threshold_at_load_fraction(model, f_minus),
          threshold_at_load_fraction(model, f_plus)};
}

double card_threshold_c(int n, double m_plus, double beta, double delta) {
  require(n >= 2, "need n >= 2");
  require(std::isfinite(m_plus) && m_plus > 0.0, "need m_plus > 0");
  require(beta > 0.0, "need beta > 0");
  require(delta > 0.0, "need delta > 0");
  double arg = (n + 1.0) / (n * beta * delta);
  require(arg > 1.0, "idleness target too loose: the log term is not positive");
  return n * (n - 1.0) * m_plus / beta * std::log(arg);
}

double practical_gamma(const JobSizeModel& model) {
  double cv = model.cv();
  if (std::abs(cv - 1.0) <= 1e-3) return 0.3;
  if (std::abs(cv - 10.0) <= 1e-2) return 0.6;
  if (std::abs(cv - 100.0) <= 1e-1) return 2.5;
  throw std::invalid_argument(
      "no tuned work-cap constant for this cv: pass gamma explicitly");
}

CardConfig card_params_practical(double rho, double epsilon,
                                 const JobSizeModel& model, double alpha_prime,
                                 double beta_prime, std::optional<double> gamma,
                                 bool flexible,
                                 ShortSelection short_selection) {
  check_rho_epsilon(rho, epsilon);
  require(alpha_prime > 0.0 && alpha_prime < 0.5, "need 0 < alpha' < 1/2");
  require(beta_prime > 0.0 && beta_prime < 0.5, "need 0 < beta' < 1/2");
  double g = gamma ? *gamma : practical_gamma(model);
  require(g > 0.0, "need gamma > 0");
  double m_minus = threshold_at_load_fraction(model, 0.5 - alpha_prime);
  double m_plus = threshold_at_load_fraction(model, 0.5 + beta_prime);
  double c = g / std::sqrt(epsilon) * std::log(1.0 / epsilon);
  return CardConfig::create(2, m_minus, m_plus, c, flexible, short_selection,
                            /*relax=*/true);
}

MultiBandConfig multiband_config(int n, double rho, double epsilon,
                                 const JobSizeModel& model, bool flexible) {
  require(n >= 2, "need n >= 2");
  check_rho_epsilon(rho, epsilon);
  std::vector<double> cutoffs(n);
  for (int i = 1; i <= n; ++i) {
    double f = 1.0 / (2.0 * n) + (i - 1.0) / n;
    cutoffs[i - 1] = threshold_at_load_fraction(model, f);
  }
  std::vector<double> thresholds(n - 1);
  for (int i = 0; i + 1 < n; ++i) thresholds[i] = cutoffs[i] / std::sqrt(epsilon);
  return MultiBandConfig::create(n, std::move(cutoffs), std::move(thresholds),
                                 flexible);
}

DiceConfig dice_thresholds(int n, double epsilon, const JobSizeModel& model,
                           std::optional<double> eta_override) {
  require(n >= 2, "need n >= 2");
  require(epsilon > 0.0 && epsilon < 1.0, "need 0 < epsilon < 1");
  double scale = std::pow(epsilon, -1.0 / 3.0);
  if (n == 2) {
    double eta;
    if (eta_override) {
      eta = *eta_override;
      require(eta > 0.0, "need eta > 0");
    } else {
      double cv = model.cv();
      if (std::abs(cv - 1.0) <= 1e-3) {
        eta = 1.8;
      } else if (std::abs(cv - 10.0) <= 1e-2) {
        eta = 5.2;
      } else if (std::abs(cv - 100.0) <= 1e-1) {
        eta = 20.0;
      } else {
        throw std::invalid_argument(
            "no tuned gap constant for this cv: pass eta explicitly");
      }
    }
    return DiceConfig::create(2, {eta * scale});
  }
  // Many servers: reuse the multiband cutoffs as the gap scale.
  std::vector<double> tau(n - 1);
  for (int i = 1; i < n; ++i) {
    double f = 1.0 / (2.0 * n) + (i - 1.0) / n;
    tau[i - 1] = 2.0 * threshold_at_load_fraction(model, f) * scale;
  }
  return DiceConfig::create(n, std::move(tau));
}

SitaConfig sita_equal_load(int n, const JobSizeModel& model) {
  require(n >= 2, "need n >= 2");
  std::vector<double> cutoffs(n - 1);
  for (int i = 1; i < n; ++i)
    cutoffs[i - 1] = threshold_at_load_fraction(model, double(i) / n);
  return SitaConfig::create(n, std::move(cutoffs));
}

}  // namespace cardsim
