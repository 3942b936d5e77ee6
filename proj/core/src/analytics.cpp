#include "cardsim/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cardsim/policy_params.hpp"

namespace cardsim {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

void require_two_servers(int n) {
  require(n == 2, "this constant is implemented for two servers only");
}

double epsilon_of(double lambda, const JobSizeModel& model) {
  double eps = 1.0 - lambda * model.mean();
  require(eps > 0.0, "utilization must stay below 1");
  return eps;
}

}  // namespace

double mg1_mean_work(double lambda, const JobSizeModel& model) {
  require(lambda > 0.0, "arrival rate must be positive");
  double eps = epsilon_of(lambda, model);
  return lambda * model.moment(2) / (2.0 * eps);
}

double k_card(int n, const JobSizeModel& model) {
  require(n >= 2, "need n >= 2");
  double m = model.solve_size_threshold(1.0 - 1.0 / n);
  return n * model.survival(m);
}

double lower_bound_mean_response(int n, double lambda, const JobSizeModel& model) {
  require(n >= 2, "need n >= 2");
  require(lambda > 0.0, "arrival rate must be positive");
  epsilon_of(lambda, model);
  double m = model.solve_size_threshold(1.0 - 1.0 / n);
  return k_card(n, model) * mg1_mean_work(lambda, model) -
         (n - 1) * model.moment(2) / (2.0 * m) + n * model.mean();
}

double sita_e_mean_response(double lambda, const JobSizeModel& model) {
  require(lambda > 0.0, "arrival rate must be positive");
  double eps = epsilon_of(lambda, model);
  double m = model.solve_size_threshold(0.5);
  double p_small = model.cdf(m);
  double s2_small = model.truncated_second_moment(m);
  double s2_large = model.moment(2) - s2_small;
  return 2.0 * lambda / eps *
             (p_small * s2_small + (1.0 - p_small) * s2_large) +
         2.0 * model.mean();
}

double k_sita_e(const JobSizeModel& model, int n) {
  require_two_servers(n);
  double m = model.solve_size_threshold(0.5);
  double p_small = model.cdf(m);
  double s2_small = model.truncated_second_moment(m);
  double s2_large = model.moment(2) - s2_small;
  return 4.0 / model.moment(2) *
         (p_small * s2_small + (1.0 - p_small) * s2_large);
}

double k_sita_o(const JobSizeModel& model, int n) {
  require_two_servers(n);
  double m = model.solve_size_threshold(0.5);
  double p_small = model.cdf(m);
  double s2_small = model.truncated_second_moment(m);
  double s2_large = model.moment(2) - s2_small;
  double mix = std::sqrt(s2_small * p_small) + std::sqrt(s2_large * (1.0 - p_small));
  return 2.0 / model.moment(2) * mix * mix;
}

double card_upper_bound_explicit(double alpha, double beta, double delta,
                                 double epsilon, double m_plus,
                                 const JobSizeModel& model, double lambda) {
  require(alpha > 0.0, "need alpha > 0");
  require(delta > 0.0, "need delta > 0");
  require(m_plus > 0.0, "need m_plus > 0");
  require(delta <= epsilon, "precondition violated: delta <= epsilon");
  require(epsilon < 0.5, "precondition violated: epsilon < 1/2");
  require(beta >= 2.0 * delta, "precondition violated: beta >= 2 delta");
  require(lambda > 0.0, "arrival rate must be positive");

  double lead = (k_card(2, model) + 4.0 * beta / (alpha + beta)) *
                (1.0 + delta / epsilon) * mg1_mean_work(lambda, model);
  double big_l = std::log(3.0 / (2.0 * beta * delta));
  double a2 = alpha * alpha;
  double t1 = beta / (a2 * (alpha + beta));
  double t2 = std::sqrt(beta / (a2 * epsilon * (alpha + beta)));
  double t3 = big_l / (beta * (alpha + beta));
  double t4 = std::sqrt(big_l / beta);
  double t5 = std::sqrt(delta) * big_l / (a2 * beta * beta * epsilon);
  return lead + 2.0 * model.mean() +
         44.0 * m_plus * std::max({t1, t2, t3, t4, t5});
}

HeavyTrafficParams heavy_traffic_recipe(double epsilon, int n,
                                        const JobSizeModel& model) {
  require(n >= 2, "need n >= 2");
  require(epsilon > 0.0 && epsilon < 1.0 / n,
          "the schedule needs epsilon in (0, 1/n)");
  double rho = 1.0 - epsilon;
  double lambda = rho / model.mean();
  HeavyTrafficParams p;
  p.alpha = 1.0 / (4.0 * n);
  double raw = std::cbrt(epsilon) * std::pow(std::log(1.0 / epsilon), 2.0 / 3.0);
  double ceiling = rho / (n - 1) - 1.0 / n;  // keeps the medium load feasible
  p.beta = std::min(raw, 0.9 * ceiling);
  p.delta = epsilon * epsilon * epsilon;
  auto th = card_params_from_alpha_beta(n, lambda, model, p.alpha, p.beta);
  p.m_minus = th.m_minus;
  p.m_plus = th.m_plus;
  p.c = card_threshold_c(n, th.m_plus, p.beta, p.delta);
  return p;
}

}  // namespace cardsim
