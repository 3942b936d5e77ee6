#include "cardsim/distribution.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>

#include "cardsim/numeric.hpp"

namespace cardsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw std::invalid_argument(std::string(what) + " must be positive and finite");
  return v;
}

// Gamma(1+2/k) / Gamma(1+1/k)^2 in log space; strictly decreasing in k.
double log_weibull_moment_ratio(double k) {
  return std::lgamma(1.0 + 2.0 / k) - 2.0 * std::lgamma(1.0 + 1.0 / k);
}

}  // namespace

JobSizeModel JobSizeModel::exponential(double rate) {
  require_positive(rate, "exponential rate");
  return JobSizeModel{Exponential{rate}};
}

JobSizeModel JobSizeModel::weibull(double shape, double scale) {
  require_positive(shape, "weibull shape");
  require_positive(scale, "weibull scale");
  return JobSizeModel{Weibull{shape, scale}};
}

JobSizeModel JobSizeModel::uniform(double lo, double hi) {
  if (!(lo >= 0.0) || !(hi > lo) || !std::isfinite(hi))
    throw std::invalid_argument("uniform support must satisfy 0 <= lo < hi");
  return JobSizeModel{Uniform{lo, hi}};
}

JobSizeModel JobSizeModel::deterministic(double value) {
  require_positive(value, "deterministic size");
  return JobSizeModel{Deterministic{value}};
}

JobSizeModel JobSizeModel::weibull_from_mean_cv(double mean, double cv) {
  require_positive(mean, "mean");
  require_positive(cv, "cv");
  const double target = std::log1p(cv * cv);
  const double k_lo = 0.05, k_hi = 50.0;
  if (log_weibull_moment_ratio(k_lo) < target ||
      log_weibull_moment_ratio(k_hi) > target)
    throw std::invalid_argument(
        "cv not reachable with a Weibull shape in [0.05, 50]");
  double k = bisect(
      [&](double x) { return log_weibull_moment_ratio(x) - target; }, k_lo,
      k_hi, 1e-14);
  double scale = mean / std::exp(std::lgamma(1.0 + 1.0 / k));
  JobSizeModel model = weibull(k, scale);
  if (std::abs(model.mean() - mean) > 1e-9 ||
      std::abs(model.cv() - cv) / cv > 1e-9)
    throw std::runtime_error("weibull_from_mean_cv failed verification");
  return model;
}

double JobSizeModel::sample_from_uniform(double u) const {
  return std::visit(
      [&](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Exponential>)
          return -std::log(u) / d.rate;
        else if constexpr (std::is_same_v<T, Weibull>)
          return d.scale * std::pow(-std::log(u), 1.0 / d.shape);
        else if constexpr (std::is_same_v<T, Uniform>)
          return d.lo + u * (d.hi - d.lo);
        else
          return d.value;
      },
      spec_);
}

double JobSizeModel::moment(int k) const {
  if (k != 1 && k != 2) throw std::invalid_argument("moment order must be 1 or 2");
  return std::visit(
      [&](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Exponential>)
          return k == 1 ? 1.0 / d.rate : 2.0 / (d.rate * d.rate);
        else if constexpr (std::is_same_v<T, Weibull>)
          return std::exp(std::lgamma(1.0 + k / d.shape) +
                          k * std::log(d.scale));
        else if constexpr (std::is_same_v<T, Uniform>)
          return (std::pow(d.hi, k + 1) - std::pow(d.lo, k + 1)) /
                 ((k + 1) * (d.hi - d.lo));
        else
          return std::pow(d.value, k);
      },
      spec_);
}

double JobSizeModel::cv() const {
  double m1 = moment(1), m2 = moment(2);
  return std::sqrt(std::max(0.0, m2 - m1 * m1)) / m1;
}

double JobSizeModel::cdf(double x) const {
  if (!(x > 0.0)) return 0.0;
  return std::visit(
      [&](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Exponential>)
          return -std::expm1(-d.rate * x);
        else if constexpr (std::is_same_v<T, Weibull>)
          return -std::expm1(-std::pow(x / d.scale, d.shape));
        else if constexpr (std::is_same_v<T, Uniform>)
          return x >= d.hi ? 1.0 : (x <= d.lo ? 0.0 : (x - d.lo) / (d.hi - d.lo));
        else
          return x >= d.value ? 1.0 : 0.0;
      },
      spec_);
}

double JobSizeModel::survival(double x) const {
  if (!(x > 0.0)) return 1.0;
  return std::visit(
      [&](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Exponential>)
          return std::exp(-d.rate * x);
        else if constexpr (std::is_same_v<T, Weibull>)
          return std::exp(-std::pow(x / d.scale, d.shape));
        else if constexpr (std::is_same_v<T, Uniform>)
          return x >= d.hi ? 0.0 : (x <= d.lo ? 1.0 : (d.hi - x) / (d.hi - d.lo));
        else
          return x >= d.value ? 0.0 : 1.0;
      },
      spec_);
}

double JobSizeModel::density(double x) const {
  if (!is_continuous())
    throw ContinuityError("density requires a continuous size distribution");
  if (x < 0.0) return 0.0;
  return std::visit(
      [&](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Exponential>) {
          return d.rate * std::exp(-d.rate * x);
        } else if constexpr (std::is_same_v<T, Weibull>) {
          if (x == 0.0)
            return d.shape > 1.0 ? 0.0 : (d.shape == 1.0 ? 1.0 / d.scale : kInf);
          double z = x / d.scale;
          return d.shape / d.scale * std::pow(z, d.shape - 1.0) *
                 std::exp(-std::pow(z, d.shape));
        } else if constexpr (std::is_same_v<T, Uniform>) {
          return (x >= d.lo && x <= d.hi) ? 1.0 / (d.hi - d.lo) : 0.0;
        } else {
          return 0.0;  // unreachable
        }
      },
      spec_);
}

bool JobSizeModel::is_continuous() const {
  return !std::holds_alternative<Deterministic>(spec_);
}

double JobSizeModel::truncated_moment(int k, double m) const {
  if (k != 1 && k != 2) throw std::invalid_argument("moment order must be 1 or 2");
  if (!(m > 0.0)) return 0.0;
  if (std::isinf(m)) return moment(k);
  return std::visit(
      [&](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Exponential>) {
          double r = d.rate, e = std::exp(-r * m);
          if (k == 1) return 1.0 / r - e * (m + 1.0 / r);
          return 2.0 / (r * r) - e * (m * m + 2.0 * m / r + 2.0 / (r * r));
        } else if constexpr (std::is_same_v<T, Weibull>) {
          // substitute u = (s/scale)^shape: integral becomes a lower
          // incomplete gamma with parameter 1 + k/shape.
          double a = 1.0 + k / d.shape;
          double x = std::pow(m / d.scale, d.shape);
          // beyond x ~ 1e4 the lower incomplete gamma equals Gamma(a) to
          // machine precision for every a reachable here (a <= 41).
          x = std::min(x, 1e4);
          return std::pow(d.scale, k) * boost::math::tgamma_lower(a, x);
        } else if constexpr (std::is_same_v<T, Uniform>) {
          if (m <= d.lo) return 0.0;
          double x = std::min(m, d.hi);
          return (std::pow(x, k + 1) - std::pow(d.lo, k + 1)) /
                 ((k + 1) * (d.hi - d.lo));
        } else {
          return d.value < m ? std::pow(d.value, k) : 0.0;
        }
      },
      spec_);
}

double JobSizeModel::truncated_moment_by_quadrature(int k, double m,
                                                    double abs_tol) const {
  if (k != 1 && k != 2) throw std::invalid_argument("moment order must be 1 or 2");
  if (!is_continuous())
    throw ContinuityError("quadrature route requires a continuous distribution");
  if (!(m > 0.0)) return 0.0;
  // Integrate over the uniform variable of the inverse transform:
  // E[S^k 1(S < m)] = integral over {u : q(u) < m} of q(u)^k du with
  // q(u) = sample_from_uniform(u). This keeps the domain finite for
  // unbounded supports and avoids the density blow-up at zero for Weibull
  // shapes below one. q is decreasing for Exponential/Weibull (built on
  // -ln u) and increasing for Uniform.
  double lo, hi;
  if (std::holds_alternative<Uniform>(spec_)) {
    lo = 0.0;
    hi = cdf(m);
  } else {
    lo = survival(m);
    hi = 1.0;
  }
  return adaptive_simpson(
      [&](double u) { return std::pow(sample_from_uniform(u), k); }, lo, hi,
      abs_tol);
}

double JobSizeModel::solve_size_threshold(double f) const {
  if (!is_continuous())
    throw ContinuityError(
        "solve_size_threshold requires a continuous size distribution");
  if (!(f >= 0.0 && f <= 1.0))
    throw std::invalid_argument("load fraction must lie in [0, 1]");
  if (f == 0.0) return 0.0;
  if (f == 1.0) return kInf;
  const double target = f * mean();
  double hi = mean();
  while (truncated_first_moment(hi) < target) {
    hi *= 2.0;
    if (hi > 1e300)
      throw std::runtime_error("solve_size_threshold bracket did not close");
  }
  return bisect(
      [&](double m) { return truncated_first_moment(m) - target; }, 0.0, hi,
      1e-9);
}

}  // namespace cardsim
