#pragma once

#include <stdexcept>
#include <string>
#include <variant>

#include "cardsim/rng.hpp"

namespace cardsim {

// Thrown when an operation requiring a continuous size distribution is
// applied to one with atoms (Deterministic).
struct ContinuityError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Job size distribution. All members are exact closed forms except where
// noted; sampling is inverse-transform from a single uniform draw so that a
// fixed seed reproduces identical sizes on any conforming platform.
class JobSizeModel {
 public:
  struct Exponential { double rate; };
  struct Weibull { double shape; double scale; };
  struct Uniform { double lo; double hi; };
  // Point mass; accepted by sampling and moments, rejected by every
  // operation that needs a continuous distribution. Intended for tests.
  struct Deterministic { double value; };

  static JobSizeModel exponential(double rate);
  static JobSizeModel weibull(double shape, double scale);
  static JobSizeModel uniform(double lo, double hi);
  static JobSizeModel deterministic(double value);

  // Weibull with given mean and coefficient of variation. Solves
  // Gamma(1+2/k)/Gamma(1+1/k)^2 = 1+cv^2 for the shape k by bisection on
  // [0.05, 50] using log-gamma, then sets the scale from the mean. The
  // realized mean and cv are verified to 1e-9 (relative for cv).
  static JobSizeModel weibull_from_mean_cv(double mean, double cv);

  double sample(RandomStream& rng) const { return sample_from_uniform(rng.next01()); }
  // Inverse transform at u in (0,1). Weibull: scale * (-ln u)^(1/shape).
  double sample_from_uniform(double u) const;

  double mean() const { return moment(1); }
  // E[S^k] for k in {1, 2}.
  double moment(int k) const;
  double cv() const;

  double cdf(double x) const;
  // P{S > x}, computed directly (not as 1 - cdf) so deep tails keep full
  // relative precision.
  double survival(double x) const;
  // Probability density; requires continuity.
  double density(double x) const;
  bool is_continuous() const;

  // E[S^k 1(S < m)] for k in {1, 2}; closed form per variant.
  double truncated_first_moment(double m) const { return truncated_moment(1, m); }
  double truncated_second_moment(double m) const { return truncated_moment(2, m); }
  double truncated_moment(int k, double m) const;
  // Same quantity by adaptive Simpson on the density. Fallback route for
  // variants without a closed form (none today) and an in-tree cross-check.
  double truncated_moment_by_quadrature(int k, double m,
                                        double abs_tol = 1e-10) const;

  // Smallest m with E[S 1(S < m)] = f * E[S]. Requires continuity and
  // f in [0, 1]; f = 0 gives 0 and f = 1 gives +infinity. Bisection with a
  // doubling upper bracket, relative tolerance 1e-9 on m.
  double solve_size_threshold(double f) const;

  const std::variant<Exponential, Weibull, Uniform, Deterministic>& spec() const {
    return spec_;
  }

 private:
  explicit JobSizeModel(std::variant<Exponential, Weibull, Uniform, Deterministic> s)
      : spec_(s) {}
  std::variant<Exponential, Weibull, Uniform, Deterministic> spec_;
};

}  // namespace cardsim
