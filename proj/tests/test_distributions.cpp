#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "cardsim/distribution.hpp"
#include "cardsim/numeric.hpp"
#include "cardsim/rng.hpp"
#include "doctest.h"
#include "oracles.hpp"

using cardsim::JobSizeModel;
using cardsim::RandomStream;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Independent truncated moment: integrate s^k * density by quadrature.
// The domain is clipped to the support so the quadrature never straddles a
// density jump.
double trunc_moment_oracle(const JobSizeModel& m, int k, double cut) {
  double lo = 0.0, hi = cut;
  if (auto* u = std::get_if<JobSizeModel::Uniform>(&m.spec())) {
    lo = u->lo;
    hi = std::min(cut, u->hi);
  }
  if (hi <= lo) return 0.0;
  auto integrand = [&](double s) {
    return s == 0.0 ? 0.0 : std::pow(s, k) * m.density(s);
  };
  return oracle::adaptive_quad(integrand, lo, hi, 1e-12);
}

std::vector<JobSizeModel> smooth_models() {
  return {JobSizeModel::exponential(1.0), JobSizeModel::exponential(0.25),
          JobSizeModel::weibull(1.5, 2.0), JobSizeModel::uniform(0.0, 2.0),
          JobSizeModel::uniform(0.5, 3.0)};
}

}  // namespace

TEST_SUITE("distributions") {

TEST_CASE("inverse transform hits known points") {
  auto exp1 = JobSizeModel::exponential(1.0);
  CHECK(exp1.sample_from_uniform(std::exp(-1.0)) == doctest::Approx(1.0).epsilon(1e-12));
  auto wb = JobSizeModel::weibull(0.5, 2.0);
  // (-ln e^-4)^(1/0.5) * 2 = 16 * 2
  CHECK(wb.sample_from_uniform(std::exp(-4.0)) == doctest::Approx(32.0).epsilon(1e-10));
  auto uni = JobSizeModel::uniform(1.0, 3.0);
  CHECK(uni.sample_from_uniform(0.25) == doctest::Approx(1.5));
  auto det = JobSizeModel::deterministic(5.0);
  CHECK(det.sample_from_uniform(0.9) == 5.0);
}

TEST_CASE("exponential moments and truncated moments") {
  auto exp1 = JobSizeModel::exponential(1.0);
  CHECK(exp1.mean() == doctest::Approx(1.0));
  CHECK(exp1.moment(2) == doctest::Approx(2.0));

  // 1/rate - e^{-rate m}(m + 1/rate) at m = 1.6783 is 0.5000 for rate 1.
  double m = 1.6783;
  CHECK(exp1.truncated_first_moment(m) == doctest::Approx(0.5000).epsilon(1e-3));
  CHECK(exp1.truncated_first_moment(m) ==
        doctest::Approx(1.0 - std::exp(-m) * (m + 1.0)).epsilon(1e-14));
  CHECK(exp1.truncated_second_moment(m) == doctest::Approx(0.474).epsilon(2e-3));

  auto exp4 = JobSizeModel::exponential(0.25);
  CHECK(exp4.mean() == doctest::Approx(4.0));
  CHECK(exp4.moment(2) == doctest::Approx(32.0));
}

TEST_CASE("weibull closed-form moments") {
  for (double s : {1.0, 2.5}) {
    auto wb = JobSizeModel::weibull(0.5, s);
    CHECK(wb.mean() == doctest::Approx(2.0 * s).epsilon(1e-12));       // s*Gamma(3)
    CHECK(wb.moment(2) == doctest::Approx(24.0 * s * s).epsilon(1e-12));  // s^2*Gamma(5)
  }
  auto wb = JobSizeModel::weibull(1.0, 3.0);  // same as exponential rate 1/3
  CHECK(wb.mean() == doctest::Approx(3.0));
  CHECK(wb.moment(2) == doctest::Approx(18.0));
}

TEST_CASE("truncated moments match quadrature oracle") {
  for (const auto& model : smooth_models()) {
    for (double cut : {0.1, 0.7, 1.0, 2.3, 5.0, 20.0}) {
      for (int k : {1, 2}) {
        double expect = trunc_moment_oracle(model, k, cut);
        CHECK(model.truncated_moment(k, cut) ==
              doctest::Approx(expect).epsilon(1e-8));
      }
    }
  }
  // Shape below 1: density is unbounded at zero but the integrand is not.
  auto heavy = JobSizeModel::weibull(0.6, 0.8);
  for (double cut : {0.3, 1.0, 4.0}) {
    CHECK(heavy.truncated_first_moment(cut) ==
          doctest::Approx(trunc_moment_oracle(heavy, 1, cut)).epsilon(1e-7));
  }
}

TEST_CASE("quadrature fallback agrees with closed forms") {
  auto models = smooth_models();
  models.push_back(JobSizeModel::weibull(0.6, 0.8));
  for (const auto& model : models) {
    for (double cut : {0.4, 1.3, 6.0}) {
      for (int k : {1, 2}) {
        double closed = model.truncated_moment(k, cut);
        double quad = model.truncated_moment_by_quadrature(k, cut);
        CHECK(std::abs(closed - quad) <= 1e-9 * std::max(1.0, std::abs(closed)));
      }
    }
  }
}

TEST_CASE("truncated first moment is monotone and converges to the mean") {
  std::vector<JobSizeModel> models = {
      JobSizeModel::exponential(1.0), JobSizeModel::weibull(1.5, 2.0),
      JobSizeModel::weibull_from_mean_cv(1.0, 10.0),
      JobSizeModel::uniform(0.0, 2.0)};
  for (const auto& model : models) {
    double prev = 0.0;
    for (double cut = 0.25; cut < 1e4; cut *= 2.0) {
      double cur = model.truncated_first_moment(cut);
      CHECK(cur >= prev - 1e-15);
      prev = cur;
    }
    CHECK(model.truncated_first_moment(1e12) ==
          doctest::Approx(model.mean()).epsilon(1e-8));
    CHECK(model.truncated_first_moment(kInf) == doctest::Approx(model.mean()));
  }
}

TEST_CASE("size threshold solving") {
  auto exp1 = JobSizeModel::exponential(1.0);

  // Oracle: bisect m with integral_0^m s e^-s ds = f via quadrature only.
  auto oracle_threshold = [&](double f) {
    auto g = [&](double m) { return trunc_moment_oracle(exp1, 1, m) - f; };
    return oracle::bisect_root(g, 0.0, 64.0);
  };
  double half = oracle_threshold(0.5);
  CHECK(half == doctest::Approx(1.6783).epsilon(1e-3));  // frozen
  CHECK(exp1.solve_size_threshold(0.5) == doctest::Approx(half).epsilon(1e-8));
  CHECK(exp1.solve_size_threshold(0.9) == doctest::Approx(oracle_threshold(0.9)).epsilon(1e-8));

  // Uniform on [0,2]: m^2/4 = f  =>  m = 2 sqrt(f).
  auto uni = JobSizeModel::uniform(0.0, 2.0);
  CHECK(uni.solve_size_threshold(0.5) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));

  CHECK(exp1.solve_size_threshold(0.0) == 0.0);
  CHECK(std::isinf(exp1.solve_size_threshold(1.0)));
  CHECK_THROWS_AS((void)exp1.solve_size_threshold(-0.1), std::invalid_argument);
  CHECK_THROWS_AS((void)exp1.solve_size_threshold(1.1), std::invalid_argument);
  CHECK_THROWS_AS((void)JobSizeModel::deterministic(1.0).solve_size_threshold(0.5),
                  cardsim::ContinuityError);
}

TEST_CASE("threshold round trip across models and fractions") {
  std::vector<JobSizeModel> models = {
      JobSizeModel::exponential(1.0), JobSizeModel::weibull(1.5, 2.0),
      JobSizeModel::weibull_from_mean_cv(1.0, 10.0),
      JobSizeModel::weibull_from_mean_cv(1.0, 100.0),
      JobSizeModel::uniform(0.0, 2.0)};
  for (const auto& model : models) {
    for (double f = 0.05; f < 0.99; f += 0.1) {
      double m = model.solve_size_threshold(f);
      CHECK(std::abs(model.truncated_first_moment(m) - f * model.mean()) <=
            1e-8 * model.mean());
    }
  }
}

TEST_CASE("weibull_from_mean_cv meets its tolerances") {
  struct Case { double mean, cv; };
  for (auto [mean, cv] : {Case{1.0, 0.15}, Case{1.0, 0.3}, Case{1.0, 1.0},
                          Case{1.0, 10.0}, Case{2.5, 100.0}, Case{1.0, 1e4}}) {
    auto model = JobSizeModel::weibull_from_mean_cv(mean, cv);
    CHECK(std::abs(model.mean() - mean) <= 1e-9);
    CHECK(std::abs(model.cv() - cv) / cv <= 1e-9);
  }
  // cv = 1 must collapse to the exponential: shape 1, scale = mean.
  auto unit = JobSizeModel::weibull_from_mean_cv(1.0, 1.0);
  auto spec = std::get<JobSizeModel::Weibull>(unit.spec());
  CHECK(spec.shape == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(spec.scale == doctest::Approx(1.0).epsilon(1e-9));

  CHECK_THROWS_AS(JobSizeModel::weibull_from_mean_cv(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(JobSizeModel::weibull_from_mean_cv(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(JobSizeModel::weibull_from_mean_cv(1.0, 1e6), std::invalid_argument);
}

TEST_CASE("sample means match analytic means over a million draws") {
  std::vector<JobSizeModel> models = {
      JobSizeModel::exponential(1.0),
      JobSizeModel::weibull_from_mean_cv(1.0, 10.0),
      JobSizeModel::uniform(0.0, 2.0), JobSizeModel::deterministic(2.5)};
  const int n = 1'000'000;
  int stream_tag = 0;
  for (const auto& model : models) {
    RandomStream rng(cardsim::mix64(9000 + stream_tag++));
    double acc = 0.0, min_seen = kInf;
    for (int i = 0; i < n; ++i) {
      double s = model.sample(rng);
      acc += s;
      min_seen = std::min(min_seen, s);
    }
    double mean = acc / n;
    double sd = model.mean() * model.cv();
    CHECK(std::abs(mean - model.mean()) <= 5.0 * sd / std::sqrt(double(n)) + 1e-12);
    CHECK(min_seen >= 0.0);
  }
}

TEST_CASE("weibull mean-cv(1,1) sampling passes a KS test against exp(1)") {
  auto model = JobSizeModel::weibull_from_mean_cv(1.0, 1.0);
  const int n = 100'000;
  RandomStream rng(cardsim::mix64(4242));
  std::vector<double> xs(n);
  for (auto& x : xs) x = model.sample(rng);
  std::sort(xs.begin(), xs.end());
  double d = 0.0;
  for (int i = 0; i < n; ++i) {
    double f = 1.0 - std::exp(-xs[i]);
    d = std::max(d, std::abs(f - double(i) / n));
    d = std::max(d, std::abs(f - double(i + 1) / n));
  }
  CHECK(d < 1.628 / std::sqrt(double(n)));  // 1% critical value
}

TEST_CASE("deterministic model semantics") {
  auto det = JobSizeModel::deterministic(2.0);
  CHECK(det.mean() == 2.0);
  CHECK(det.moment(2) == 4.0);
  CHECK(det.truncated_first_moment(1.0) == 0.0);
  CHECK(det.truncated_first_moment(2.0) == 0.0);  // strict: S < m
  CHECK(det.truncated_first_moment(2.5) == 2.0);
  CHECK(det.truncated_second_moment(3.0) == 4.0);
  CHECK(det.cdf(1.9) == 0.0);
  CHECK(det.cdf(2.0) == 1.0);
  CHECK_FALSE(det.is_continuous());
  CHECK_THROWS_AS((void)det.density(1.0), cardsim::ContinuityError);
}

TEST_CASE("constructor validation") {
  CHECK_THROWS_AS(JobSizeModel::exponential(0.0), std::invalid_argument);
  CHECK_THROWS_AS(JobSizeModel::exponential(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(JobSizeModel::weibull(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(JobSizeModel::weibull(1.0, -2.0), std::invalid_argument);
  CHECK_THROWS_AS(JobSizeModel::uniform(-0.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(JobSizeModel::uniform(2.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(JobSizeModel::deterministic(0.0), std::invalid_argument);
  CHECK_THROWS_AS(JobSizeModel::exponential(1.0).moment(3), std::invalid_argument);
}

TEST_CASE("cdf and survival are consistent") {
  for (const auto& model : smooth_models()) {
    for (double x : {0.0, 0.3, 1.0, 2.7, 10.0}) {
      CHECK(model.cdf(x) == doctest::Approx(1.0 - model.survival(x)).epsilon(1e-12));
      CHECK(model.cdf(x) >= 0.0);
      CHECK(model.cdf(x) <= 1.0);
    }
  }
}

}  // TEST_SUITE
