#include <stdexcept>
#include <vector>

#include "cardsim/rng.hpp"
#include "cardsim/stats.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cardsim;

TEST_SUITE("stats") {

TEST_CASE("two-point summary uses the t quantile with one degree of freedom") {
  Summary s = summarize({1.0, 3.0});
  CHECK(s.count == 2);
  CHECK(s.mean == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(s.sd == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(s.se == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.ci_half == doctest::Approx(12.7062).epsilon(1e-4));  // frozen
  CHECK(summarize({1.0, 3.0}, 0.90).ci_half ==
        doctest::Approx(6.313752).epsilon(1e-5));  // frozen
}

TEST_CASE("eight-point summary against hand-computed moments") {
  Summary s = summarize({2, 4, 4, 4, 5, 5, 7, 9});
  CHECK(s.mean == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(s.sd == doctest::Approx(2.138090).epsilon(1e-6));    // sqrt(32/7)
  CHECK(s.se == doctest::Approx(0.755929).epsilon(1e-6));
  CHECK(s.ci_half == doctest::Approx(1.787490).epsilon(1e-4));  // t(7) = 2.364624
}

TEST_CASE("summaries need at least two trials") {
  CHECK_THROWS_AS(summarize({}), std::invalid_argument);
  CHECK_THROWS_AS(summarize({1.0}), std::invalid_argument);
  CHECK_THROWS_AS(summarize({1.0, 2.0}, 1.5), std::invalid_argument);
}

TEST_CASE("interval coverage on synthetic normal trials") {
  RandomStream rng(51);
  int covered = 0;
  const int reps = 1000, k = 40;
  for (int r = 0; r < reps; ++r) {
    std::vector<double> xs(k);
    for (auto& x : xs) x = oracle::next_normal(rng);
    Summary s = summarize(xs);
    if (std::abs(s.mean) <= s.ci_half) ++covered;
  }
  CHECK(covered >= 920);
  CHECK(covered <= 975);
}

}  // TEST_SUITE
