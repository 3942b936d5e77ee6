#include <cmath>
#include <stdexcept>

#include "cardsim/numeric.hpp"
#include "doctest.h"

using cardsim::adaptive_simpson;
using cardsim::bisect;

TEST_SUITE("numeric") {

TEST_CASE("adaptive simpson on known integrals") {
  CHECK(adaptive_simpson([](double x) { return x * x * x; }, 0.0, 1.0, 1e-12) ==
        doctest::Approx(0.25).epsilon(1e-12));
  CHECK(adaptive_simpson([](double x) { return std::sin(x); }, 0.0,
                         3.14159265358979323846, 1e-12) ==
        doctest::Approx(2.0).epsilon(1e-10));
  CHECK(adaptive_simpson([](double x) { return std::exp(x); }, 0.0, 1.0, 1e-12) ==
        doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-12));
  CHECK(adaptive_simpson([](double x) { return 1.0 / (1.0 + x * x); }, 0.0, 1.0,
                         1e-12) ==
        doctest::Approx(std::atan(1.0)).epsilon(1e-11));
  // Mild endpoint singularity in the derivative.
  CHECK(adaptive_simpson([](double x) { return std::sqrt(x); }, 0.0, 1.0, 1e-10) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-8));
  CHECK(adaptive_simpson([](double) { return 1.0; }, 2.0, 2.0, 1e-12) == 0.0);
}

TEST_CASE("bisect finds roots in either orientation") {
  CHECK(bisect([](double x) { return x * x - 2.0; }, 0.0, 2.0, 1e-13) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(bisect([](double x) { return 2.0 - x * x; }, 0.0, 2.0, 1e-13) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(bisect([](double x) { return std::cos(x); }, 0.0, 3.0, 1e-13) ==
        doctest::Approx(1.5707963267948966).epsilon(1e-12));
  CHECK_THROWS_AS(bisect([](double x) { return x * x + 1.0; }, -1.0, 1.0, 1e-12),
                  std::invalid_argument);
}

}  // TEST_SUITE
