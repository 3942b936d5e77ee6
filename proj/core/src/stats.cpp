#include "cardsim/stats.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <stdexcept>

namespace cardsim {

Summary summarize(const std::vector<double>& values, double confidence) {
  if (values.size() < 2)
    throw std::invalid_argument("need at least two trials to summarize");
  if (!(confidence > 0.0 && confidence < 1.0))
    throw std::invalid_argument("confidence must lie in (0, 1)");
  Summary s;
  s.count = static_cast<int>(values.size());
  double acc = 0.0;
  for (double v : values) acc += v;
  s.mean = acc / s.count;
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.sd = std::sqrt(ss / (s.count - 1));
  s.se = s.sd / std::sqrt(double(s.count));
  boost::math::students_t dist(s.count - 1);
  double q = boost::math::quantile(dist, 0.5 + confidence / 2.0);
  s.ci_half = q * s.se;
  return s;
}

}  // namespace cardsim
