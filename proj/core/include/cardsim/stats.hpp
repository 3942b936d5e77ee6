#pragma once

#include <vector>

namespace cardsim {

// Across-trial summary: mean, sample sd, and a two-sided Student-t
// confidence half width at the given level. Needs at least two values.
struct Summary {
  int count = 0;
  double mean = 0.0;
  double sd = 0.0;
  double se = 0.0;
  double ci_half = 0.0;
};

Summary summarize(const std::vector<double>& values, double confidence = 0.95);

}  // namespace cardsim
