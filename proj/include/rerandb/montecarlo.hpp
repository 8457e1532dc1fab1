#pragma once

#include <cmath>
#include <cstdint>

#include "rerandb/errors.hpp"

namespace rerandb {

struct WilsonInterval {
  double lo = 0;
  double hi = 1;
};

// Wilson score interval for a binomial proportion. z = 2.576 is the 99%
// two-sided level used by the bound-comparison suites.
inline WilsonInterval wilson_interval(std::uint64_t successes,
                                      std::uint64_t trials, double z = 2.576) {
  if (trials == 0) throw contract_error("wilson_interval: zero trials");
  const double nd = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / nd;
  const double z2 = z * z;
  const double denom = 1 + z2 / nd;
  const double center = (p + z2 / (2 * nd)) / denom;
  const double half =
      z * std::sqrt(p * (1 - p) / nd + z2 / (4 * nd * nd)) / denom;
  return {center - half, center + half};
}

// Result of pitting a Monte Carlo estimate against a theoretical bound.
// Passes iff the CI lower edge does not exceed the bound: the estimate is
// statistically compatible with being below it.
struct McComparison {
  std::uint64_t successes = 0;
  std::uint64_t trials = 0;
  double estimate = 0;
  double ci_lo = 0;
  double ci_hi = 1;
  double bound = 0;
  bool pass = false;
};

inline McComparison compare_to_bound(std::uint64_t successes,
                                     std::uint64_t trials, double bound,
                                     double z = 2.576) {
  McComparison c;
  c.successes = successes;
  c.trials = trials;
  c.estimate = static_cast<double>(successes) / static_cast<double>(trials);
  const WilsonInterval w = wilson_interval(successes, trials, z);
  c.ci_lo = w.lo;
  c.ci_hi = w.hi;
  c.bound = bound;
  c.pass = w.lo <= bound;
  return c;
}

// Standard error of a binomial proportion, for the "+3 sigma" margins.
inline double binomial_sigma(double p, std::uint64_t trials) {
  return std::sqrt(p * (1 - p) / static_cast<double>(trials));
}

}  // namespace rerandb
