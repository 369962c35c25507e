#pragma once

// Metric sensitivity: minimum detectable effect (as a relative lift) and the
// sample size needed to reach a target MDE, for a two-sided test.

#include <cstdint>

#include "pagerel/distributions.h"

namespace pagerel {

struct PowerConfig {
  double alpha = 0.05;
  // Probability of detecting a true effect of MDE size. z is taken at this
  // quantile (0.8 -> 0.8416).
  double power = 0.8;
};

// (z_{1-alpha/2} + z_power) * sqrt(2 sigma^2 / n) / mu, as a fraction
// (0.02 means a 2% lift). Throws kNonPositiveMean for mu <= 0 and
// kInvalidArgument for sigma < 0, n < 1 or a bad config.
double Mde(double mu_hat, double sigma_hat, int64_t n, const PowerConfig& cfg = {});

// Smallest n with Mde(mu, sigma, n) <= target_mde.
int64_t RequiredN(double mu_hat, double sigma_hat, double target_mde,
                  const PowerConfig& cfg = {});

// Ratio MDE_2 / MDE_1 between two (sigma, n) settings:
// (sigma_2 / sigma_1) * sqrt(n_1 / n_2).
double MdeRatio(double sigma_1, int64_t n_1, double sigma_2, int64_t n_2);

}  // namespace pagerel
