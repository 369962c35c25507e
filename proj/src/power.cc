#include "pagerel/power.h"

#include <cmath>
#include <string>

#include "pagerel/error.h"

namespace pagerel {
namespace {

void CheckConfig(const PowerConfig& cfg) {
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0) ||
      !(cfg.power > 0.0 && cfg.power < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "alpha and power must both lie in (0, 1)");
  }
}

double ZSum(const PowerConfig& cfg) {
  return NormalQuantile(1.0 - cfg.alpha / 2.0) + NormalQuantile(cfg.power);
}

}  // namespace

double Mde(double mu_hat, double sigma_hat, int64_t n, const PowerConfig& cfg) {
  CheckConfig(cfg);
  if (!(mu_hat > 0.0)) {
    throw Error(ErrorCode::kNonPositiveMean, "metric mean must be positive");
  }
  if (!(sigma_hat >= 0.0) || std::isinf(sigma_hat)) {
    throw Error(ErrorCode::kInvalidArgument, "sigma must be finite and >= 0");
  }
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "n must be >= 1");
  return ZSum(cfg) * std::sqrt(2.0 * sigma_hat * sigma_hat / static_cast<double>(n)) /
         mu_hat;
}

int64_t RequiredN(double mu_hat, double sigma_hat, double target_mde,
                  const PowerConfig& cfg) {
  CheckConfig(cfg);
  if (!(mu_hat > 0.0)) {
    throw Error(ErrorCode::kNonPositiveMean, "metric mean must be positive");
  }
  if (!(sigma_hat > 0.0) || !(target_mde > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "sigma and target MDE must be positive");
  }
  const double root = sigma_hat * ZSum(cfg) / (mu_hat * target_mde);
  const double exact = 2.0 * root * root;
  if (!(exact < 9e18)) {
    throw Error(ErrorCode::kOutOfDomain, "required sample size overflows");
  }
  int64_t n = std::max<int64_t>(1, static_cast<int64_t>(std::ceil(exact)));
  // The closed form can land one off after rounding; settle it directly.
  while (n > 1 && Mde(mu_hat, sigma_hat, n - 1, cfg) <= target_mde) --n;
  while (Mde(mu_hat, sigma_hat, n, cfg) > target_mde) ++n;
  return n;
}

double MdeRatio(double sigma_1, int64_t n_1, double sigma_2, int64_t n_2) {
  if (!(sigma_1 > 0.0) || n_1 < 1 || n_2 < 1 || !(sigma_2 >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid MDE ratio arguments");
  }
  return (sigma_2 / sigma_1) *
         std::sqrt(static_cast<double>(n_1) / static_cast<double>(n_2));
}

}  // namespace pagerel
