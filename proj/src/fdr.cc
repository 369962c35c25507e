#include "pagerel/fdr.h"

#include <algorithm>
#include <numeric>
#include <string>

#include "pagerel/error.h"

namespace pagerel {

BhResult BenjaminiHochberg(std::span<const double> p_values, double q) {
  if (p_values.empty()) {
    throw Error(ErrorCode::kEmptyInput, "no p-values given");
  }
  if (!(q > 0.0 && q < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "FDR level must lie in (0, 1)");
  }
  for (size_t i = 0; i < p_values.size(); ++i) {
    if (!(p_values[i] >= 0.0 && p_values[i] <= 1.0)) {
      throw Error(ErrorCode::kBadPValue,
                  "p-value " + std::to_string(i) + " is outside [0, 1]");
    }
  }

  const size_t m = p_values.size();
  std::vector<size_t> order(m);
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return p_values[a] < p_values[b];
  });

  BhResult result;
  result.rejected.assign(m, false);
  result.adjusted_p.assign(m, 1.0);

  for (size_t i = m; i >= 1; --i) {
    const double threshold = static_cast<double>(i) * q / static_cast<double>(m);
    if (p_values[order[i - 1]] <= threshold) {
      result.k_star = static_cast<int>(i);
      break;
    }
  }
  for (int i = 0; i < result.k_star; ++i) result.rejected[order[i]] = true;

  double running_min = 1.0;
  for (size_t i = m; i >= 1; --i) {
    const double p = p_values[order[i - 1]];
    // m / i >= 1; the max guards against rounding below p.
    const double scaled =
        std::max(p, static_cast<double>(m) * p / static_cast<double>(i));
    running_min = std::min(running_min, scaled);
    result.adjusted_p[order[i - 1]] = running_min;
  }
  return result;
}

}  // namespace pagerel
