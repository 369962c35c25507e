#pragma once

#include <span>
#include <vector>

namespace pagerel {

inline constexpr double kDefaultFdrLevel = 0.05;

struct BhResult {
  // Both in input order.
  std::vector<bool> rejected;
  std::vector<double> adjusted_p;
  // Number of rejections, i.e. the largest sorted index i with
  // p_(i) <= i q / m; 0 when nothing is rejected.
  int k_star = 0;
};

// Benjamini-Hochberg step-up at FDR level q. Ties are ordered by input
// position, and tied p-values always share a decision and adjusted value.
// Throws kEmptyInput, kBadPValue (outside [0, 1] or NaN), and
// kInvalidArgument for q outside (0, 1).
BhResult BenjaminiHochberg(std::span<const double> p_values,
                           double q = kDefaultFdrLevel);

}  // namespace pagerel
