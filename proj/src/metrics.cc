#include "pagerel/metrics.h"

#include <algorithm>
#include <cmath>

namespace pagerel {

SdcgScore SdcgAtK(std::span<const RelevanceLabel> labels, int k_depth) {
  if (k_depth < 1) {
    throw Error(ErrorCode::kInvalidArgument, "k_depth must be >= 1");
  }
  if (labels.empty()) {
    throw Error(ErrorCode::kEmptyPage, "sDCG is undefined for an empty page");
  }
  const size_t depth = std::min(labels.size(), static_cast<size_t>(k_depth));
  // Discounts are summed per label level so that a constant page reduces to
  // level * (S / S) / 5, which is exact.
  double per_level[kNumLabels] = {};
  double discount_sum = 0.0;
  for (size_t i = 0; i < depth; ++i) {
    const double discount = 1.0 / std::log2(static_cast<double>(i) + 2.0);
    per_level[labels[i].index()] += discount;
    discount_sum += discount;
  }
  double mean_level = 0.0;
  for (int l = 0; l < kNumLabels; ++l) {
    if (per_level[l] != 0.0) mean_level += (l + 1) * (per_level[l] / discount_sum);
  }
  SdcgScore score;
  score.value = mean_level / kMaxLabel;
  score.k_effective = static_cast<int>(depth);
  score.short_page = labels.size() < static_cast<size_t>(k_depth);
  return score;
}

SdcgScore SdcgAtK(const RankedPage& page, int k_depth) {
  return SdcgAtK(std::span<const RelevanceLabel>(page.labels), k_depth);
}

double PairedDelta(const QueryRecord& record, int k_depth) {
  if (!record.treatment) {
    throw Error(ErrorCode::kMissingArm,
                "query " + record.query_id + " has no treatment page");
  }
  return SdcgAtK(*record.treatment, k_depth).value -
         SdcgAtK(record.control, k_depth).value;
}

}  // namespace pagerel
