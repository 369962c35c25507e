#pragma once

#include <span>

#include "pagerel/core.h"

namespace pagerel {

// Query-level sDCG@K: DCG of the page divided by the DCG of a page made
// entirely of L5 results at the same depth. Always in [0.2, 1.0].
struct SdcgScore {
  double value = 0.0;
  int k_effective = 0;
  // The page had fewer than k_depth results; both sums stop at the page end.
  bool short_page = false;
};

// Throws Error(kEmptyPage) for an empty page and kInvalidArgument for
// k_depth < 1.
SdcgScore SdcgAtK(std::span<const RelevanceLabel> labels, int k_depth);
SdcgScore SdcgAtK(const RankedPage& page, int k_depth);

// sdcg(treatment) - sdcg(control). Throws kMissingArm without a treatment.
double PairedDelta(const QueryRecord& record, int k_depth);

}  // namespace pagerel
