#pragma once

// Point estimates and inference for paired relevance deltas
// (treatment - control, one per query), under simple random sampling and
// stratified sampling.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pagerel/core.h"
#include "pagerel/fdr.h"

namespace pagerel {

enum class Estimator { kSrs, kStratified };

std::string_view EstimatorName(Estimator estimator);

struct EstimateResult {
  double mean = 0.0;
  double std_error = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double p_value = 1.0;
  // t (SRS) or z (stratified); absent when std_error is 0.
  std::optional<double> statistic;
  int64_t n = 0;
  Estimator estimator = Estimator::kSrs;
  // Zero variance: p is 1 when the mean is 0 and 0 otherwise, and the
  // interval collapses to the mean.
  bool degenerate = false;
};

// Sample mean, s / sqrt(n) standard error, two-sided Student-t interval and
// test against 0 with n - 1 degrees of freedom. Throws kTooFewSamples for
// n < 2 and kInvalidArgument for alpha outside (0, 1).
EstimateResult SrsEstimate(std::span<const double> deltas, double alpha = 0.05);

// mean = sum W_k ybar_k, variance = sum W_k^2 s_k^2 / n_k, normal interval
// and z-test. Throws kTooFewSamplesInStratum (n_k < 2) and kWeightMismatch
// (key sets differ or weights do not sum to 1 within 1e-9).
EstimateResult StratifiedEstimate(
    const std::map<StratumKey, std::vector<double>>& per_stratum,
    const std::map<StratumKey, double>& weights, double alpha = 0.05);

enum class Grouping { kByPopularity, kByInterest, kByStratum };

std::string_view GroupingName(Grouping grouping);

// A segment is a popularity class, an interest tag, or both.
struct Segment {
  std::optional<std::string> interest;
  std::optional<Popularity> popularity;

  std::string Label() const;

  friend auto operator<=>(const Segment&, const Segment&) = default;
  friend bool operator==(const Segment&, const Segment&) = default;
};

Segment SegmentOf(const StratumKey& stratum, Grouping grouping);

struct SegmentEffect {
  Segment segment;
  EstimateResult estimate;
  bool bh_rejected = false;
  double adjusted_p = 1.0;
};

struct ExcludedSegment {
  Segment segment;
  int64_t n = 0;
  std::string reason;
};

struct SegmentAnalysis {
  std::vector<SegmentEffect> effects;  // sorted by segment
  std::vector<ExcludedSegment> excluded;
};

// Per-segment SRS estimates of the paired delta, then Benjamini-Hochberg
// across segment p-values at level q. Segments with fewer than 2 queries
// are listed as excluded. Throws kNoSegments when nothing is left to test.
SegmentAnalysis SegmentEffects(const EvalDataset& dataset, Grouping grouping,
                               double alpha = 0.05, double q = kDefaultFdrLevel);

}  // namespace pagerel
