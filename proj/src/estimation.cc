#include "pagerel/estimation.h"

#include <algorithm>
#include <cmath>

#include "pagerel/distributions.h"
#include "pagerel/metrics.h"

namespace pagerel {
namespace {

void CheckAlpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "alpha must lie in (0, 1)");
  }
}

bool AllEqual(std::span<const double> values) {
  return std::all_of(values.begin(), values.end(),
                     [&](double v) { return v == values.front(); });
}

struct SampleMoments {
  double mean = 0.0;
  double variance = 0.0;  // n - 1 denominator
  bool constant = false;
};

SampleMoments Moments(std::span<const double> values) {
  SampleMoments m;
  const double n = static_cast<double>(values.size());
  for (double v : values) m.mean += v;
  m.mean /= n;
  m.constant = AllEqual(values);
  if (m.constant) {
    m.mean = values.front();
    return m;
  }
  double sq = 0.0;
  for (double v : values) sq += (v - m.mean) * (v - m.mean);
  m.variance = sq / (n - 1.0);
  return m;
}

void MarkDegenerate(EstimateResult& r) {
  r.std_error = 0.0;
  r.ci_low = r.ci_high = r.mean;
  r.p_value = r.mean == 0.0 ? 1.0 : 0.0;
  r.statistic.reset();
  r.degenerate = true;
}

}  // namespace

std::string_view EstimatorName(Estimator estimator) {
  return estimator == Estimator::kSrs ? "srs" : "stratified";
}

EstimateResult SrsEstimate(std::span<const double> deltas, double alpha) {
  CheckAlpha(alpha);
  if (deltas.size() < 2) {
    throw Error(ErrorCode::kTooFewSamples,
                "SRS estimate needs at least 2 deltas, got " +
                    std::to_string(deltas.size()));
  }
  const SampleMoments m = Moments(deltas);
  EstimateResult r;
  r.estimator = Estimator::kSrs;
  r.n = static_cast<int64_t>(deltas.size());
  r.mean = m.mean;
  if (m.constant || m.variance == 0.0) {
    MarkDegenerate(r);
    return r;
  }
  const double df = static_cast<double>(deltas.size() - 1);
  r.std_error = std::sqrt(m.variance / static_cast<double>(deltas.size()));
  const double t = r.mean / r.std_error;
  r.statistic = t;
  r.p_value = std::clamp(StudentTTwoSidedP(t, df), 0.0, 1.0);
  const double half_width = StudentTQuantile(1.0 - alpha / 2.0, df) * r.std_error;
  r.ci_low = r.mean - half_width;
  r.ci_high = r.mean + half_width;
  return r;
}

EstimateResult StratifiedEstimate(
    const std::map<StratumKey, std::vector<double>>& per_stratum,
    const std::map<StratumKey, double>& weights, double alpha) {
  CheckAlpha(alpha);
  if (per_stratum.empty()) {
    throw Error(ErrorCode::kEmptyInput, "no strata given");
  }
  double weight_sum = 0.0;
  for (const auto& [key, w] : weights) {
    if (!per_stratum.contains(key)) {
      throw Error(ErrorCode::kWeightMismatch,
                  "weight given for stratum " + key.ToString() +
                      " which has no sample");
    }
    if (!(w > 0.0 && w <= 1.0)) {
      throw Error(ErrorCode::kWeightMismatch,
                  "weight of " + key.ToString() + " must lie in (0, 1]");
    }
    weight_sum += w;
  }
  for (const auto& [key, values] : per_stratum) {
    if (!weights.contains(key)) {
      throw Error(ErrorCode::kWeightMismatch,
                  "no weight for sampled stratum " + key.ToString());
    }
  }
  if (std::fabs(weight_sum - 1.0) > 1e-9) {
    throw Error(ErrorCode::kWeightMismatch,
                "stratum weights sum to " + std::to_string(weight_sum));
  }

  EstimateResult r;
  r.estimator = Estimator::kStratified;
  double variance = 0.0;
  bool all_constant = true;
  for (const auto& [key, values] : per_stratum) {
    if (values.size() < 2) {
      throw Error(ErrorCode::kTooFewSamplesInStratum,
                  "stratum " + key.ToString() + " has " +
                      std::to_string(values.size()) + " sample(s), need 2");
    }
    const double w = weights.at(key);
    const SampleMoments m = Moments(values);
    r.mean += w * m.mean;
    variance += w * w * m.variance / static_cast<double>(values.size());
    all_constant = all_constant && m.constant;
    r.n += static_cast<int64_t>(values.size());
  }
  if (all_constant || variance == 0.0) {
    MarkDegenerate(r);
    return r;
  }
  r.std_error = std::sqrt(variance);
  const double z = r.mean / r.std_error;
  r.statistic = z;
  r.p_value = std::clamp(2.0 * NormalSurvival(std::fabs(z)), 0.0, 1.0);
  const double half_width = NormalQuantile(1.0 - alpha / 2.0) * r.std_error;
  r.ci_low = r.mean - half_width;
  r.ci_high = r.mean + half_width;
  return r;
}

std::string_view GroupingName(Grouping grouping) {
  switch (grouping) {
    case Grouping::kByPopularity: return "popularity";
    case Grouping::kByInterest: return "interest";
    case Grouping::kByStratum: return "stratum";
  }
  return "popularity";
}

std::string Segment::Label() const {
  std::string label;
  if (interest) label = *interest;
  if (popularity) {
    if (!label.empty()) label += "/";
    label += PopularityName(*popularity);
  }
  return label;
}

Segment SegmentOf(const StratumKey& stratum, Grouping grouping) {
  Segment s;
  if (grouping != Grouping::kByPopularity) s.interest = stratum.interest;
  if (grouping != Grouping::kByInterest) s.popularity = stratum.popularity;
  return s;
}

SegmentAnalysis SegmentEffects(const EvalDataset& dataset, Grouping grouping,
                               double alpha, double q) {
  CheckAlpha(alpha);
  std::map<Segment, std::vector<double>> deltas;
  for (const QueryRecord& record : dataset.records) {
    deltas[SegmentOf(record.stratum, grouping)].push_back(
        PairedDelta(record, dataset.k_depth));
  }

  SegmentAnalysis analysis;
  for (const auto& [segment, values] : deltas) {
    if (values.size() < 2) {
      analysis.excluded.push_back(
          {segment, static_cast<int64_t>(values.size()),
           "fewer than 2 paired queries"});
      continue;
    }
    SegmentEffect effect;
    effect.segment = segment;
    effect.estimate = SrsEstimate(values, alpha);
    analysis.effects.push_back(std::move(effect));
  }
  if (analysis.effects.empty()) {
    throw Error(ErrorCode::kNoSegments,
                "no segment has the 2 paired queries needed for a test");
  }

  std::vector<double> p_values;
  p_values.reserve(analysis.effects.size());
  for (const SegmentEffect& e : analysis.effects) {
    p_values.push_back(e.estimate.p_value);
  }
  const BhResult bh = BenjaminiHochberg(p_values, q);
  for (size_t i = 0; i < analysis.effects.size(); ++i) {
    analysis.effects[i].bh_rejected = bh.rejected[i];
    analysis.effects[i].adjusted_p = bh.adjusted_p[i];
  }
  return analysis;
}

}  // namespace pagerel
