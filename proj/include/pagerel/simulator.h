#pragma once

// Seeded synthetic data: stratified query populations with known label
// distributions, confusion-matrix labelers standing in for a trained
// relevance model, and complete paired experiments.
//
// Every random draw comes from a substream keyed by (seed, stratum, query
// index) or (seed, query id), so output is identical for any thread count.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pagerel/core.h"

namespace pagerel {

// Probability of L1..L5.
using LabelDistribution = std::array<double, kNumLabels>;

// Mean label at rank r is top_mean - decay * (r - 1), clamped to [1, 5],
// realized as a two-point distribution on the neighbouring integer labels.
struct QualityCurve {
  double top_mean = 3.0;
  double decay = 0.0;
};

struct LabelProfile {
  // Per-rank categorical distributions; the last one repeats for deeper
  // ranks. Ignored when `curve` is set.
  std::vector<LabelDistribution> positions;
  std::optional<QualityCurve> curve;

  // 1-based rank.
  LabelDistribution AtRank(int rank) const;
};

struct StratumProfile {
  StratumKey key;
  double weight = 0.0;
  std::string market = "US";
  LabelProfile profile;
  // Overrides PopulationSpec::queries_per_stratum.
  std::optional<int64_t> queries;
};

struct PopulationSpec {
  std::vector<StratumProfile> strata;
  int64_t queries_per_stratum = 100;

  int64_t QueriesIn(const StratumProfile& s) const {
    return s.queries.value_or(queries_per_stratum);
  }
};

// Throws Error(kBadSpec) on empty or duplicate strata, weights not summing
// to 1 within 1e-9, invalid distributions or non-positive query counts.
void CheckSpec(const PopulationSpec& spec);

struct ConfusionMatrix {
  // rows[r] is the distribution of the machine label given true label r + 1.
  std::array<LabelDistribution, kNumLabels> rows{};

  static ConfusionMatrix Identity();
  // Throws Error(kBadMatrix) unless every row is a distribution (1e-9).
  void Check() const;
};

// Additive shift of every label value (clamped to [1, 5]) in treatment.
struct EffectSpec {
  double default_shift = 0.0;
  std::map<StratumKey, double> per_stratum;

  double ShiftFor(const StratumKey& key) const;
};

// Moves each label value v to v + shift, clamps to [1, 5] and splits the
// mass between the two neighbouring integer labels. Preserves the mean
// shift exactly when nothing is clamped.
LabelDistribution ShiftDistribution(const LabelDistribution& dist, double shift);

double ExpectedLabel(const LabelDistribution& dist);
double LabelVariance(const LabelDistribution& dist);

// Smallest label whose cumulative probability exceeds u, for u in [0, 1).
RelevanceLabel SampleLabel(const LabelDistribution& dist, double u);

// Exact mean and variance of sDCG@K for a full page drawn from `profile`
// (positions independent), after shifting every rank by `shift`.
struct SdcgMoments {
  double mean = 0.0;
  double variance = 0.0;
};
SdcgMoments AnalyticSdcgMoments(const LabelProfile& profile, int k_depth,
                                double shift = 0.0);

// True-label records with full pages of k_depth results. Treatment is drawn
// with the same uniforms as control from the shifted distribution, so the
// arms coincide when the shift is 0. Records come in spec order.
std::vector<QueryRecord> GeneratePopulation(const PopulationSpec& spec,
                                            int k_depth, uint64_t seed,
                                            const EffectSpec& effect = {},
                                            int threads = 1);

struct LabelerOptions {
  // Probability that a (query, arm, position) reuses the query's shared
  // uniform instead of its own. Shared draws err in the same direction
  // across positions and arms, which inflates single-group error and
  // cancels in paired differences. 0 gives i.i.d. noise.
  double rho_shared = 0.0;
};

// Treats the labels in each record's pages as truth: moves them to the
// reference pages and replaces them with labels resampled from the
// confusion row of the true label. Throws kBadMatrix, kInvalidArgument.
std::vector<QueryRecord> ApplyLabeler(std::vector<QueryRecord> records,
                                      const ConfusionMatrix& confusion,
                                      uint64_t seed,
                                      const LabelerOptions& options = {},
                                      int threads = 1);

// Diagonal mass exact_target, adjacent mass within_one_target - exact_target
// (split between both neighbours, or all to the single neighbour of L1 and
// L5), the rest uniform over non-adjacent labels. Throws kInfeasibleTargets.
ConfusionMatrix CalibrateConfusion(double exact_target, double within_one_target);

// Expected agreement rates under a uniform true-label prior.
double ExpectedExactRate(const ConfusionMatrix& confusion);
double ExpectedWithinOneRate(const ConfusionMatrix& confusion);

EvalDataset RunSyntheticExperiment(const PopulationSpec& spec,
                                   const EffectSpec& effect,
                                   const ConfusionMatrix& confusion,
                                   int k_depth, uint64_t seed,
                                   const LabelerOptions& options = {},
                                   int threads = 1);

}  // namespace pagerel
