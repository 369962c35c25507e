#pragma once

// Stratified sampling design: variance decomposition into within- and
// between-strata parts, allocation of a sample budget to strata, and seeded
// stratified draws.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pagerel/core.h"

namespace pagerel {

struct StratumSpec {
  StratumKey key;
  double weight = 0.0;  // population share
  std::optional<double> sigma;
  std::optional<double> mu;
};

enum class AllocationMode { kProportional, kNeyman };

struct Allocation {
  std::map<StratumKey, int64_t> per_stratum;
  int64_t total = 0;
  // Neyman was requested but every weight * sigma was zero.
  bool fell_back_to_proportional = false;
};

struct VarianceDecomposition {
  double within = 0.0;
  double between = 0.0;
  double total = 0.0;
};

// Population (divide-by-n) variances throughout, so that
// total == within + between up to rounding. Throws kEmptyInput.
VarianceDecomposition DecomposeVariance(
    std::span<const std::pair<StratumKey, double>> values);

// Checks keys are distinct, weights lie in (0, 1] and sum to 1 within 1e-9,
// and sigmas (when present) are finite and >= 0. Throws kInvalidDesign.
void CheckDesign(std::span<const StratumSpec> strata);

// Integer allocation summing exactly to `budget`. Real-valued targets are
// proportional to weight (Proportional) or weight * sigma (Neyman); strata
// whose target is below `min_per_stratum` are pinned there and the rest is
// re-shared. Targets are rounded by largest remainder (ties to the smaller
// stratum key), then single units are moved between strata while that
// strictly lowers sum(weight^2 sigma^2 / n_k), with sigma taken as 1 in
// Proportional mode.
//
// Throws kBudgetTooSmall, kMissingSigma (Neyman), kInvalidDesign.
Allocation Allocate(std::span<const StratumSpec> strata, int64_t budget,
                    AllocationMode mode, int64_t min_per_stratum = 2);

// sum_k weight_k^2 sigma_k^2 / n_k for a given allocation.
double StratifiedMeanVariance(std::span<const StratumSpec> strata,
                              const std::map<StratumKey, int64_t>& counts);

struct PopulationUnit {
  std::string query_id;
  StratumKey stratum;
};

// Simple random sampling without replacement inside each stratum, using a
// substream derived from (seed, stratum key). Output is ordered by stratum
// key, then draw order. Throws kStratumExhausted and kDuplicateQueryId.
std::vector<std::string> DrawSample(std::span<const PopulationUnit> population,
                                    const Allocation& allocation,
                                    uint64_t seed);

}  // namespace pagerel
