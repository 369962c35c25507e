#include "pagerel/sampling.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "pagerel/rng.h"

namespace pagerel {

VarianceDecomposition DecomposeVariance(
    std::span<const std::pair<StratumKey, double>> values) {
  if (values.empty()) {
    throw Error(ErrorCode::kEmptyInput, "no values to decompose");
  }
  const double n_total = static_cast<double>(values.size());
  double grand_mean = 0.0;
  for (const auto& [key, v] : values) grand_mean += v;
  grand_mean /= n_total;

  struct Moments {
    double count = 0;
    double sum = 0;
    double mean = 0;
    double sq_dev = 0;
  };
  std::map<StratumKey, Moments> strata;
  for (const auto& [key, v] : values) {
    Moments& m = strata[key];
    m.count += 1;
    m.sum += v;
  }
  for (auto& [key, m] : strata) m.mean = m.sum / m.count;
  double total_sq_dev = 0.0;
  for (const auto& [key, v] : values) {
    const double d = v - strata[key].mean;
    strata[key].sq_dev += d * d;
    total_sq_dev += (v - grand_mean) * (v - grand_mean);
  }

  VarianceDecomposition out;
  for (const auto& [key, m] : strata) {
    const double share = m.count / n_total;
    out.within += share * (m.sq_dev / m.count);
    out.between += share * (m.mean - grand_mean) * (m.mean - grand_mean);
  }
  out.total = total_sq_dev / n_total;
  return out;
}

void CheckDesign(std::span<const StratumSpec> strata) {
  if (strata.empty()) {
    throw Error(ErrorCode::kInvalidDesign, "design has no strata");
  }
  std::set<StratumKey> keys;
  double weight_sum = 0.0;
  for (const StratumSpec& s : strata) {
    if (!keys.insert(s.key).second) {
      throw Error(ErrorCode::kInvalidDesign,
                  "stratum " + s.key.ToString() + " listed twice");
    }
    if (s.key.interest.empty()) {
      throw Error(ErrorCode::kInvalidDesign, "stratum interest is empty");
    }
    if (!(s.weight > 0.0 && s.weight <= 1.0)) {
      throw Error(ErrorCode::kInvalidDesign,
                  "weight of " + s.key.ToString() + " must lie in (0, 1]");
    }
    if (s.sigma && !(*s.sigma >= 0.0 && std::isfinite(*s.sigma))) {
      throw Error(ErrorCode::kInvalidDesign,
                  "sigma of " + s.key.ToString() + " must be finite and >= 0");
    }
    weight_sum += s.weight;
  }
  if (std::fabs(weight_sum - 1.0) > 1e-9) {
    throw Error(ErrorCode::kInvalidDesign,
                "stratum weights sum to " + std::to_string(weight_sum) +
                    ", expected 1");
  }
}

namespace {

// Largest-remainder rounding of `targets` over the indices in `members`,
// so the rounded values sum to `budget`.
void RoundLargestRemainder(const std::vector<double>& targets,
                           const std::vector<size_t>& members, int64_t budget,
                           int64_t min_count, std::vector<int64_t>& counts) {
  int64_t assigned = 0;
  std::vector<std::pair<double, size_t>> remainders;
  for (size_t i : members) {
    const double t = std::max(targets[i], static_cast<double>(min_count));
    const double floor_value = std::floor(t);
    counts[i] = static_cast<int64_t>(floor_value);
    assigned += counts[i];
    remainders.emplace_back(t - floor_value, i);
  }
  // Members are in key order, so a stable sort breaks ties by key.
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  int64_t leftover = budget - assigned;
  // Floors can overshoot by a unit when a target sits just above an integer
  // through rounding; take it back from the smallest remainder.
  for (auto r = remainders.rbegin(); leftover < 0 && r != remainders.rend(); ++r) {
    if (counts[r->second] > min_count) {
      --counts[r->second];
      ++leftover;
    }
  }
  for (size_t r = 0; leftover > 0 && !remainders.empty(); r = (r + 1) % remainders.size(), --leftover) {
    ++counts[remainders[r].second];
  }
}

// Moves single units while that strictly lowers sum(cost_k / n_k).
void PolishAllocation(const std::vector<double>& cost, int64_t min_count,
                      std::vector<int64_t>& counts) {
  const size_t m = counts.size();
  for (int guard = 0; guard < 1000000; ++guard) {
    size_t best_gain = m;
    size_t best_loss = m;
    double gain = 0.0;
    double loss = 0.0;
    for (size_t i = 0; i < m; ++i) {
      const double n = static_cast<double>(counts[i]);
      const double g = cost[i] / (n * (n + 1.0));
      if (best_gain == m || g > gain) {
        best_gain = i;
        gain = g;
      }
      if (counts[i] > min_count && counts[i] > 1) {
        const double l = cost[i] / (n * (n - 1.0));
        if (best_loss == m || l < loss) {
          best_loss = i;
          loss = l;
        }
      }
    }
    if (best_loss == m || best_gain == best_loss) return;
    if (!(gain > loss * (1.0 + 1e-12))) return;
    ++counts[best_gain];
    --counts[best_loss];
  }
}

}  // namespace

Allocation Allocate(std::span<const StratumSpec> strata, int64_t budget,
                    AllocationMode mode, int64_t min_per_stratum) {
  CheckDesign(strata);
  if (min_per_stratum < 0) {
    throw Error(ErrorCode::kInvalidArgument, "min_per_stratum must be >= 0");
  }
  const size_t m = strata.size();
  if (budget < min_per_stratum * static_cast<int64_t>(m) || budget < 1) {
    throw Error(ErrorCode::kBudgetTooSmall,
                "budget " + std::to_string(budget) + " cannot give " +
                    std::to_string(m) + " strata at least " +
                    std::to_string(min_per_stratum) + " each");
  }

  // Work in key order so every tie rule is "smaller key first".
  std::vector<size_t> order(m);
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return strata[a].key < strata[b].key;
  });
  std::vector<double> weight(m), sigma(m, 1.0);
  for (size_t i = 0; i < m; ++i) weight[i] = strata[order[i]].weight;

  Allocation result;
  if (mode == AllocationMode::kNeyman) {
    for (size_t i = 0; i < m; ++i) {
      const StratumSpec& s = strata[order[i]];
      if (!s.sigma) {
        throw Error(ErrorCode::kMissingSigma,
                    "Neyman allocation needs sigma for " + s.key.ToString());
      }
      sigma[i] = *s.sigma;
    }
    const bool all_equal = std::all_of(sigma.begin(), sigma.end(),
                                       [&](double s) { return s == sigma[0]; });
    double score_sum = 0.0;
    for (size_t i = 0; i < m; ++i) score_sum += weight[i] * sigma[i];
    if (score_sum == 0.0) result.fell_back_to_proportional = true;
    // Equal sigmas cancel; drop them so the result matches Proportional
    // bit for bit.
    if (all_equal || score_sum == 0.0) std::fill(sigma.begin(), sigma.end(), 1.0);
  }

  std::vector<double> score(m);
  for (size_t i = 0; i < m; ++i) score[i] = weight[i] * sigma[i];

  std::vector<bool> pinned(m, false);
  std::vector<double> target(m, 0.0);
  for (;;) {
    std::vector<size_t> free_idx;
    double free_score = 0.0;
    int64_t free_budget = budget;
    for (size_t i = 0; i < m; ++i) {
      if (pinned[i]) {
        free_budget -= min_per_stratum;
      } else {
        free_idx.push_back(i);
        free_score += score[i];
      }
    }
    bool changed = false;
    for (size_t i : free_idx) {
      target[i] = free_score > 0.0
                      ? static_cast<double>(free_budget) * score[i] / free_score
                      : static_cast<double>(free_budget) / free_idx.size();
      if (target[i] < static_cast<double>(min_per_stratum) * (1.0 - 1e-12)) {
        pinned[i] = true;
        changed = true;
      }
    }
    if (!changed) {
      std::vector<int64_t> counts(m, min_per_stratum);
      RoundLargestRemainder(target, free_idx, free_budget, min_per_stratum, counts);
      std::vector<double> cost(m);
      for (size_t i = 0; i < m; ++i) cost[i] = score[i] * score[i];
      PolishAllocation(cost, min_per_stratum, counts);
      for (size_t i = 0; i < m; ++i) {
        result.per_stratum[strata[order[i]].key] = counts[i];
      }
      break;
    }
  }
  result.total = budget;
  return result;
}

double StratifiedMeanVariance(std::span<const StratumSpec> strata,
                              const std::map<StratumKey, int64_t>& counts) {
  double variance = 0.0;
  for (const StratumSpec& s : strata) {
    auto it = counts.find(s.key);
    if (it == counts.end() || it->second < 1) {
      throw Error(ErrorCode::kInvalidArgument,
                  "no sample allocated to " + s.key.ToString());
    }
    if (!s.sigma) {
      throw Error(ErrorCode::kMissingSigma, "sigma missing for " + s.key.ToString());
    }
    const double ws = s.weight * *s.sigma;
    variance += ws * ws / static_cast<double>(it->second);
  }
  return variance;
}

std::vector<std::string> DrawSample(std::span<const PopulationUnit> population,
                                    const Allocation& allocation,
                                    uint64_t seed) {
  std::map<StratumKey, std::vector<const std::string*>> pools;
  std::set<std::string_view> ids;
  for (const PopulationUnit& unit : population) {
    if (!ids.insert(unit.query_id).second) {
      throw Error(ErrorCode::kDuplicateQueryId,
                  "query " + unit.query_id + " appears twice in the population");
    }
    pools[unit.stratum].push_back(&unit.query_id);
  }

  std::vector<std::string> sample;
  sample.reserve(static_cast<size_t>(std::max<int64_t>(allocation.total, 0)));
  for (const auto& [key, count] : allocation.per_stratum) {
    if (count <= 0) continue;
    auto it = pools.find(key);
    const size_t available = it == pools.end() ? 0 : it->second.size();
    if (available < static_cast<size_t>(count)) {
      throw Error(ErrorCode::kStratumExhausted,
                  "stratum " + key.ToString() + " has " +
                      std::to_string(available) + " queries, " +
                      std::to_string(count) + " requested");
    }
    std::vector<const std::string*> pool = it->second;
    Rng rng = Rng::Substream(seed, {HashString(key.ToString())});
    for (size_t i = 0; i < static_cast<size_t>(count); ++i) {
      const size_t j = i + rng.Below(pool.size() - i);
      std::swap(pool[i], pool[j]);
      sample.push_back(*pool[i]);
    }
  }
  return sample;
}

}  // namespace pagerel
