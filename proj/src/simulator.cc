#include "pagerel/simulator.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "pagerel/parallel.h"
#include "pagerel/rng.h"

namespace pagerel {
namespace {

constexpr uint64_t kTruthStream = 1;
constexpr uint64_t kLabelerStream = 2;

bool IsDistribution(const LabelDistribution& dist) {
  double sum = 0.0;
  for (double p : dist) {
    if (!(p >= 0.0) || !std::isfinite(p)) return false;
    sum += p;
  }
  return std::fabs(sum - 1.0) <= 1e-9;
}

LabelDistribution TwoPoint(double mean) {
  const double m = std::clamp(mean, 1.0, 5.0);
  LabelDistribution dist{};
  const double lower = std::floor(m);
  const double frac = m - lower;
  const int lower_index = static_cast<int>(lower) - 1;
  if (frac == 0.0 || lower_index == kNumLabels - 1) {
    dist[static_cast<size_t>(lower_index)] = 1.0;
  } else {
    dist[static_cast<size_t>(lower_index)] = 1.0 - frac;
    dist[static_cast<size_t>(lower_index + 1)] = frac;
  }
  return dist;
}

std::string QueryId(const StratumKey& key, int64_t index) {
  char suffix[32];
  std::snprintf(suffix, sizeof(suffix), "-%06lld", static_cast<long long>(index));
  return key.interest + "-" + std::string(PopularityName(key.popularity)) + suffix;
}

double Discount(int rank) { return 1.0 / std::log2(static_cast<double>(rank) + 1.0); }

}  // namespace

LabelDistribution LabelProfile::AtRank(int rank) const {
  if (curve) return TwoPoint(curve->top_mean - curve->decay * (rank - 1));
  if (positions.empty()) {
    throw Error(ErrorCode::kBadSpec, "label profile has no distributions");
  }
  const size_t i = std::min(static_cast<size_t>(std::max(rank, 1) - 1),
                            positions.size() - 1);
  return positions[i];
}

void CheckSpec(const PopulationSpec& spec) {
  if (spec.strata.empty()) throw Error(ErrorCode::kBadSpec, "spec has no strata");
  std::set<StratumKey> keys;
  double weight_sum = 0.0;
  for (const StratumProfile& s : spec.strata) {
    const std::string name = s.key.ToString();
    if (s.key.interest.empty()) {
      throw Error(ErrorCode::kBadSpec, "stratum interest is empty");
    }
    if (!keys.insert(s.key).second) {
      throw Error(ErrorCode::kBadSpec, "stratum " + name + " listed twice");
    }
    if (!(s.weight > 0.0 && s.weight <= 1.0)) {
      throw Error(ErrorCode::kBadSpec, "weight of " + name + " must lie in (0, 1]");
    }
    weight_sum += s.weight;
    if (spec.QueriesIn(s) < 1) {
      throw Error(ErrorCode::kBadSpec, "stratum " + name + " needs >= 1 query");
    }
    if (s.profile.curve) {
      if (!std::isfinite(s.profile.curve->top_mean) ||
          !std::isfinite(s.profile.curve->decay)) {
        throw Error(ErrorCode::kBadSpec, "quality curve of " + name + " is not finite");
      }
    } else {
      if (s.profile.positions.empty()) {
        throw Error(ErrorCode::kBadSpec, "stratum " + name + " has no label profile");
      }
      for (const LabelDistribution& d : s.profile.positions) {
        if (!IsDistribution(d)) {
          throw Error(ErrorCode::kBadSpec,
                      "label distribution of " + name + " does not sum to 1");
        }
      }
    }
  }
  if (std::fabs(weight_sum - 1.0) > 1e-9) {
    throw Error(ErrorCode::kBadSpec, "stratum weights sum to " +
                                         std::to_string(weight_sum) + ", expected 1");
  }
}

ConfusionMatrix ConfusionMatrix::Identity() {
  ConfusionMatrix m;
  for (int r = 0; r < kNumLabels; ++r) m.rows[r][r] = 1.0;
  return m;
}

void ConfusionMatrix::Check() const {
  for (int r = 0; r < kNumLabels; ++r) {
    if (!IsDistribution(rows[r])) {
      throw Error(ErrorCode::kBadMatrix,
                  "confusion row L" + std::to_string(r + 1) +
                      " is not a probability distribution");
    }
  }
}

double EffectSpec::ShiftFor(const StratumKey& key) const {
  auto it = per_stratum.find(key);
  return it == per_stratum.end() ? default_shift : it->second;
}

LabelDistribution ShiftDistribution(const LabelDistribution& dist, double shift) {
  if (shift == 0.0) return dist;
  LabelDistribution out{};
  for (int l = 0; l < kNumLabels; ++l) {
    if (dist[l] == 0.0) continue;
    const LabelDistribution moved = TwoPoint(static_cast<double>(l + 1) + shift);
    for (int j = 0; j < kNumLabels; ++j) out[j] += dist[l] * moved[j];
  }
  return out;
}

double ExpectedLabel(const LabelDistribution& dist) {
  double mean = 0.0;
  for (int l = 0; l < kNumLabels; ++l) mean += (l + 1) * dist[l];
  return mean;
}

double LabelVariance(const LabelDistribution& dist) {
  const double mean = ExpectedLabel(dist);
  double var = 0.0;
  for (int l = 0; l < kNumLabels; ++l) {
    var += dist[l] * (l + 1 - mean) * (l + 1 - mean);
  }
  return var;
}

RelevanceLabel SampleLabel(const LabelDistribution& dist, double u) {
  double cumulative = 0.0;
  int last_positive = 0;
  for (int l = 0; l < kNumLabels; ++l) {
    if (dist[l] <= 0.0) continue;
    last_positive = l;
    cumulative += dist[l];
    if (u < cumulative) return RelevanceLabel::FromLevel(l + 1);
  }
  return RelevanceLabel::FromLevel(last_positive + 1);
}

SdcgMoments AnalyticSdcgMoments(const LabelProfile& profile, int k_depth,
                                double shift) {
  if (k_depth < 1) throw Error(ErrorCode::kInvalidArgument, "k_depth must be >= 1");
  double discount_sum = 0.0, mean = 0.0, variance = 0.0;
  for (int r = 1; r <= k_depth; ++r) {
    const LabelDistribution dist = ShiftDistribution(profile.AtRank(r), shift);
    const double d = Discount(r);
    discount_sum += d;
    mean += d * ExpectedLabel(dist);
    variance += d * d * LabelVariance(dist);
  }
  const double ideal = kMaxLabel * discount_sum;
  return {mean / ideal, variance / (ideal * ideal)};
}

std::vector<QueryRecord> GeneratePopulation(const PopulationSpec& spec,
                                            int k_depth, uint64_t seed,
                                            const EffectSpec& effect,
                                            int threads) {
  CheckSpec(spec);
  if (k_depth < 1) throw Error(ErrorCode::kInvalidArgument, "k_depth must be >= 1");

  struct Task {
    const StratumProfile* stratum;
    size_t profile_index;
    int64_t query_index;
  };
  std::vector<std::vector<LabelDistribution>> control_dists, treatment_dists;
  std::vector<Task> tasks;
  for (size_t s = 0; s < spec.strata.size(); ++s) {
    const StratumProfile& stratum = spec.strata[s];
    const double shift = effect.ShiftFor(stratum.key);
    std::vector<LabelDistribution> control(k_depth), treatment(k_depth);
    for (int r = 1; r <= k_depth; ++r) {
      control[r - 1] = stratum.profile.AtRank(r);
      treatment[r - 1] = ShiftDistribution(control[r - 1], shift);
    }
    control_dists.push_back(std::move(control));
    treatment_dists.push_back(std::move(treatment));
    for (int64_t q = 0; q < spec.QueriesIn(stratum); ++q) {
      tasks.push_back({&stratum, s, q});
    }
  }

  std::vector<QueryRecord> records(tasks.size());
  ParallelFor(tasks.size(), threads, [&](size_t t) {
    const Task& task = tasks[t];
    const StratumKey& key = task.stratum->key;
    Rng rng = Rng::Substream(
        seed, {HashString(key.ToString()), static_cast<uint64_t>(task.query_index),
               kTruthStream});
    QueryRecord& rec = records[t];
    rec.query_id = QueryId(key, task.query_index);
    rec.market = task.stratum->market;
    rec.stratum = key;
    RankedPage treatment;
    rec.control.labels.reserve(static_cast<size_t>(k_depth));
    treatment.labels.reserve(static_cast<size_t>(k_depth));
    for (int r = 0; r < k_depth; ++r) {
      const double u = rng.Uniform();
      rec.control.labels.push_back(SampleLabel(control_dists[task.profile_index][r], u));
      treatment.labels.push_back(SampleLabel(treatment_dists[task.profile_index][r], u));
    }
    rec.treatment = std::move(treatment);
  });
  return records;
}

std::vector<QueryRecord> ApplyLabeler(std::vector<QueryRecord> records,
                                      const ConfusionMatrix& confusion,
                                      uint64_t seed,
                                      const LabelerOptions& options,
                                      int threads) {
  confusion.Check();
  if (!(options.rho_shared >= 0.0 && options.rho_shared <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "rho_shared must lie in [0, 1]");
  }
  ParallelFor(records.size(), threads, [&](size_t i) {
    QueryRecord& rec = records[i];
    Rng rng = Rng::Substream(seed, {HashString(rec.query_id), kLabelerStream});
    const double shared = rng.Uniform();
    // Two uniforms per label regardless of rho, so streams stay aligned.
    auto relabel = [&](const RankedPage& truth) {
      RankedPage machine;
      machine.labels.reserve(truth.size());
      for (RelevanceLabel label : truth.labels) {
        const double share_draw = rng.Uniform();
        const double own = rng.Uniform();
        const double u = share_draw < options.rho_shared ? shared : own;
        machine.labels.push_back(SampleLabel(confusion.rows[label.index()], u));
      }
      return machine;
    };
    rec.reference_control = rec.control;
    rec.control = relabel(*rec.reference_control);
    if (rec.treatment) {
      rec.reference_treatment = rec.treatment;
      rec.treatment = relabel(*rec.reference_treatment);
    } else {
      rec.reference_treatment.reset();
    }
  });
  return records;
}

ConfusionMatrix CalibrateConfusion(double exact_target, double within_one_target) {
  if (!(exact_target > 0.0 && exact_target <= within_one_target &&
        within_one_target <= 1.0)) {
    throw Error(ErrorCode::kInfeasibleTargets,
                "need 0 < exact <= within_one <= 1");
  }
  const double adjacent = within_one_target - exact_target;
  const double off = 1.0 - within_one_target;
  ConfusionMatrix m;
  for (int r = 0; r < kNumLabels; ++r) {
    std::vector<int> neighbours, far;
    for (int c = 0; c < kNumLabels; ++c) {
      if (c == r) continue;
      (std::abs(c - r) == 1 ? neighbours : far).push_back(c);
    }
    m.rows[r][r] = exact_target;
    for (int c : neighbours) m.rows[r][c] = adjacent / neighbours.size();
    for (int c : far) m.rows[r][c] = off / far.size();
  }
  return m;
}

double ExpectedExactRate(const ConfusionMatrix& confusion) {
  double rate = 0.0;
  for (int r = 0; r < kNumLabels; ++r) rate += confusion.rows[r][r];
  return rate / kNumLabels;
}

double ExpectedWithinOneRate(const ConfusionMatrix& confusion) {
  double rate = 0.0;
  for (int r = 0; r < kNumLabels; ++r) {
    for (int c = std::max(0, r - 1); c <= std::min(kNumLabels - 1, r + 1); ++c) {
      rate += confusion.rows[r][c];
    }
  }
  return rate / kNumLabels;
}

EvalDataset RunSyntheticExperiment(const PopulationSpec& spec,
                                   const EffectSpec& effect,
                                   const ConfusionMatrix& confusion,
                                   int k_depth, uint64_t seed,
                                   const LabelerOptions& options, int threads) {
  confusion.Check();
  EvalDataset dataset;
  dataset.k_depth = k_depth;
  dataset.records = ApplyLabeler(
      GeneratePopulation(spec, k_depth, seed, effect, threads), confusion,
      seed, options, threads);
  return dataset;
}

}  // namespace pagerel
