#include "pagerel/alignment.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "pagerel/metrics.h"
#include "pagerel/parallel.h"

namespace pagerel {
namespace {

void CheckPairs(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "x has " + std::to_string(x.size()) + " values, y has " +
                    std::to_string(y.size()));
  }
  if (x.size() < 2) {
    throw Error(ErrorCode::kTooFewSamples, "need at least 2 pairs");
  }
  for (size_t i = 0; i < x.size(); ++i) {
    if (std::isnan(x[i]) || std::isnan(y[i])) {
      throw Error(ErrorCode::kInvalidArgument, "NaN in correlation input");
    }
  }
}

// Pairs within runs of equal values: sum of t (t - 1) / 2.
int64_t TiedPairs(std::span<const double> sorted) {
  int64_t pairs = 0;
  size_t run = 1;
  for (size_t i = 1; i <= sorted.size(); ++i) {
    if (i < sorted.size() && sorted[i] == sorted[i - 1]) {
      ++run;
    } else {
      pairs += static_cast<int64_t>(run) * static_cast<int64_t>(run - 1) / 2;
      run = 1;
    }
  }
  return pairs;
}

// Stable bottom-up merge sort returning the number of strict inversions.
int64_t SortCountingInversions(std::vector<double>& values) {
  const size_t n = values.size();
  std::vector<double> buffer(n);
  int64_t inversions = 0;
  for (size_t width = 1; width < n; width *= 2) {
    for (size_t lo = 0; lo < n; lo += 2 * width) {
      const size_t mid = std::min(lo + width, n);
      const size_t hi = std::min(lo + 2 * width, n);
      size_t i = lo, j = mid, k = lo;
      while (i < mid && j < hi) {
        if (values[j] < values[i]) {
          inversions += static_cast<int64_t>(mid - i);
          buffer[k++] = values[j++];
        } else {
          buffer[k++] = values[i++];
        }
      }
      while (i < mid) buffer[k++] = values[i++];
      while (j < hi) buffer[k++] = values[j++];
    }
    values.swap(buffer);
  }
  return inversions;
}

}  // namespace

double KendallTau(std::span<const double> x, std::span<const double> y) {
  CheckPairs(x, y);
  const size_t n = x.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return x[a] < x[b] || (x[a] == x[b] && y[a] < y[b]);
  });

  std::vector<double> xs(n), ys(n);
  for (size_t i = 0; i < n; ++i) {
    xs[i] = x[order[i]];
    ys[i] = y[order[i]];
  }
  const int64_t x_ties = TiedPairs(xs);
  int64_t joint_ties = 0;
  size_t run = 1;
  for (size_t i = 1; i <= n; ++i) {
    if (i < n && xs[i] == xs[i - 1] && ys[i] == ys[i - 1]) {
      ++run;
    } else {
      joint_ties += static_cast<int64_t>(run) * static_cast<int64_t>(run - 1) / 2;
      run = 1;
    }
  }
  // Inversions in y after sorting by (x, y) are exactly the discordant pairs.
  const int64_t discordant = SortCountingInversions(ys);
  const int64_t y_ties = TiedPairs(ys);

  const int64_t all_pairs = static_cast<int64_t>(n) * static_cast<int64_t>(n - 1) / 2;
  if (x_ties == all_pairs || y_ties == all_pairs) {
    throw Error(ErrorCode::kAllTied, "Kendall tau undefined: a variable is constant");
  }
  const int64_t concordant_minus_discordant =
      all_pairs - x_ties - y_ties + joint_ties - 2 * discordant;
  // One square root of the product keeps identical inputs at exactly 1.
  const long double denom =
      std::sqrt(static_cast<long double>(all_pairs - x_ties) *
                static_cast<long double>(all_pairs - y_ties));
  return std::clamp(static_cast<double>(
                        static_cast<long double>(concordant_minus_discordant) / denom),
                    -1.0, 1.0);
}

std::vector<double> MidRanks(std::span<const double> values) {
  const size_t n = values.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  size_t start = 0;
  while (start < n) {
    size_t end = start + 1;
    while (end < n && values[order[end]] == values[order[start]]) ++end;
    // Positions start+1 .. end share their average.
    const double rank = (static_cast<double>(start + 1) + static_cast<double>(end)) / 2.0;
    for (size_t i = start; i < end; ++i) ranks[order[i]] = rank;
    start = end;
  }
  return ranks;
}

double SpearmanRho(std::span<const double> x, std::span<const double> y) {
  CheckPairs(x, y);
  const std::vector<double> rx = MidRanks(x);
  const std::vector<double> ry = MidRanks(y);
  const double n = static_cast<double>(x.size());
  const double mean_x = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double mean_y = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (size_t i = 0; i < rx.size(); ++i) {
    const double dx = rx[i] - mean_x;
    const double dy = ry[i] - mean_y;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw Error(ErrorCode::kAllTied, "Spearman rho undefined: a variable is constant");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double InterpolatedQuantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw Error(ErrorCode::kEmptyInput, "no values");
  const double pos = static_cast<double>(sorted.size() - 1) * p;
  const size_t lo = static_cast<size_t>(std::floor(pos));
  const size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  if (frac == 0.0) return sorted[lo];
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

namespace {

ErrorDistribution Summarize(std::vector<double> errors, double mean) {
  ErrorDistribution d;
  d.n = static_cast<int64_t>(errors.size());
  d.mean = mean;
  double sq = 0.0;
  const double center = std::accumulate(errors.begin(), errors.end(), 0.0) /
                        static_cast<double>(errors.size());
  for (double e : errors) sq += (e - center) * (e - center);
  d.std_dev = std::sqrt(sq / static_cast<double>(errors.size()));
  std::sort(errors.begin(), errors.end());
  d.p10 = InterpolatedQuantile(errors, 0.10);
  d.median = InterpolatedQuantile(errors, 0.50);
  d.p90 = InterpolatedQuantile(errors, 0.90);
  return d;
}

}  // namespace

ErrorDistribution ErrorDistributionOf(std::span<const double> machine,
                                      std::span<const double> reference) {
  if (machine.size() != reference.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "machine and reference score lists differ in length");
  }
  if (machine.empty()) throw Error(ErrorCode::kEmptyInput, "no scores");
  std::vector<double> errors(machine.size());
  for (size_t i = 0; i < machine.size(); ++i) errors[i] = machine[i] - reference[i];
  const double n = static_cast<double>(machine.size());
  const double mean = std::accumulate(machine.begin(), machine.end(), 0.0) / n -
                      std::accumulate(reference.begin(), reference.end(), 0.0) / n;
  return Summarize(std::move(errors), mean);
}

ErrorDistribution ErrorDistributionOf(std::span<const double> errors) {
  if (errors.empty()) throw Error(ErrorCode::kEmptyInput, "no errors");
  const double mean = std::accumulate(errors.begin(), errors.end(), 0.0) /
                      static_cast<double>(errors.size());
  return Summarize(std::vector<double>(errors.begin(), errors.end()), mean);
}

AgreementStats LabelAgreement(std::span<const RelevanceLabel> machine,
                              std::span<const RelevanceLabel> reference) {
  if (machine.size() != reference.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "machine and reference label lists differ in length");
  }
  if (machine.empty()) throw Error(ErrorCode::kEmptyInput, "no labels");
  AgreementStats stats;
  int64_t exact = 0, within_one = 0;
  for (size_t i = 0; i < machine.size(); ++i) {
    const int diff = machine[i].level() - reference[i].level();
    exact += diff == 0;
    within_one += diff >= -1 && diff <= 1;
    ++stats.confusion[reference[i].index()][machine[i].index()];
  }
  stats.total = static_cast<int64_t>(machine.size());
  stats.exact_rate = static_cast<double>(exact) / static_cast<double>(stats.total);
  stats.within_one_rate =
      static_cast<double>(within_one) / static_cast<double>(stats.total);
  return stats;
}

std::vector<int64_t> Histogram(std::span<const double> values, int bins,
                               double lo, double hi) {
  if (bins < 1 || !(hi > lo)) {
    throw Error(ErrorCode::kInvalidArgument, "histogram needs bins >= 1 and hi > lo");
  }
  std::vector<int64_t> counts(static_cast<size_t>(bins), 0);
  const double width = (hi - lo) / bins;
  for (double v : values) {
    long bin = static_cast<long>(std::floor((v - lo) / width));
    bin = std::clamp<long>(bin, 0, bins - 1);
    ++counts[static_cast<size_t>(bin)];
  }
  return counts;
}

std::string_view AlignmentGroupingName(AlignmentGrouping grouping) {
  return grouping == AlignmentGrouping::kByMarket ? "market" : "popularity";
}

namespace {

struct ScoredQuery {
  double machine = 0.0;
  double reference = 0.0;
  std::optional<double> paired_error;
};

void AppendAgreementLabels(const QueryRecord& r,
                           std::vector<RelevanceLabel>& machine,
                           std::vector<RelevanceLabel>& reference) {
  machine.insert(machine.end(), r.control.labels.begin(), r.control.labels.end());
  reference.insert(reference.end(), r.reference_control->labels.begin(),
                   r.reference_control->labels.end());
  if (r.treatment && r.reference_treatment) {
    machine.insert(machine.end(), r.treatment->labels.begin(),
                   r.treatment->labels.end());
    reference.insert(reference.end(), r.reference_treatment->labels.begin(),
                     r.reference_treatment->labels.end());
  }
}

}  // namespace

AlignmentReport BuildAlignmentReport(const EvalDataset& dataset,
                                     AlignmentGrouping grouping, int threads) {
  for (const QueryRecord& r : dataset.records) {
    if (!r.reference_control) {
      throw Error(ErrorCode::kLabelSourceMismatch,
                  "query " + r.query_id + " has no reference labels");
    }
  }
  const size_t n = dataset.records.size();
  const int k = dataset.k_depth;
  std::vector<ScoredQuery> scored(n);
  ParallelFor(n, threads, [&](size_t i) {
    const QueryRecord& r = dataset.records[i];
    ScoredQuery& s = scored[i];
    s.machine = SdcgAtK(r.control, k).value;
    s.reference = SdcgAtK(*r.reference_control, k).value;
    if (r.treatment && r.reference_treatment) {
      const double machine_delta = SdcgAtK(*r.treatment, k).value - s.machine;
      const double reference_delta =
          SdcgAtK(*r.reference_treatment, k).value - s.reference;
      s.paired_error = machine_delta - reference_delta;
    }
  });

  AlignmentReport report;
  report.k_depth = k;
  report.grouping = grouping;
  report.query_errors.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    const QueryRecord& r = dataset.records[i];
    report.query_errors.push_back(QueryError{
        r.query_id, r.market, r.stratum.popularity, scored[i].machine,
        scored[i].reference, scored[i].machine - scored[i].reference,
        scored[i].paired_error});
  }

  std::vector<std::string> markets;
  if (grouping == AlignmentGrouping::kByMarket) {
    std::set<std::string> distinct;
    for (const QueryRecord& r : dataset.records) distinct.insert(r.market);
    markets.assign(distinct.begin(), distinct.end());
  } else {
    markets.push_back("ALL");
  }

  for (const std::string& market : markets) {
    std::vector<std::pair<std::string, std::optional<Popularity>>> segments = {
        {"overall", std::nullopt}};
    for (Popularity p : kAllPopularities) {
      segments.emplace_back(std::string(PopularityName(p)), p);
    }
    for (const auto& [segment_name, popularity] : segments) {
      std::vector<size_t> members;
      for (size_t i = 0; i < n; ++i) {
        const QueryRecord& r = dataset.records[i];
        if (grouping == AlignmentGrouping::kByMarket && r.market != market) continue;
        if (popularity && r.stratum.popularity != *popularity) continue;
        members.push_back(i);
      }
      if (members.empty()) continue;
      if (members.size() < 2) {
        report.excluded.push_back({market, segment_name,
                                   static_cast<int64_t>(members.size()),
                                   "fewer than 2 queries"});
        continue;
      }
      AlignmentRow row;
      row.market = market;
      row.segment = segment_name;
      row.n = static_cast<int64_t>(members.size());
      std::vector<double> machine, reference, paired;
      std::vector<RelevanceLabel> machine_labels, reference_labels;
      bool all_paired = true;
      for (size_t i : members) {
        machine.push_back(scored[i].machine);
        reference.push_back(scored[i].reference);
        if (scored[i].paired_error) {
          paired.push_back(*scored[i].paired_error);
        } else {
          all_paired = false;
        }
        AppendAgreementLabels(dataset.records[i], machine_labels, reference_labels);
      }
      try {
        row.kendall_tau = KendallTau(machine, reference);
        row.spearman_rho = SpearmanRho(machine, reference);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kAllTied) throw;
        row.kendall_tau.reset();
        row.spearman_rho.reset();
      }
      row.errors = ErrorDistributionOf(machine, reference);
      if (all_paired) row.paired_errors = ErrorDistributionOf(paired);
      row.agreement = LabelAgreement(machine_labels, reference_labels);
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

}  // namespace pagerel
