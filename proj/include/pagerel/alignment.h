#pragma once

// Agreement between a machine label source and a reference (human) label
// source: label-level agreement, rank correlation of query-level sDCG, and
// distributions of query-level sDCG errors.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pagerel/core.h"

namespace pagerel {

// Tau-b, O(n log n): sort by (x, y) and count discordant pairs with a merge
// sort over y. Throws kLengthMismatch, kTooFewSamples (n < 2), kAllTied
// (either side constant) and kInvalidArgument for NaN input.
double KendallTau(std::span<const double> x, std::span<const double> y);

// Average ranks; ties share the mean of the positions they span (1-based).
std::vector<double> MidRanks(std::span<const double> values);

// Pearson correlation of midranks. Same errors as KendallTau.
double SpearmanRho(std::span<const double> x, std::span<const double> y);

struct ErrorDistribution {
  double mean = 0.0;
  double p10 = 0.0;
  double median = 0.0;
  double p90 = 0.0;
  double std_dev = 0.0;  // population standard deviation of the errors
  int64_t n = 0;
};

// Quantile by linear interpolation between order statistics at (n - 1) p.
double InterpolatedQuantile(std::span<const double> sorted, double p);

// errors e_i = machine_i - reference_i. The mean is computed as
// mean(machine) - mean(reference). Throws kLengthMismatch and kEmptyInput.
ErrorDistribution ErrorDistributionOf(std::span<const double> machine,
                                      std::span<const double> reference);
ErrorDistribution ErrorDistributionOf(std::span<const double> errors);

struct AgreementStats {
  double exact_rate = 0.0;
  double within_one_rate = 0.0;
  // confusion[reference - 1][machine - 1]
  std::array<std::array<int64_t, kNumLabels>, kNumLabels> confusion{};
  int64_t total = 0;
};

AgreementStats LabelAgreement(std::span<const RelevanceLabel> machine,
                              std::span<const RelevanceLabel> reference);

// Counts of `values` in `bins` equal-width bins over [lo, hi]; values outside
// land in the first or last bin.
std::vector<int64_t> Histogram(std::span<const double> values, int bins,
                               double lo, double hi);

enum class AlignmentGrouping { kByPopularity, kByMarket };

std::string_view AlignmentGroupingName(AlignmentGrouping grouping);

struct AlignmentRow {
  std::string market;   // "ALL" when pooled across markets
  std::string segment;  // "overall", "head", "torso", "tail", "single"
  int64_t n = 0;
  // Absent when either score list is constant (correlation undefined).
  std::optional<double> kendall_tau;
  std::optional<double> spearman_rho;
  ErrorDistribution errors;
  std::optional<ErrorDistribution> paired_errors;
  AgreementStats agreement;
};

struct AlignmentExclusion {
  std::string market;
  std::string segment;
  int64_t n = 0;
  std::string reason;
};

// One line per query, for histograms.
struct QueryError {
  std::string query_id;
  std::string market;
  Popularity popularity = Popularity::kHead;
  double machine_sdcg = 0.0;
  double reference_sdcg = 0.0;
  double error = 0.0;
  std::optional<double> paired_error;
};

struct AlignmentReport {
  int k_depth = kDefaultDepth;
  AlignmentGrouping grouping = AlignmentGrouping::kByPopularity;
  std::vector<AlignmentRow> rows;
  std::vector<AlignmentExclusion> excluded;
  std::vector<QueryError> query_errors;
};

// Scores every query twice (machine labels in control/treatment, reference
// labels in reference_control/reference_treatment). Single-group statistics
// use the control arm; when every query in a segment is paired, the paired
// errors compare (machine delta - reference delta). Rows come out as
// Overall then Head/Torso/Tail/Single, grouped per market when requested.
// Segments with fewer than 2 queries are excluded. Throws
// kLabelSourceMismatch when a record lacks reference labels.
AlignmentReport BuildAlignmentReport(const EvalDataset& dataset,
                                     AlignmentGrouping grouping,
                                     int threads = 1);

}  // namespace pagerel
