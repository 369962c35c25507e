#pragma once

// Domain types shared by every module: relevance labels, strata, ranked
// pages, query records and the validated evaluation dataset.

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pagerel/error.h"

namespace pagerel {

inline constexpr int kMinLabel = 1;
inline constexpr int kMaxLabel = 5;
inline constexpr int kNumLabels = 5;
inline constexpr int kDefaultDepth = 25;

// Ordinal 5-point judgment, L1 (highly irrelevant) .. L5 (highly relevant).
class RelevanceLabel {
 public:
  // Throws Error(kBadLabelValue) outside [1, 5].
  static RelevanceLabel FromLevel(int64_t level);

  constexpr int level() const { return level_; }
  // 0-based index into 5-element tables.
  constexpr int index() const { return level_ - 1; }

  friend constexpr auto operator<=>(RelevanceLabel, RelevanceLabel) = default;

 private:
  constexpr explicit RelevanceLabel(int level) : level_(level) {}
  int level_;
};

enum class Popularity { kHead, kTorso, kTail, kSingle };

inline constexpr Popularity kAllPopularities[] = {
    Popularity::kHead, Popularity::kTorso, Popularity::kTail,
    Popularity::kSingle};

// Lower-case name: "head", "torso", "tail", "single".
std::string_view PopularityName(Popularity popularity);
// Case-insensitive; nullopt for anything else.
std::optional<Popularity> ParsePopularity(std::string_view name);

// Cell of the query population: interest tag x popularity segment.
struct StratumKey {
  std::string interest;
  Popularity popularity = Popularity::kHead;

  // "interest/popularity".
  std::string ToString() const;

  friend auto operator<=>(const StratumKey&, const StratumKey&) = default;
  friend bool operator==(const StratumKey&, const StratumKey&) = default;
};

// Top results of one (query, arm); the label at index i has rank i + 1.
struct RankedPage {
  std::vector<RelevanceLabel> labels;

  size_t size() const { return labels.size(); }
  bool empty() const { return labels.empty(); }

  friend bool operator==(const RankedPage&, const RankedPage&) = default;
};

// Labels in `control` / `treatment` come from the primary (machine) source.
// The optional reference pages carry a second label source (e.g. human
// judgments) for the same ranked results, position-aligned.
struct QueryRecord {
  std::string query_id;
  std::string market;
  StratumKey stratum;
  RankedPage control;
  std::optional<RankedPage> treatment;
  std::optional<RankedPage> reference_control;
  std::optional<RankedPage> reference_treatment;

  bool paired() const { return treatment.has_value(); }
  bool has_reference() const { return reference_control.has_value(); }

  friend bool operator==(const QueryRecord&, const QueryRecord&) = default;
};

struct EvalDataset {
  std::vector<QueryRecord> records;
  int k_depth = kDefaultDepth;

  bool all_paired() const;
  bool all_have_reference() const;
};

// Records as they come off the wire, before any invariant is checked.
struct RawEntry {
  int64_t rank = 0;
  int64_t label = 0;
};

struct RawRecord {
  std::string query_id;
  std::string market;
  std::string interest;
  std::string popularity;
  std::vector<RawEntry> control;
  std::optional<std::vector<RawEntry>> treatment;
  std::optional<std::vector<int64_t>> reference_control;
  std::optional<std::vector<int64_t>> reference_treatment;
  int64_t source_line = 0;  // 1-based line in the input file; 0 if unknown
};

enum class ArmMode { kSingleArm, kPaired };

struct Violation {
  std::string query_id;
  std::string field;  // path such as "control[2].rank"
  ErrorCode code = ErrorCode::kInvalidArgument;
  int64_t source_line = 0;
  std::string message;

  friend auto operator<=>(const Violation&, const Violation&) = default;
  friend bool operator==(const Violation&, const Violation&) = default;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<Violation> violations);

  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

// Returns every violation found in `raw`, sorted, so the result does not
// depend on record order. Empty means the records are valid.
std::vector<Violation> FindViolations(const std::vector<RawRecord>& raw,
                                      int k_depth, ArmMode mode);

// Builds the dataset, or throws ValidationError listing all violations.
EvalDataset ValidateDataset(const std::vector<RawRecord>& raw, int k_depth,
                            ArmMode mode);

}  // namespace pagerel
