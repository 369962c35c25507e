#include "pagerel/core.h"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

namespace pagerel {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kDuplicateQueryId: return "DuplicateQueryId";
    case ErrorCode::kBadRankSequence: return "BadRankSequence";
    case ErrorCode::kBadLabelValue: return "BadLabelValue";
    case ErrorCode::kMissingArm: return "MissingArm";
    case ErrorCode::kEmptyPage: return "EmptyPage";
    case ErrorCode::kBadStratum: return "BadStratum";
    case ErrorCode::kLabelSourceMismatch: return "LabelSourceMismatch";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kBudgetTooSmall: return "BudgetTooSmall";
    case ErrorCode::kMissingSigma: return "MissingSigma";
    case ErrorCode::kInvalidDesign: return "InvalidDesign";
    case ErrorCode::kStratumExhausted: return "StratumExhausted";
    case ErrorCode::kTooFewSamples: return "TooFewSamples";
    case ErrorCode::kTooFewSamplesInStratum: return "TooFewSamplesInStratum";
    case ErrorCode::kWeightMismatch: return "WeightMismatch";
    case ErrorCode::kNoSegments: return "NoSegments";
    case ErrorCode::kOutOfDomain: return "OutOfDomain";
    case ErrorCode::kNonPositiveMean: return "NonPositiveMean";
    case ErrorCode::kBadPValue: return "BadPValue";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kAllTied: return "AllTied";
    case ErrorCode::kBadSpec: return "BadSpec";
    case ErrorCode::kBadMatrix: return "BadMatrix";
    case ErrorCode::kInfeasibleTargets: return "InfeasibleTargets";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

RelevanceLabel RelevanceLabel::FromLevel(int64_t level) {
  if (level < kMinLabel || level > kMaxLabel) {
    throw Error(ErrorCode::kBadLabelValue,
                "relevance label must be in [1, 5], got " +
                    std::to_string(level));
  }
  return RelevanceLabel(static_cast<int>(level));
}

std::string_view PopularityName(Popularity popularity) {
  switch (popularity) {
    case Popularity::kHead: return "head";
    case Popularity::kTorso: return "torso";
    case Popularity::kTail: return "tail";
    case Popularity::kSingle: return "single";
  }
  return "head";
}

std::optional<Popularity> ParsePopularity(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  for (Popularity p : kAllPopularities) {
    if (lower == PopularityName(p)) return p;
  }
  return std::nullopt;
}

std::string StratumKey::ToString() const {
  return interest + "/" + std::string(PopularityName(popularity));
}

bool EvalDataset::all_paired() const {
  return std::all_of(records.begin(), records.end(),
                     [](const QueryRecord& r) { return r.paired(); });
}

bool EvalDataset::all_have_reference() const {
  return std::all_of(records.begin(), records.end(),
                     [](const QueryRecord& r) { return r.has_reference(); });
}

namespace {

std::string DescribeViolations(const std::vector<Violation>& violations) {
  std::ostringstream out;
  out << violations.size() << " validation error(s)";
  const size_t shown = std::min<size_t>(violations.size(), 5);
  for (size_t i = 0; i < shown; ++i) {
    const Violation& v = violations[i];
    out << (i == 0 ? ": " : "; ") << ErrorCodeName(v.code) << " at "
        << (v.query_id.empty() ? "<no id>" : v.query_id) << "." << v.field;
    if (v.source_line > 0) out << " (line " << v.source_line << ")";
  }
  if (shown < violations.size()) out << "; ...";
  return out.str();
}

class RecordChecker {
 public:
  RecordChecker(const RawRecord& record, std::vector<Violation>& out)
      : record_(record), out_(out) {}

  void Add(ErrorCode code, std::string field, std::string message) {
    out_.push_back(Violation{record_.query_id, std::move(field), code,
                             record_.source_line, std::move(message)});
  }

  void CheckPage(const std::vector<RawEntry>& entries, const std::string& arm,
                 ArmMode mode) {
    if (entries.empty() && mode == ArmMode::kPaired) {
      Add(ErrorCode::kEmptyPage, arm, "page has no results");
    }
    // One rank violation per page; later ranks are meaningless after a gap.
    for (size_t i = 0; i < entries.size(); ++i) {
      if (entries[i].rank != static_cast<int64_t>(i) + 1) {
        Add(ErrorCode::kBadRankSequence, arm + "[" + std::to_string(i) + "].rank",
            "expected rank " + std::to_string(i + 1) + ", got " +
                std::to_string(entries[i].rank));
        break;
      }
    }
    for (size_t i = 0; i < entries.size(); ++i) {
      CheckLabel(entries[i].label,
                 arm + "[" + std::to_string(i) + "].label");
    }
  }

  void CheckLabel(int64_t label, const std::string& field) {
    if (label < kMinLabel || label > kMaxLabel) {
      Add(ErrorCode::kBadLabelValue, field,
          "label must be in [1, 5], got " + std::to_string(label));
    }
  }

  void CheckReference(const std::optional<std::vector<int64_t>>& labels,
                      const std::optional<std::vector<RawEntry>>& page,
                      const std::string& arm) {
    const std::string field = "reference_labels." + arm;
    if (!labels) return;
    if (!page) {
      Add(ErrorCode::kLabelSourceMismatch, field,
          "reference labels given for a missing arm");
      return;
    }
    if (labels->size() != page->size()) {
      Add(ErrorCode::kLabelSourceMismatch, field,
          "expected " + std::to_string(page->size()) + " labels, got " +
              std::to_string(labels->size()));
    }
    for (size_t i = 0; i < labels->size(); ++i) {
      CheckLabel((*labels)[i], field + "[" + std::to_string(i) + "]");
    }
  }

 private:
  const RawRecord& record_;
  std::vector<Violation>& out_;
};

RankedPage ToPage(const std::vector<RawEntry>& entries) {
  RankedPage page;
  page.labels.reserve(entries.size());
  for (const RawEntry& e : entries) {
    page.labels.push_back(RelevanceLabel::FromLevel(e.label));
  }
  return page;
}

RankedPage ToPage(const std::vector<int64_t>& labels) {
  RankedPage page;
  page.labels.reserve(labels.size());
  for (int64_t l : labels) page.labels.push_back(RelevanceLabel::FromLevel(l));
  return page;
}

}  // namespace

ValidationError::ValidationError(std::vector<Violation> violations)
    : Error(violations.empty() ? ErrorCode::kInvalidArgument
                               : violations.front().code,
            DescribeViolations(violations)),
      violations_(std::move(violations)) {}

std::vector<Violation> FindViolations(const std::vector<RawRecord>& raw,
                                      int k_depth, ArmMode mode) {
  if (k_depth < 1) {
    throw Error(ErrorCode::kInvalidArgument, "k_depth must be >= 1");
  }
  std::vector<Violation> violations;

  // Duplicates are reported once per id, at the earliest line, so the
  // result is invariant under record permutation.
  std::map<std::string, std::pair<int, int64_t>> seen;
  for (const RawRecord& r : raw) {
    auto [it, inserted] = seen.try_emplace(r.query_id, 0, r.source_line);
    ++it->second.first;
    it->second.second = std::min(it->second.second, r.source_line);
  }
  for (const auto& [id, info] : seen) {
    if (info.first > 1) {
      violations.push_back(Violation{
          id, "query_id", ErrorCode::kDuplicateQueryId, info.second,
          "query_id occurs " + std::to_string(info.first) + " times"});
    }
  }

  for (const RawRecord& r : raw) {
    RecordChecker check(r, violations);
    if (r.query_id.empty()) {
      check.Add(ErrorCode::kInvalidArgument, "query_id",
                "query_id must be non-empty");
    }
    if (r.interest.empty()) {
      check.Add(ErrorCode::kBadStratum, "stratum.interest",
                "interest must be non-empty");
    }
    if (!ParsePopularity(r.popularity)) {
      check.Add(ErrorCode::kBadStratum, "stratum.popularity",
                "unknown popularity segment '" + r.popularity + "'");
    }
    check.CheckPage(r.control, "control", mode);
    if (r.treatment) {
      check.CheckPage(*r.treatment, "treatment", mode);
    } else if (mode == ArmMode::kPaired) {
      check.Add(ErrorCode::kMissingArm, "treatment",
                "paired mode requires a treatment page");
    }
    check.CheckReference(r.reference_control, r.control, "control");
    check.CheckReference(r.reference_treatment, r.treatment, "treatment");
    if (r.reference_control && r.treatment && !r.reference_treatment) {
      check.Add(ErrorCode::kLabelSourceMismatch, "reference_labels.treatment",
                "reference labels missing for the treatment arm");
    }
    if (!r.reference_control && r.reference_treatment) {
      check.Add(ErrorCode::kLabelSourceMismatch, "reference_labels.control",
                "reference labels missing for the control arm");
    }
  }
  std::sort(violations.begin(), violations.end());
  return violations;
}

EvalDataset ValidateDataset(const std::vector<RawRecord>& raw, int k_depth,
                            ArmMode mode) {
  std::vector<Violation> violations = FindViolations(raw, k_depth, mode);
  if (!violations.empty()) throw ValidationError(std::move(violations));

  EvalDataset dataset;
  dataset.k_depth = k_depth;
  dataset.records.reserve(raw.size());
  for (const RawRecord& r : raw) {
    QueryRecord rec;
    rec.query_id = r.query_id;
    rec.market = r.market;
    rec.stratum = StratumKey{r.interest, *ParsePopularity(r.popularity)};
    rec.control = ToPage(r.control);
    if (r.treatment) rec.treatment = ToPage(*r.treatment);
    if (r.reference_control) rec.reference_control = ToPage(*r.reference_control);
    if (r.reference_treatment) {
      rec.reference_treatment = ToPage(*r.reference_treatment);
    }
    dataset.records.push_back(std::move(rec));
  }
  return dataset;
}

}  // namespace pagerel
