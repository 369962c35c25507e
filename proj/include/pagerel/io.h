#pragma once

// File formats. Datasets are JSONL, one query per line:
//
//   {"query_id": "q1", "market": "US",
//    "stratum": {"interest": "beauty", "popularity": "head"},
//    "control": [{"rank": 1, "label": 5}, ...],
//    "treatment": [{"rank": 1, "label": 4}, ...],            (optional)
//    "reference_labels": {"control": [5, ...], "treatment": [4, ...]}}
//                                                             (optional)
//
// `label` is the primary (machine) label; `reference_labels` holds a second
// source for the same ranked results. Design, population spec, confusion
// matrix, effect and report files are JSON; schemas live in schemas/.

#include <istream>
#include <string>
#include <vector>

#include "json.hpp"
#include "pagerel/alignment.h"
#include "pagerel/core.h"
#include "pagerel/estimation.h"
#include "pagerel/sampling.h"
#include "pagerel/simulator.h"

namespace pagerel {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolName = "pagerel";
inline constexpr const char* kToolVersion = "0.1.0";

class ParseError : public Error {
 public:
  ParseError(int64_t line, const std::string& message)
      : Error(ErrorCode::kParseError,
              (line > 0 ? "line " + std::to_string(line) + ": " : std::string()) +
                  message),
        line_(line) {}

  int64_t line() const { return line_; }

 private:
  int64_t line_;
};

struct ParsedRecords {
  std::vector<RawRecord> records;
  std::vector<std::string> warnings;  // e.g. unknown fields
};

// Throws ParseError naming the offending line for malformed JSON or
// wrongly typed fields. Blank lines are skipped.
ParsedRecords ParseDatasetJsonl(std::istream& in);
ParsedRecords ParseDatasetJsonl(const std::string& text);

std::string WriteDatasetJsonl(const EvalDataset& dataset);
std::string WriteRecordJson(const QueryRecord& record);

// Reads the whole file; throws Error(kIoError).
std::string ReadFile(const std::string& path);
void WriteFile(const std::string& path, const std::string& contents);

// {"strata": [{"interest", "popularity", "weight", "sigma"?, "mu"?}, ...]}.
// Other fields are ignored, so a population spec also works as a design.
std::vector<StratumSpec> ParseDesign(const Json& json);

// Header row naming at least interest, popularity and weight; optional
// sigma and mu columns may be left empty.
std::vector<StratumSpec> ParseDesignCsv(const std::string& text);

PopulationSpec ParsePopulationSpec(const Json& json);
Json PopulationSpecToJson(const PopulationSpec& spec);

// {"rows": [[...5], ...5]} or {"calibrate": {"exact": e, "within_one": w}}.
ConfusionMatrix ParseConfusion(const Json& json);
Json ConfusionToJson(const ConfusionMatrix& confusion);

// {"default_shift": s, "per_stratum": [{"interest", "popularity", "shift"}]}.
EffectSpec ParseEffect(const Json& json);

Json ParseJsonText(const std::string& text, const std::string& what);

Json StratumKeyToJson(const StratumKey& key);
Json EstimateToJson(const EstimateResult& estimate);
Json SegmentAnalysisToJson(const SegmentAnalysis& analysis, Grouping grouping);
Json AllocationToJson(const Allocation& allocation, AllocationMode mode,
                      int64_t min_per_stratum);
Json ErrorDistributionToJson(const ErrorDistribution& d);
Json AlignmentReportToJson(const AlignmentReport& report);

// Shortest round-trip decimal form of a finite double.
std::string FormatDouble(double value);

// One row per (market, segment): n, correlations, error percentiles for
// single-group and paired errors, and label agreement. Absent values are
// empty cells.
std::string AlignmentTableCsv(const AlignmentReport& report);

// query_id,market,popularity,machine_sdcg,reference_sdcg,error,paired_error
std::string QueryErrorsCsv(const AlignmentReport& report);
// bin_low,bin_high,single_group,paired
std::string ErrorHistogramCsv(const AlignmentReport& report, int bins, double lo,
                              double hi);

}  // namespace pagerel
