#include "pagerel/io.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace pagerel {
namespace {

const Json& Require(const Json& obj, const char* field, int64_t line,
                    const std::string& context = "") {
  auto it = obj.find(field);
  if (it == obj.end()) {
    throw ParseError(line, "missing field '" + context + field + "'");
  }
  return *it;
}

std::string RequireString(const Json& obj, const char* field, int64_t line,
                          const std::string& context = "") {
  const Json& v = Require(obj, field, line, context);
  if (!v.is_string()) {
    throw ParseError(line, "field '" + context + field + "' must be a string");
  }
  return v.get<std::string>();
}

int64_t AsInteger(const Json& v, int64_t line, const std::string& path) {
  if (v.is_number_integer()) return v.get<int64_t>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::isfinite(d) && d == std::floor(d) && std::fabs(d) < 9e15) {
      return static_cast<int64_t>(d);
    }
  }
  throw ParseError(line, "'" + path + "' must be an integer");
}

double AsNumber(const Json& v, const std::string& path) {
  if (!v.is_number()) {
    throw Error(ErrorCode::kParseError, "'" + path + "' must be a number");
  }
  return v.get<double>();
}

std::vector<RawEntry> ParseEntries(const Json& v, int64_t line,
                                   const std::string& arm) {
  if (!v.is_array()) throw ParseError(line, "'" + arm + "' must be an array");
  std::vector<RawEntry> entries;
  entries.reserve(v.size());
  for (size_t i = 0; i < v.size(); ++i) {
    const std::string path = arm + "[" + std::to_string(i) + "]";
    const Json& e = v[i];
    if (!e.is_object()) throw ParseError(line, "'" + path + "' must be an object");
    RawEntry entry;
    entry.rank = AsInteger(Require(e, "rank", line, path + "."), line, path + ".rank");
    entry.label =
        AsInteger(Require(e, "label", line, path + "."), line, path + ".label");
    entries.push_back(entry);
  }
  return entries;
}

std::vector<int64_t> ParseLabelArray(const Json& v, int64_t line,
                                     const std::string& path) {
  if (!v.is_array()) throw ParseError(line, "'" + path + "' must be an array");
  std::vector<int64_t> labels;
  labels.reserve(v.size());
  for (size_t i = 0; i < v.size(); ++i) {
    labels.push_back(AsInteger(v[i], line, path + "[" + std::to_string(i) + "]"));
  }
  return labels;
}

RawRecord ParseRecord(const Json& obj, int64_t line,
                      std::vector<std::string>& warnings) {
  static const std::set<std::string> kKnown = {
      "query_id", "market", "stratum", "control", "treatment", "reference_labels"};
  if (!obj.is_object()) throw ParseError(line, "expected a JSON object");
  for (const auto& [key, value] : obj.items()) {
    if (!kKnown.contains(key)) {
      warnings.push_back("line " + std::to_string(line) + ": unknown field '" +
                         key + "' ignored");
    }
  }
  RawRecord r;
  r.source_line = line;
  r.query_id = RequireString(obj, "query_id", line);
  r.market = RequireString(obj, "market", line);
  const Json& stratum = Require(obj, "stratum", line);
  if (!stratum.is_object()) throw ParseError(line, "'stratum' must be an object");
  r.interest = RequireString(stratum, "interest", line, "stratum.");
  r.popularity = RequireString(stratum, "popularity", line, "stratum.");
  r.control = ParseEntries(Require(obj, "control", line), line, "control");
  if (auto it = obj.find("treatment"); it != obj.end() && !it->is_null()) {
    r.treatment = ParseEntries(*it, line, "treatment");
  }
  if (auto it = obj.find("reference_labels"); it != obj.end() && !it->is_null()) {
    if (!it->is_object()) {
      throw ParseError(line, "'reference_labels' must be an object");
    }
    if (auto c = it->find("control"); c != it->end()) {
      r.reference_control = ParseLabelArray(*c, line, "reference_labels.control");
    }
    if (auto t = it->find("treatment"); t != it->end()) {
      r.reference_treatment = ParseLabelArray(*t, line, "reference_labels.treatment");
    }
  }
  return r;
}

Json PageToJson(const RankedPage& page) {
  Json entries = Json::array();
  for (size_t i = 0; i < page.labels.size(); ++i) {
    entries.push_back(Json{{"rank", i + 1}, {"label", page.labels[i].level()}});
  }
  return entries;
}

Json LabelsToJson(const RankedPage& page) {
  Json labels = Json::array();
  for (RelevanceLabel l : page.labels) labels.push_back(l.level());
  return labels;
}

StratumKey ParseKey(const Json& obj, const std::string& context) {
  if (!obj.is_object()) {
    throw Error(ErrorCode::kParseError, context + " must be an object");
  }
  auto interest = obj.find("interest");
  auto popularity = obj.find("popularity");
  if (interest == obj.end() || !interest->is_string() || popularity == obj.end() ||
      !popularity->is_string()) {
    throw Error(ErrorCode::kParseError,
                context + " needs string fields 'interest' and 'popularity'");
  }
  auto parsed = ParsePopularity(popularity->get<std::string>());
  if (!parsed) {
    throw Error(ErrorCode::kParseError,
                context + ": unknown popularity '" + popularity->get<std::string>() + "'");
  }
  return StratumKey{interest->get<std::string>(), *parsed};
}

const Json& RequireArray(const Json& json, const char* field, const std::string& what) {
  if (!json.is_object() || !json.contains(field) || !json.at(field).is_array()) {
    throw Error(ErrorCode::kParseError,
                what + " needs an array field '" + field + "'");
  }
  return json.at(field);
}

LabelDistribution ParseDistribution(const Json& v, const std::string& path) {
  if (!v.is_array() || v.size() != kNumLabels) {
    throw Error(ErrorCode::kParseError, path + " must be an array of 5 numbers");
  }
  LabelDistribution d{};
  for (size_t i = 0; i < kNumLabels; ++i) {
    d[i] = AsNumber(v[i], path + "[" + std::to_string(i) + "]");
  }
  return d;
}

Json DistributionToJson(const LabelDistribution& d) {
  Json out = Json::array();
  for (double p : d) out.push_back(p);
  return out;
}

// Reports never contain NaN or Inf; this catches any slip.
double Finite(double v) {
  if (!std::isfinite(v)) {
    throw Error(ErrorCode::kInvalidArgument, "non-finite value in report");
  }
  return v;
}

Json OptionalNumber(const std::optional<double>& v) {
  return v ? Json(Finite(*v)) : Json(nullptr);
}

}  // namespace

ParsedRecords ParseDatasetJsonl(std::istream& in) {
  ParsedRecords parsed;
  std::string line;
  int64_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json obj;
    try {
      obj = Json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(line_number, std::string("malformed JSON: ") + e.what());
    }
    parsed.records.push_back(ParseRecord(obj, line_number, parsed.warnings));
  }
  if (in.bad()) throw Error(ErrorCode::kIoError, "failed while reading dataset");
  return parsed;
}

ParsedRecords ParseDatasetJsonl(const std::string& text) {
  std::istringstream in(text);
  return ParseDatasetJsonl(in);
}

std::string WriteRecordJson(const QueryRecord& r) {
  Json obj;
  obj["query_id"] = r.query_id;
  obj["market"] = r.market;
  obj["stratum"] = StratumKeyToJson(r.stratum);
  obj["control"] = PageToJson(r.control);
  if (r.treatment) obj["treatment"] = PageToJson(*r.treatment);
  if (r.reference_control || r.reference_treatment) {
    Json ref;
    if (r.reference_control) ref["control"] = LabelsToJson(*r.reference_control);
    if (r.reference_treatment) ref["treatment"] = LabelsToJson(*r.reference_treatment);
    obj["reference_labels"] = std::move(ref);
  }
  return obj.dump();
}

std::string WriteDatasetJsonl(const EvalDataset& dataset) {
  std::string out;
  for (const QueryRecord& r : dataset.records) {
    out += WriteRecordJson(r);
    out += '\n';
  }
  return out;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::kIoError, "cannot read " + path);
  return buffer.str();
}

void WriteFile(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open " + path + " for writing");
  out << contents;
  out.flush();
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path);
}

Json ParseJsonText(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParseError, what + ": malformed JSON: " + e.what());
  }
}

std::vector<StratumSpec> ParseDesign(const Json& json) {
  const Json& strata = RequireArray(json, "strata", "design");
  std::vector<StratumSpec> specs;
  for (size_t i = 0; i < strata.size(); ++i) {
    const std::string path = "strata[" + std::to_string(i) + "]";
    const Json& s = strata[i];
    StratumSpec spec;
    spec.key = ParseKey(s, path);
    if (!s.contains("weight")) {
      throw Error(ErrorCode::kParseError, path + " needs a 'weight'");
    }
    spec.weight = AsNumber(s.at("weight"), path + ".weight");
    if (s.contains("sigma") && !s.at("sigma").is_null()) {
      spec.sigma = AsNumber(s.at("sigma"), path + ".sigma");
    }
    if (s.contains("mu") && !s.at("mu").is_null()) {
      spec.mu = AsNumber(s.at("mu"), path + ".mu");
    }
    specs.push_back(std::move(spec));
  }
  return specs;
}

std::vector<StratumSpec> ParseDesignCsv(const std::string& text) {
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
      const size_t b = cell.find_first_not_of(" \t\r");
      const size_t e = cell.find_last_not_of(" \t\r");
      cells.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
  };
  auto number = [](const std::string& cell, int64_t line, const std::string& column) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) {
      throw ParseError(line, "column '" + column + "' is not a number: '" + cell + "'");
    }
    return value;
  };

  std::istringstream in(text);
  std::string line;
  int64_t line_number = 0;
  std::map<std::string, size_t> columns;
  std::vector<StratumSpec> specs;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::vector<std::string> cells = split(line);
    if (columns.empty()) {
      for (size_t i = 0; i < cells.size(); ++i) columns[cells[i]] = i;
      for (const char* required : {"interest", "popularity", "weight"}) {
        if (!columns.contains(required)) {
          throw ParseError(line_number, std::string("missing column '") + required + "'");
        }
      }
      continue;
    }
    if (cells.size() != columns.size()) {
      throw ParseError(line_number, "expected " + std::to_string(columns.size()) +
                                        " cells, found " + std::to_string(cells.size()));
    }
    StratumSpec spec;
    spec.key.interest = cells[columns["interest"]];
    auto popularity = ParsePopularity(cells[columns["popularity"]]);
    if (!popularity) {
      throw ParseError(line_number,
                       "unknown popularity '" + cells[columns["popularity"]] + "'");
    }
    spec.key.popularity = *popularity;
    spec.weight = number(cells[columns["weight"]], line_number, "weight");
    for (const char* optional : {"sigma", "mu"}) {
      auto it = columns.find(optional);
      if (it == columns.end() || cells[it->second].empty()) continue;
      const double v = number(cells[it->second], line_number, optional);
      (std::string(optional) == "sigma" ? spec.sigma : spec.mu) = v;
    }
    specs.push_back(std::move(spec));
  }
  if (columns.empty()) throw ParseError(0, "design CSV is empty");
  return specs;
}

PopulationSpec ParsePopulationSpec(const Json& json) {
  PopulationSpec spec;
  const Json& strata = RequireArray(json, "strata", "population spec");
  if (json.contains("queries_per_stratum")) {
    spec.queries_per_stratum =
        AsInteger(json.at("queries_per_stratum"), 0, "queries_per_stratum");
  }
  for (size_t i = 0; i < strata.size(); ++i) {
    const std::string path = "strata[" + std::to_string(i) + "]";
    const Json& s = strata[i];
    StratumProfile profile;
    profile.key = ParseKey(s, path);
    if (!s.contains("weight")) {
      throw Error(ErrorCode::kParseError, path + " needs a 'weight'");
    }
    profile.weight = AsNumber(s.at("weight"), path + ".weight");
    if (s.contains("market")) {
      if (!s.at("market").is_string()) {
        throw Error(ErrorCode::kParseError, path + ".market must be a string");
      }
      profile.market = s.at("market").get<std::string>();
    }
    if (s.contains("queries")) {
      profile.queries = AsInteger(s.at("queries"), 0, path + ".queries");
    }
    if (!s.contains("profile") || !s.at("profile").is_object()) {
      throw Error(ErrorCode::kParseError, path + " needs a 'profile' object");
    }
    const Json& p = s.at("profile");
    if (p.contains("curve")) {
      const Json& c = p.at("curve");
      if (!c.is_object() || !c.contains("top_mean")) {
        throw Error(ErrorCode::kParseError, path + ".profile.curve needs 'top_mean'");
      }
      QualityCurve curve;
      curve.top_mean = AsNumber(c.at("top_mean"), path + ".profile.curve.top_mean");
      if (c.contains("decay")) {
        curve.decay = AsNumber(c.at("decay"), path + ".profile.curve.decay");
      }
      profile.profile.curve = curve;
    } else if (p.contains("positions") && p.at("positions").is_array()) {
      const Json& positions = p.at("positions");
      for (size_t r = 0; r < positions.size(); ++r) {
        profile.profile.positions.push_back(ParseDistribution(
            positions[r], path + ".profile.positions[" + std::to_string(r) + "]"));
      }
    } else {
      throw Error(ErrorCode::kParseError,
                  path + ".profile needs 'curve' or 'positions'");
    }
    spec.strata.push_back(std::move(profile));
  }
  return spec;
}

Json PopulationSpecToJson(const PopulationSpec& spec) {
  Json strata = Json::array();
  for (const StratumProfile& s : spec.strata) {
    Json obj = StratumKeyToJson(s.key);
    obj["weight"] = s.weight;
    obj["market"] = s.market;
    if (s.queries) obj["queries"] = *s.queries;
    Json profile;
    if (s.profile.curve) {
      profile["curve"] = Json{{"top_mean", s.profile.curve->top_mean},
                              {"decay", s.profile.curve->decay}};
    } else {
      Json positions = Json::array();
      for (const LabelDistribution& d : s.profile.positions) {
        positions.push_back(DistributionToJson(d));
      }
      profile["positions"] = std::move(positions);
    }
    obj["profile"] = std::move(profile);
    strata.push_back(std::move(obj));
  }
  return Json{{"queries_per_stratum", spec.queries_per_stratum},
              {"strata", std::move(strata)}};
}

ConfusionMatrix ParseConfusion(const Json& json) {
  if (json.is_object() && json.contains("calibrate")) {
    const Json& c = json.at("calibrate");
    if (!c.is_object() || !c.contains("exact") || !c.contains("within_one")) {
      throw Error(ErrorCode::kParseError,
                  "'calibrate' needs 'exact' and 'within_one'");
    }
    return CalibrateConfusion(AsNumber(c.at("exact"), "calibrate.exact"),
                              AsNumber(c.at("within_one"), "calibrate.within_one"));
  }
  const Json& rows = RequireArray(json, "rows", "confusion matrix");
  if (rows.size() != kNumLabels) {
    throw Error(ErrorCode::kBadMatrix, "confusion matrix needs 5 rows");
  }
  ConfusionMatrix m;
  for (size_t r = 0; r < kNumLabels; ++r) {
    m.rows[r] = ParseDistribution(rows[r], "rows[" + std::to_string(r) + "]");
  }
  m.Check();
  return m;
}

Json ConfusionToJson(const ConfusionMatrix& confusion) {
  Json rows = Json::array();
  for (const LabelDistribution& row : confusion.rows) rows.push_back(DistributionToJson(row));
  return Json{{"rows", std::move(rows)}};
}

EffectSpec ParseEffect(const Json& json) {
  if (!json.is_object()) throw Error(ErrorCode::kParseError, "effect must be an object");
  EffectSpec effect;
  if (json.contains("default_shift")) {
    effect.default_shift = AsNumber(json.at("default_shift"), "default_shift");
  }
  if (json.contains("per_stratum")) {
    const Json& list = RequireArray(json, "per_stratum", "effect");
    for (size_t i = 0; i < list.size(); ++i) {
      const std::string path = "per_stratum[" + std::to_string(i) + "]";
      const StratumKey key = ParseKey(list[i], path);
      if (!list[i].contains("shift")) {
        throw Error(ErrorCode::kParseError, path + " needs a 'shift'");
      }
      effect.per_stratum[key] = AsNumber(list[i].at("shift"), path + ".shift");
    }
  }
  return effect;
}

Json StratumKeyToJson(const StratumKey& key) {
  return Json{{"interest", key.interest},
              {"popularity", std::string(PopularityName(key.popularity))}};
}

Json EstimateToJson(const EstimateResult& e) {
  Json obj;
  obj["estimator"] = std::string(EstimatorName(e.estimator));
  obj["n"] = e.n;
  obj["mean"] = Finite(e.mean);
  obj["std_error"] = Finite(e.std_error);
  obj["ci_low"] = Finite(e.ci_low);
  obj["ci_high"] = Finite(e.ci_high);
  obj["statistic"] = OptionalNumber(e.statistic);
  obj["p_value"] = Finite(e.p_value);
  obj["degenerate"] = e.degenerate;
  return obj;
}

Json SegmentAnalysisToJson(const SegmentAnalysis& analysis, Grouping grouping) {
  Json effects = Json::array();
  for (const SegmentEffect& e : analysis.effects) {
    Json obj;
    obj["grouping"] = std::string(GroupingName(grouping));
    obj["segment"] = e.segment.Label();
    obj["estimate"] = EstimateToJson(e.estimate);
    obj["adjusted_p"] = Finite(e.adjusted_p);
    obj["bh_rejected"] = e.bh_rejected;
    effects.push_back(std::move(obj));
  }
  return effects;
}

Json AllocationToJson(const Allocation& allocation, AllocationMode mode,
                      int64_t min_per_stratum) {
  Json strata = Json::array();
  for (const auto& [key, n] : allocation.per_stratum) {
    Json obj = StratumKeyToJson(key);
    obj["n"] = n;
    strata.push_back(std::move(obj));
  }
  Json out;
  out["mode"] = mode == AllocationMode::kNeyman ? "neyman" : "proportional";
  out["min_per_stratum"] = min_per_stratum;
  out["fell_back_to_proportional"] = allocation.fell_back_to_proportional;
  out["total"] = allocation.total;
  out["allocation"] = std::move(strata);
  return out;
}

Json ErrorDistributionToJson(const ErrorDistribution& d) {
  Json obj;
  obj["n"] = d.n;
  obj["mean"] = Finite(d.mean);
  obj["p10"] = Finite(d.p10);
  obj["median"] = Finite(d.median);
  obj["p90"] = Finite(d.p90);
  obj["std_dev"] = Finite(d.std_dev);
  return obj;
}

Json AlignmentReportToJson(const AlignmentReport& report) {
  Json rows = Json::array();
  for (const AlignmentRow& row : report.rows) {
    Json obj;
    obj["market"] = row.market;
    obj["segment"] = row.segment;
    obj["n"] = row.n;
    obj["kendall_tau"] = OptionalNumber(row.kendall_tau);
    obj["spearman_rho"] = OptionalNumber(row.spearman_rho);
    obj["correlation_degenerate"] = !row.kendall_tau.has_value();
    obj["errors"] = ErrorDistributionToJson(row.errors);
    obj["paired_errors"] =
        row.paired_errors ? ErrorDistributionToJson(*row.paired_errors) : Json(nullptr);
    Json agreement;
    agreement["labels"] = row.agreement.total;
    agreement["exact_rate"] = Finite(row.agreement.exact_rate);
    agreement["within_one_rate"] = Finite(row.agreement.within_one_rate);
    Json confusion = Json::array();
    for (const auto& r : row.agreement.confusion) {
      Json counts = Json::array();
      for (int64_t c : r) counts.push_back(c);
      confusion.push_back(std::move(counts));
    }
    agreement["confusion"] = std::move(confusion);
    obj["agreement"] = std::move(agreement);
    rows.push_back(std::move(obj));
  }
  Json excluded = Json::array();
  for (const AlignmentExclusion& e : report.excluded) {
    excluded.push_back(Json{{"market", e.market},
                            {"segment", e.segment},
                            {"n", e.n},
                            {"reason", e.reason}});
  }
  Json out;
  out["k_depth"] = report.k_depth;
  out["grouping"] = std::string(AlignmentGroupingName(report.grouping));
  out["rows"] = std::move(rows);
  out["excluded"] = std::move(excluded);
  return out;
}

std::string FormatDouble(double value) {
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::kInvalidArgument, "non-finite value in output");
  }
  char buffer[64];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, end);
}

std::string AlignmentTableCsv(const AlignmentReport& report) {
  std::string out =
      "market,segment,n,kendall_tau,spearman_rho,error_mean,error_p10,"
      "error_median,error_p90,error_std_dev,paired_mean,paired_p10,"
      "paired_median,paired_p90,paired_std_dev,exact_rate,within_one_rate\n";
  auto opt = [](const std::optional<double>& v) {
    return v ? FormatDouble(*v) : std::string();
  };
  auto dist = [](const ErrorDistribution& d) {
    return FormatDouble(d.mean) + "," + FormatDouble(d.p10) + "," +
           FormatDouble(d.median) + "," + FormatDouble(d.p90) + "," +
           FormatDouble(d.std_dev);
  };
  for (const AlignmentRow& row : report.rows) {
    out += row.market + "," + row.segment + "," + std::to_string(row.n) + "," +
           opt(row.kendall_tau) + "," + opt(row.spearman_rho) + "," +
           dist(row.errors) + "," +
           (row.paired_errors ? dist(*row.paired_errors) : std::string(",,,,")) +
           "," + FormatDouble(row.agreement.exact_rate) + "," +
           FormatDouble(row.agreement.within_one_rate) + "\n";
  }
  return out;
}

std::string QueryErrorsCsv(const AlignmentReport& report) {
  std::string out =
      "query_id,market,popularity,machine_sdcg,reference_sdcg,error,paired_error\n";
  for (const QueryError& q : report.query_errors) {
    out += q.query_id + "," + q.market + "," +
           std::string(PopularityName(q.popularity)) + "," +
           FormatDouble(q.machine_sdcg) + "," + FormatDouble(q.reference_sdcg) + "," +
           FormatDouble(q.error) + "," +
           (q.paired_error ? FormatDouble(*q.paired_error) : std::string()) + "\n";
  }
  return out;
}

std::string ErrorHistogramCsv(const AlignmentReport& report, int bins, double lo,
                              double hi) {
  std::vector<double> single, paired;
  for (const QueryError& q : report.query_errors) {
    single.push_back(q.error);
    if (q.paired_error) paired.push_back(*q.paired_error);
  }
  const std::vector<int64_t> single_counts = Histogram(single, bins, lo, hi);
  const std::vector<int64_t> paired_counts = Histogram(paired, bins, lo, hi);
  std::string out = "bin_low,bin_high,single_group,paired\n";
  const double width = (hi - lo) / bins;
  for (int b = 0; b < bins; ++b) {
    out += FormatDouble(lo + b * width) + "," + FormatDouble(lo + (b + 1) * width) +
           "," + std::to_string(single_counts[b]) + "," +
           std::to_string(paired_counts[b]) + "\n";
  }
  return out;
}

}  // namespace pagerel
