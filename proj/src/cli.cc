#include "pagerel/cli.h"

#include <cmath>
#include <cstdlib>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pagerel/alignment.h"
#include "pagerel/estimation.h"
#include "pagerel/io.h"
#include "pagerel/metrics.h"
#include "pagerel/power.h"
#include "pagerel/sampling.h"
#include "pagerel/simulator.h"

namespace pagerel {
namespace {

int Verbosity() {
  const char* v = std::getenv("PAGEREL_VERBOSE");
  if (v == nullptr || *v == '\0') return 1;
  return std::atoi(v);
}

int ExitCodeFor(ErrorCode code) {
  return code == ErrorCode::kIoError ? 2 : 1;
}

void ReportError(std::ostream& err, bool as_json, ErrorCode code,
                 const std::string& message, std::optional<int64_t> line,
                 const std::vector<Violation>& violations) {
  if (!as_json) {
    err << "error: " << message << "\n";
    for (const Violation& v : violations) {
      err << "  line " << v.source_line << ", " << v.query_id << ", " << v.field
          << ": " << ErrorCodeName(v.code) << ": " << v.message << "\n";
    }
    return;
  }
  Json list = Json::array();
  for (const Violation& v : violations) {
    list.push_back(Json{{"query_id", v.query_id},
                        {"field", v.field},
                        {"code", std::string(ErrorCodeName(v.code))},
                        {"line", v.source_line},
                        {"message", v.message}});
  }
  Json body;
  body["code"] = std::string(ErrorCodeName(code));
  body["exit_code"] = ExitCodeFor(code);
  body["message"] = message;
  body["line"] = line ? Json(*line) : Json(nullptr);
  body["violations"] = std::move(list);
  err << Json{{"error", std::move(body)}}.dump() << "\n";
}

struct Context {
  std::ostream& out;
  std::ostream& err;

  void Warn(const std::string& message) const {
    if (Verbosity() >= 1) err << "warning: " << message << "\n";
  }
  void Note(const std::string& message) const {
    if (Verbosity() >= 2) err << "note: " << message << "\n";
  }
  void Emit(const std::string& path, const std::string& text) const {
    if (path.empty() || path == "-") {
      out << text;
    } else {
      WriteFile(path, text);
      Note("wrote " + path);
    }
  }
};

EvalDataset LoadDataset(const Context& ctx, const std::string& path, int k_depth,
                        ArmMode mode) {
  ParsedRecords parsed = ParseDatasetJsonl(ReadFile(path));
  for (const std::string& w : parsed.warnings) ctx.Warn(w);
  EvalDataset dataset = ValidateDataset(parsed.records, k_depth, mode);
  ctx.Note("loaded " + std::to_string(dataset.records.size()) + " queries");
  return dataset;
}

bool EndsWith(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::vector<StratumSpec> LoadDesign(const std::string& path) {
  const std::string text = ReadFile(path);
  if (EndsWith(path, ".csv")) return ParseDesignCsv(text);
  return ParseDesign(ParseJsonText(text, path));
}

Json LoadJson(const std::string& path) { return ParseJsonText(ReadFile(path), path); }

std::string Dump(const Json& json) { return json.dump(2) + "\n"; }

Json Metadata(std::optional<uint64_t> seed) {
  return Json{{"tool", kToolName},
              {"version", kToolVersion},
              {"seed", seed ? Json(*seed) : Json(nullptr)}};
}

// ---- metric ----------------------------------------------------------------

struct MetricArgs {
  std::string dataset;
  int k = kDefaultDepth;
  std::string out;
};

void RunMetric(const Context& ctx, const MetricArgs& a) {
  const EvalDataset dataset = LoadDataset(ctx, a.dataset, a.k, ArmMode::kSingleArm);
  std::string csv = "# k_depth=" + std::to_string(a.k) + "\n";
  csv += "query_id,arm,sdcg,short_page\n";
  auto row = [&](const std::string& id, const char* arm, const RankedPage& page) {
    const SdcgScore s = SdcgAtK(page, a.k);
    csv += id + "," + arm + "," + FormatDouble(s.value) + "," +
           (s.short_page ? "true" : "false") + "\n";
  };
  for (const QueryRecord& r : dataset.records) {
    row(r.query_id, "control", r.control);
    if (r.treatment) row(r.query_id, "treatment", *r.treatment);
  }
  ctx.Emit(a.out, csv);
}

// ---- evaluate --------------------------------------------------------------

struct EvaluateArgs {
  std::string dataset;
  std::string design;
  std::string estimator = "srs";
  std::string segments = "popularity";
  double alpha = 0.05;
  double q = kDefaultFdrLevel;
  double power = 0.8;
  int k = kDefaultDepth;
  int threads = 1;
  std::string out;
};

double SampleVariance(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(v.size() - 1);
}

Json MdeEntry(const char* estimator, double mu, double sigma, int64_t n,
              const PowerConfig& cfg) {
  const double mde = Mde(mu, sigma, n, cfg);
  return Json{{"estimator", estimator}, {"n", n},           {"mu", mu},
              {"sigma", sigma},         {"mde", mde},       {"mde_percent", 100.0 * mde}};
}

void RunEvaluate(const Context& ctx, const EvaluateArgs& a) {
  const EvalDataset dataset = LoadDataset(ctx, a.dataset, a.k, ArmMode::kPaired);
  const Estimator estimator =
      a.estimator == "stratified" ? Estimator::kStratified : Estimator::kSrs;
  const Grouping grouping = a.segments == "interest" ? Grouping::kByInterest
                            : a.segments == "stratum" ? Grouping::kByStratum
                                                      : Grouping::kByPopularity;
  std::optional<std::vector<StratumSpec>> design;
  if (!a.design.empty()) {
    design = LoadDesign(a.design);
    CheckDesign(*design);
  }
  if (estimator == Estimator::kStratified && !design) {
    throw Error(ErrorCode::kInvalidArgument,
                "--estimator stratified needs --design with stratum weights");
  }

  std::vector<double> deltas, control;
  std::map<StratumKey, std::vector<double>> deltas_by_stratum, control_by_stratum;
  for (const QueryRecord& r : dataset.records) {
    const double d = PairedDelta(r, dataset.k_depth);
    const double c = SdcgAtK(r.control, dataset.k_depth).value;
    deltas.push_back(d);
    control.push_back(c);
    deltas_by_stratum[r.stratum].push_back(d);
    control_by_stratum[r.stratum].push_back(c);
  }

  EstimateResult topline;
  if (estimator == Estimator::kStratified) {
    std::map<StratumKey, double> weights;
    for (const StratumSpec& s : *design) weights[s.key] = s.weight;
    topline = StratifiedEstimate(deltas_by_stratum, weights, a.alpha);
  } else {
    topline = SrsEstimate(deltas, a.alpha);
  }
  const SegmentAnalysis analysis = SegmentEffects(dataset, grouping, a.alpha, a.q);

  // Sensitivity of the control-arm metric at the current sample size, as a
  // simple random sample and under the stratified design.
  PowerConfig cfg{a.alpha, a.power};
  const int64_t n = static_cast<int64_t>(control.size());
  double mu = 0.0;
  for (double c : control) mu += c;
  mu /= static_cast<double>(n);
  Json mde;
  mde["current"] = MdeEntry("srs", mu, std::sqrt(SampleVariance(control)), n, cfg);
  mde["by_design"] = nullptr;
  if (design) {
    double variance = 0.0;
    bool complete = true;
    for (const StratumSpec& s : *design) {
      auto it = control_by_stratum.find(s.key);
      if (it == control_by_stratum.end() || it->second.size() < 2) {
        complete = false;
        break;
      }
      variance += s.weight * s.weight * SampleVariance(it->second) /
                  static_cast<double>(it->second.size());
    }
    if (complete) {
      mde["by_design"] = MdeEntry("stratified", mu,
                                  std::sqrt(static_cast<double>(n) * variance), n, cfg);
    } else {
      ctx.Warn("by-design MDE needs at least 2 queries in every design stratum");
    }
  }

  Json config;
  config["dataset"] = a.dataset;
  config["design"] = a.design.empty() ? Json(nullptr) : Json(a.design);
  config["k_depth"] = dataset.k_depth;
  config["estimator"] = std::string(EstimatorName(estimator));
  config["segments"] = std::string(GroupingName(grouping));
  config["alpha"] = a.alpha;
  config["q"] = a.q;
  config["power"] = a.power;

  Json excluded = Json::array();
  for (const ExcludedSegment& e : analysis.excluded) {
    excluded.push_back(
        Json{{"segment", e.segment.Label()}, {"n", e.n}, {"reason", e.reason}});
  }

  Json report;
  report["config"] = std::move(config);
  report["topline"] = EstimateToJson(topline);
  report["segments"] = SegmentAnalysisToJson(analysis, grouping);
  report["mde"] = std::move(mde);
  report["alignment"] =
      dataset.all_have_reference()
          ? AlignmentReportToJson(BuildAlignmentReport(
                dataset, AlignmentGrouping::kByPopularity, a.threads))
          : Json(nullptr);
  report["excluded"] = std::move(excluded);
  report["metadata"] = Metadata(std::nullopt);
  ctx.Emit(a.out, Dump(report));
}

// ---- design ----------------------------------------------------------------

struct DesignArgs {
  std::string strata;
  int64_t budget = 0;
  std::string mode = "neyman";
  int64_t min_per_stratum = 2;
  std::string out;
};

void RunDesign(const Context& ctx, const DesignArgs& a) {
  const std::vector<StratumSpec> strata = LoadDesign(a.strata);
  const AllocationMode mode =
      a.mode == "proportional" ? AllocationMode::kProportional : AllocationMode::kNeyman;
  const Allocation allocation = Allocate(strata, a.budget, mode, a.min_per_stratum);
  if (allocation.fell_back_to_proportional) {
    ctx.Warn("every weight * sigma is zero; allocated proportionally");
  }
  Json report = AllocationToJson(allocation, mode, a.min_per_stratum);
  bool have_sigmas = true;
  for (const StratumSpec& s : strata) have_sigmas = have_sigmas && s.sigma.has_value();
  report["stratified_variance"] =
      have_sigmas ? Json(StratifiedMeanVariance(strata, allocation.per_stratum))
                  : Json(nullptr);
  report["metadata"] = Metadata(std::nullopt);
  ctx.Emit(a.out, Dump(report));
}

// ---- mde -------------------------------------------------------------------

struct MdeArgs {
  double mu = 0.0;
  double sigma = 0.0;
  std::optional<int64_t> n;
  std::optional<double> target;
  double alpha = 0.05;
  double power = 0.8;
};

void RunMde(const Context& ctx, const MdeArgs& a) {
  const PowerConfig cfg{a.alpha, a.power};
  Json report;
  report["mu"] = a.mu;
  report["sigma"] = a.sigma;
  report["alpha"] = a.alpha;
  report["power"] = a.power;
  if (a.n) {
    const double mde = Mde(a.mu, a.sigma, *a.n, cfg);
    report["n"] = *a.n;
    report["mde"] = mde;
    report["mde_percent"] = 100.0 * mde;
  } else {
    report["target_mde"] = *a.target;
    report["required_n"] = RequiredN(a.mu, a.sigma, *a.target, cfg);
  }
  report["metadata"] = Metadata(std::nullopt);
  ctx.Emit("", Dump(report));
}

// ---- align -----------------------------------------------------------------

struct AlignArgs {
  std::string dataset;
  std::string by = "popularity";
  int k = kDefaultDepth;
  std::string out;
  std::string table_csv;
  std::string errors_csv;
  std::string histogram;
  int bins = 20;
  double hist_lo = -0.5;
  double hist_hi = 0.5;
  int threads = 1;
};

void RunAlign(const Context& ctx, const AlignArgs& a) {
  if (a.bins < 1 || !(a.hist_lo < a.hist_hi)) {
    throw Error(ErrorCode::kInvalidArgument,
                "histogram needs --bins >= 1 and --hist-lo < --hist-hi");
  }
  const EvalDataset dataset = LoadDataset(ctx, a.dataset, a.k, ArmMode::kSingleArm);
  const AlignmentGrouping grouping =
      a.by == "market" ? AlignmentGrouping::kByMarket : AlignmentGrouping::kByPopularity;
  const AlignmentReport report = BuildAlignmentReport(dataset, grouping, a.threads);
  for (const AlignmentExclusion& e : report.excluded) {
    ctx.Warn("excluded " + e.market + "/" + e.segment + " (n=" + std::to_string(e.n) +
             "): " + e.reason);
  }
  Json json = AlignmentReportToJson(report);
  json["metadata"] = Metadata(std::nullopt);
  ctx.Emit(a.out, Dump(json));
  if (!a.table_csv.empty()) WriteFile(a.table_csv, AlignmentTableCsv(report));
  if (!a.errors_csv.empty()) WriteFile(a.errors_csv, QueryErrorsCsv(report));
  if (!a.histogram.empty()) {
    WriteFile(a.histogram, ErrorHistogramCsv(report, a.bins, a.hist_lo, a.hist_hi));
  }
}

// ---- simulate --------------------------------------------------------------

struct SimulateArgs {
  std::string spec;
  std::string confusion;
  std::string effect;
  uint64_t seed = kDefaultSeed;
  int k = kDefaultDepth;
  double rho_shared = 0.0;
  int threads = 1;
  std::string out;
};

void RunSimulate(const Context& ctx, const SimulateArgs& a) {
  const PopulationSpec spec = ParsePopulationSpec(LoadJson(a.spec));
  const ConfusionMatrix confusion =
      a.confusion.empty() ? ConfusionMatrix::Identity() : ParseConfusion(LoadJson(a.confusion));
  const EffectSpec effect = a.effect.empty() ? EffectSpec{} : ParseEffect(LoadJson(a.effect));
  LabelerOptions options;
  options.rho_shared = a.rho_shared;
  const EvalDataset dataset =
      RunSyntheticExperiment(spec, effect, confusion, a.k, a.seed, options, a.threads);
  ctx.Note("generated " + std::to_string(dataset.records.size()) + " queries with seed " +
           std::to_string(a.seed));
  ctx.Emit(a.out, WriteDatasetJsonl(dataset));
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Whole-page relevance measurement for paired search experiments",
               kToolName};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);
  bool error_json = false;
  app.add_flag("--error-json", error_json, "Print errors as JSON on stderr");

  MetricArgs metric;
  auto* metric_cmd = app.add_subcommand("metric", "Per-query sDCG@K as CSV");
  metric_cmd->add_option("dataset", metric.dataset, "Dataset (JSONL)")->required();
  metric_cmd->add_option("--k", metric.k, "Depth K")->capture_default_str();
  metric_cmd->add_option("--out", metric.out, "Output file (default stdout)");

  EvaluateArgs evaluate;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Topline and segment effects");
  evaluate_cmd->add_option("dataset", evaluate.dataset, "Paired dataset (JSONL)")
      ->required();
  evaluate_cmd->add_option("--design", evaluate.design,
                           "Stratum weights (JSON or CSV)");
  evaluate_cmd->add_option("--estimator", evaluate.estimator)
      ->check(CLI::IsMember({"srs", "stratified"}))
      ->capture_default_str();
  evaluate_cmd->add_option("--segments", evaluate.segments)
      ->check(CLI::IsMember({"popularity", "interest", "stratum"}))
      ->capture_default_str();
  evaluate_cmd->add_option("--alpha", evaluate.alpha)->capture_default_str();
  evaluate_cmd->add_option("--q", evaluate.q, "FDR level")->capture_default_str();
  evaluate_cmd->add_option("--power", evaluate.power)->capture_default_str();
  evaluate_cmd->add_option("--k", evaluate.k)->capture_default_str();
  evaluate_cmd->add_option("--threads", evaluate.threads)->check(CLI::PositiveNumber);
  evaluate_cmd->add_option("--out", evaluate.out);

  DesignArgs design;
  auto* design_cmd = app.add_subcommand("design", "Allocate a sample budget to strata");
  design_cmd->add_option("--strata", design.strata, "Strata (JSON or CSV)")->required();
  design_cmd->add_option("--budget", design.budget)->required();
  design_cmd->add_option("--mode", design.mode)
      ->check(CLI::IsMember({"neyman", "proportional"}))
      ->capture_default_str();
  design_cmd->add_option("--min-per-stratum", design.min_per_stratum)
      ->capture_default_str();
  design_cmd->add_option("--out", design.out);

  MdeArgs mde;
  auto* mde_cmd = app.add_subcommand("mde", "Minimum detectable effect or required n");
  mde_cmd->add_option("--mu", mde.mu, "Baseline metric mean")->required();
  mde_cmd->add_option("--sigma", mde.sigma, "Metric standard deviation")->required();
  auto* n_opt = mde_cmd->add_option("--n", mde.n, "Sample size");
  auto* target_opt = mde_cmd->add_option("--target", mde.target,
                                         "Target MDE as a fraction (0.01 = 1%)");
  n_opt->excludes(target_opt);
  mde_cmd->add_option("--alpha", mde.alpha)->capture_default_str();
  mde_cmd->add_option("--power", mde.power)->capture_default_str();

  AlignArgs align;
  auto* align_cmd = app.add_subcommand("align", "Machine vs reference label alignment");
  align_cmd->add_option("dataset", align.dataset, "Dataset with reference labels")
      ->required();
  align_cmd->add_option("--by", align.by)
      ->check(CLI::IsMember({"popularity", "market"}))
      ->capture_default_str();
  align_cmd->add_option("--k", align.k)->capture_default_str();
  align_cmd->add_option("--out", align.out, "JSON report (default stdout)");
  align_cmd->add_option("--table-csv", align.table_csv, "Per-segment table");
  align_cmd->add_option("--errors-csv", align.errors_csv, "Per-query errors");
  align_cmd->add_option("--histogram", align.histogram, "Binned error counts");
  align_cmd->add_option("--bins", align.bins)->capture_default_str();
  align_cmd->add_option("--hist-lo", align.hist_lo)->capture_default_str();
  align_cmd->add_option("--hist-hi", align.hist_hi)->capture_default_str();
  align_cmd->add_option("--threads", align.threads)->check(CLI::PositiveNumber);

  SimulateArgs simulate;
  auto* simulate_cmd = app.add_subcommand("simulate", "Generate a synthetic experiment");
  simulate_cmd->add_option("--spec", simulate.spec, "Population spec (JSON)")->required();
  simulate_cmd->add_option("--confusion", simulate.confusion,
                           "Labeler confusion matrix (default identity)");
  simulate_cmd->add_option("--effect", simulate.effect, "Treatment effect (JSON)");
  simulate_cmd->add_option("--seed", simulate.seed)->capture_default_str();
  simulate_cmd->add_option("--k", simulate.k)->capture_default_str();
  simulate_cmd->add_option("--rho-shared", simulate.rho_shared)->capture_default_str();
  simulate_cmd->add_option("--threads", simulate.threads)->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--out", simulate.out, "Output JSONL (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      // --help and --version
      app.exit(e, out, err);
      return 0;
    }
    if (error_json) {
      ReportError(err, true, ErrorCode::kInvalidArgument, e.what(), std::nullopt, {});
    } else {
      app.exit(e, out, err);
    }
    return 1;
  }

  const Context ctx{out, err};
  try {
    if (metric_cmd->parsed()) {
      RunMetric(ctx, metric);
    } else if (evaluate_cmd->parsed()) {
      RunEvaluate(ctx, evaluate);
    } else if (design_cmd->parsed()) {
      RunDesign(ctx, design);
    } else if (mde_cmd->parsed()) {
      if (!mde.n && !mde.target) {
        throw Error(ErrorCode::kInvalidArgument, "mde needs --n or --target");
      }
      RunMde(ctx, mde);
    } else if (align_cmd->parsed()) {
      RunAlign(ctx, align);
    } else if (simulate_cmd->parsed()) {
      RunSimulate(ctx, simulate);
    }
  } catch (const ValidationError& e) {
    ReportError(err, error_json, e.code(), e.what(), std::nullopt, e.violations());
    return ExitCodeFor(e.code());
  } catch (const ParseError& e) {
    ReportError(err, error_json, e.code(), e.what(),
                e.line() > 0 ? std::optional<int64_t>(e.line()) : std::nullopt, {});
    return 1;
  } catch (const Error& e) {
    ReportError(err, error_json, e.code(), e.what(), std::nullopt, {});
    return ExitCodeFor(e.code());
  }
  return 0;
}

}  // namespace pagerel
