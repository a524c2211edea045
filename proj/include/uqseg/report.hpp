#pragma once
// Comparison report: paired CV-vs-DE statistics per metric and split, plus
// per-case records and referral-curve points, with deterministic JSON/CSV
// emission. Table values render under the x100 / one-decimal /
// round-half-to-even display rule.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "uqseg/manifest.hpp"
#include "uqseg/selective.hpp"
#include "uqseg/stats.hpp"

namespace uqseg {

inline constexpr const char* kReportSchema = "uqseg-report-v1";

// Metrics compared between configurations, with their preferred direction
// (+1 higher-is-better). Unknown names raise UnknownMetric.
int metric_direction(const std::string& metric);
const std::vector<std::string>& comparison_metrics();

struct MetricComparison {
  std::string metric;
  std::string split;  // "ID" or "OOD"
  std::optional<MethodSummary> cv;
  std::optional<MethodSummary> de;
  std::optional<BootstrapResult> delta;  // DE-CV; OOD rows are (DE-CV)*s
  int direction = 0;                     // s applied to OOD deltas, else 0
};

struct ComparisonReport {
  std::string dataset;
  EvalOptions options;
  std::vector<MetricRecord> cv_records;  // empty when the kind is absent
  std::vector<MetricRecord> de_records;
  std::vector<std::pair<std::string, RiskCoverageCurve>> curves;
  std::vector<MetricComparison> rows;
};

// Assembles summaries, paired deltas and referral curves from per-case
// records. Records must be aligned by case when both kinds are present.
ComparisonReport build_report(const std::string& dataset,
                              std::vector<MetricRecord> cv_records,
                              std::vector<MetricRecord> de_records,
                              const EvalOptions& options);

// Full evaluation pipeline over a parsed manifest.
ComparisonReport evaluate_manifest(const Manifest& manifest,
                                   const EvalOptions& options);

nlohmann::ordered_json report_to_json(const ComparisonReport& report);

// x100, one decimal, ties to even; forced_sign prepends '+' on >= 0.
std::string format_x100(double value, bool forced_sign = false);

std::string render_table_csv(const nlohmann::ordered_json& report);
std::string render_percase_csv(const nlohmann::ordered_json& report);
std::string render_referral_csv(const nlohmann::ordered_json& report);

enum class ReportFormat { Csv, Markdown };

// Table view with the better method marked per metric direction.
std::string render_report(const nlohmann::ordered_json& report,
                          ReportFormat format);

// Writes report.json, table.csv, percase.csv and referral.csv; partial
// outputs are removed if any write fails.
void write_report_files(const ComparisonReport& report,
                        const std::filesystem::path& out_dir);

}  // namespace uqseg
