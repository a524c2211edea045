#include "uqseg/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "uqseg/parallel.hpp"
#include "uqseg/rng.hpp"

namespace uqseg {

namespace {

using nlohmann::ordered_json;

struct MetricAccessor {
  const char* name;
  double MetricRecord::*field;
  int direction;  // +1 higher is better
};

constexpr MetricAccessor kPerCaseMetrics[] = {
    {"dsc", &MetricRecord::dsc, +1},   {"ace", &MetricRecord::ace, -1},
    {"ba_ece", &MetricRecord::ba_ece, -1}, {"ncc", &MetricRecord::ncc, +1},
    {"ged", &MetricRecord::ged, -1},
};

std::uint64_t row_seed(std::uint64_t master, const std::string& metric,
                       const std::string& split, const char* role) {
  return mix_seed(master, fnv1a64(metric), fnv1a64(split), fnv1a64(role));
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

int metric_direction(const std::string& metric) {
  if (metric == "dsc" || metric == "ncc") return +1;
  if (metric == "ace" || metric == "ba_ece" || metric == "ged" ||
      metric == "aurc")
    return -1;
  fail(Err::UnknownMetric, "no direction registered for \"" + metric + "\"");
}

const std::vector<std::string>& comparison_metrics() {
  static const std::vector<std::string> metrics = {"dsc", "ace", "ba_ece",
                                                   "ncc", "ged", "aurc"};
  return metrics;
}

ComparisonReport build_report(const std::string& dataset,
                              std::vector<MetricRecord> cv_records,
                              std::vector<MetricRecord> de_records,
                              const EvalOptions& options) {
  const bool has_cv = !cv_records.empty();
  const bool has_de = !de_records.empty();
  require(has_cv || has_de, Err::EmptyInput, "no per-case records");
  if (has_cv && has_de) {
    require(cv_records.size() == de_records.size(), Err::MisalignedCases,
            "CV and DE record counts differ");
    for (std::size_t i = 0; i < cv_records.size(); ++i) {
      require(cv_records[i].case_id == de_records[i].case_id &&
                  cv_records[i].ood == de_records[i].ood,
              Err::MisalignedCases,
              "CV/DE records are not case-aligned: " + cv_records[i].case_id);
    }
  }

  ComparisonReport report;
  report.dataset = dataset;
  report.options = options;
  report.cv_records = std::move(cv_records);
  report.de_records = std::move(de_records);

  const std::vector<MetricRecord>& base =
      has_cv ? report.cv_records : report.de_records;
  std::vector<std::size_t> id_idx, ood_idx;
  for (std::size_t i = 0; i < base.size(); ++i)
    (base[i].ood ? ood_idx : id_idx).push_back(i);

  auto gather = [](const std::vector<MetricRecord>& records,
                   const std::vector<std::size_t>& idx,
                   double MetricRecord::*field) {
    std::vector<double> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) out.push_back(records[i].*field);
    return out;
  };
  auto gather_scores = [](const std::vector<MetricRecord>& records,
                          const std::vector<std::size_t>& idx) {
    std::vector<CaseScore> out;
    out.reserve(idx.size());
    for (std::size_t i : idx)
      out.push_back({records[i].case_id, records[i].u, records[i].r});
    return out;
  };

  for (const std::string& split : {std::string("ID"), std::string("OOD")}) {
    const auto& idx = split == "ID" ? id_idx : ood_idx;
    if (idx.empty()) continue;

    for (const MetricAccessor& metric : kPerCaseMetrics) {
      MetricComparison row;
      row.metric = metric.name;
      row.split = split;
      if (has_cv)
        row.cv = bootstrap_mean(
            gather(report.cv_records, idx, metric.field), options.bootstrap,
            row_seed(options.seed, row.metric, split, "cv"), options.threads);
      if (has_de)
        row.de = bootstrap_mean(
            gather(report.de_records, idx, metric.field), options.bootstrap,
            row_seed(options.seed, row.metric, split, "de"), options.threads);
      if (has_cv && has_de && idx.size() >= 2) {
        PairedSample sample;
        for (std::size_t i : idx) sample.case_ids.push_back(base[i].case_id);
        sample.values_a = gather(report.cv_records, idx, metric.field);
        sample.values_b = gather(report.de_records, idx, metric.field);
        const std::uint64_t seed =
            row_seed(options.seed, row.metric, split, "delta");
        if (split == "OOD") {
          const auto it = options.ood_direction.find(row.metric);
          row.direction = it != options.ood_direction.end()
                              ? it->second
                              : metric.direction;
          row.delta = ood_delta(sample, row.direction, options.bootstrap,
                                seed, options.threads);
        } else {
          row.delta = paired_bootstrap(sample, options.bootstrap, seed,
                                       options.threads);
        }
      }
      report.rows.push_back(std::move(row));
    }

    MetricComparison row;
    row.metric = "aurc";
    row.split = split;
    if (has_cv)
      row.cv = bootstrap_aurc_summary(
          gather_scores(report.cv_records, idx), options.bootstrap,
          row_seed(options.seed, row.metric, split, "cv"), options.threads);
    if (has_de)
      row.de = bootstrap_aurc_summary(
          gather_scores(report.de_records, idx), options.bootstrap,
          row_seed(options.seed, row.metric, split, "de"), options.threads);
    if (has_cv && has_de && idx.size() >= 2) {
      const std::uint64_t seed =
          row_seed(options.seed, row.metric, split, "delta");
      BootstrapResult delta = bootstrap_aurc(
          gather_scores(report.cv_records, idx),
          gather_scores(report.de_records, idx), options.bootstrap, seed,
          options.threads);
      if (split == "OOD") {
        // report the OOD effect as DE improvement (DE-CV)*s
        const auto it = options.ood_direction.find(row.metric);
        const int s = it != options.ood_direction.end() ? it->second
                                                        : metric_direction(
                                                              row.metric);
        row.direction = s;
        if (s == -1) {
          delta.mean_delta = -delta.mean_delta;
          std::swap(delta.ci_low, delta.ci_high);
          delta.ci_low = -delta.ci_low;
          delta.ci_high = -delta.ci_high;
        }
      }
      row.delta = delta;
    }
    report.rows.push_back(std::move(row));
  }

  const auto& curve_idx =
      options.include_ood_in_curves
          ? [&] {
              std::vector<std::size_t> all(base.size());
              for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
              return all;
            }()
          : id_idx;
  if (!curve_idx.empty()) {
    if (has_cv)
      report.curves.emplace_back(
          "cv", risk_coverage_curve(gather_scores(report.cv_records,
                                                  curve_idx)));
    if (has_de)
      report.curves.emplace_back(
          "de", risk_coverage_curve(gather_scores(report.de_records,
                                                  curve_idx)));
  }
  return report;
}

ComparisonReport evaluate_manifest(const Manifest& manifest,
                                   const EvalOptions& options) {
  for (const std::string& kind : manifest.kinds)
    require(kind == "cv" || kind == "de", Err::SchemaError,
            "unsupported ensemble kind \"" + kind + "\" (expected cv/de)");
  const bool has_cv =
      std::find(manifest.kinds.begin(), manifest.kinds.end(), "cv") !=
      manifest.kinds.end();
  const bool has_de =
      std::find(manifest.kinds.begin(), manifest.kinds.end(), "de") !=
      manifest.kinds.end();

  std::vector<MetricRecord> cv_records(has_cv ? manifest.cases.size() : 0);
  std::vector<MetricRecord> de_records(has_de ? manifest.cases.size() : 0);
  parallel_for(
      std::int64_t(manifest.cases.size()), options.threads,
      [&](std::int64_t i) {
        const ManifestCase& c = manifest.cases[std::size_t(i)];
        if (has_cv)
          cv_records[std::size_t(i)] =
              evaluate_case(load_case(manifest, c, "cv"), options);
        if (has_de)
          de_records[std::size_t(i)] =
              evaluate_case(load_case(manifest, c, "de"), options);
      });
  return build_report(manifest.dataset, std::move(cv_records),
                      std::move(de_records), options);
}

namespace {

ordered_json summary_json(const std::optional<MethodSummary>& s) {
  if (!s) return nullptr;
  ordered_json j;
  j["mean"] = s->mean;
  j["ci_low"] = s->ci_low;
  j["ci_high"] = s->ci_high;
  return j;
}

ordered_json delta_json(const std::optional<BootstrapResult>& d) {
  if (!d) return nullptr;
  ordered_json j;
  j["mean"] = d->mean_delta;
  j["ci_low"] = d->ci_low;
  j["ci_high"] = d->ci_high;
  j["p"] = d->p_value;
  j["tier"] = tier_label(d->tier);
  j["resamples"] = d->resamples;
  return j;
}

}  // namespace

nlohmann::ordered_json report_to_json(const ComparisonReport& report) {
  ordered_json j;
  j["schema"] = kReportSchema;
  j["dataset"] = report.dataset;

  ordered_json opts;
  opts["bins"] = report.options.binning.n_bins;
  opts["adaptive_bins"] = report.options.binning.adaptive;
  opts["band_radius"] = report.options.band_radius;
  opts["cal_mask"] =
      report.options.cal_mask == CalMaskMode::All ? "all" : "foreground";
  opts["ged_distance"] =
      report.options.ged_distance == GedDistance::IoU ? "iou" : "dice";
  opts["bootstrap"] = report.options.bootstrap;
  opts["seed"] = report.options.seed;
  opts["include_ood_in_curves"] = report.options.include_ood_in_curves;
  j["options"] = std::move(opts);

  ordered_json methods = ordered_json::array();
  if (!report.cv_records.empty()) methods.push_back("cv");
  if (!report.de_records.empty()) methods.push_back("de");
  j["methods"] = std::move(methods);

  ordered_json per_case = ordered_json::array();
  auto emit_records = [&](const char* method,
                          const std::vector<MetricRecord>& records) {
    for (const MetricRecord& r : records) {
      ordered_json row;
      row["case"] = r.case_id;
      row["method"] = method;
      row["ood"] = r.ood;
      row["dsc"] = r.dsc;
      row["ace"] = r.ace;
      row["ba_ece"] = r.ba_ece;
      row["ncc"] = r.ncc;
      row["ged"] = r.ged;
      row["u"] = r.u;
      row["r"] = r.r;
      per_case.push_back(std::move(row));
    }
  };
  emit_records("cv", report.cv_records);
  emit_records("de", report.de_records);
  j["per_case"] = std::move(per_case);

  ordered_json curves;
  for (const auto& [method, curve] : report.curves) {
    ordered_json points = ordered_json::array();
    for (const RiskCoveragePoint& p : curve)
      points.push_back({p.coverage, p.risk});
    curves[method] = std::move(points);
  }
  j["curves"] = std::move(curves);

  ordered_json rows = ordered_json::array();
  for (const MetricComparison& row : report.rows) {
    ordered_json r;
    r["metric"] = row.metric;
    r["split"] = row.split;
    r["cv"] = summary_json(row.cv);
    r["de"] = summary_json(row.de);
    r["delta"] = delta_json(row.delta);
    if (row.direction != 0) r["direction"] = row.direction;
    rows.push_back(std::move(r));
  }
  j["comparisons"] = std::move(rows);
  return j;
}

std::string format_x100(double value, bool forced_sign) {
  const double scaled = value * 100.0;
  const long long tenths = std::llrint(scaled * 10.0);
  const char* sign = tenths < 0 ? "-" : (forced_sign ? "+" : "");
  const long long mag = tenths < 0 ? -tenths : tenths;
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%s%lld.%lld", sign, mag / 10, mag % 10);
  return buf;
}

std::string render_table_csv(const nlohmann::ordered_json& report) {
  std::string out = "metric,setting,value,ci_low,ci_high,signif\n";
  for (const auto& row : report.at("comparisons")) {
    const std::string metric = row.at("metric").get<std::string>();
    const std::string split = row.at("split").get<std::string>();
    const auto& delta = row.at("delta");
    const std::string tier =
        delta.is_null() || delta.at("tier").get<std::string>() == "ns"
            ? ""
            : delta.at("tier").get<std::string>();
    if (split == "ID") {
      if (!row.at("cv").is_null()) {
        const auto& s = row.at("cv");
        out += metric + ",cv," + format_x100(s.at("mean").get<double>()) +
               "," + format_x100(s.at("ci_low").get<double>()) + "," +
               format_x100(s.at("ci_high").get<double>()) + ",\n";
      }
      if (!row.at("de").is_null()) {
        const auto& s = row.at("de");
        out += metric + ",de," + format_x100(s.at("mean").get<double>()) +
               "," + format_x100(s.at("ci_low").get<double>()) + "," +
               format_x100(s.at("ci_high").get<double>()) + "," + tier + "\n";
      }
    } else if (!delta.is_null()) {
      out += metric + ",ood_delta," +
             format_x100(delta.at("mean").get<double>(), true) + "," +
             format_x100(delta.at("ci_low").get<double>(), true) + "," +
             format_x100(delta.at("ci_high").get<double>(), true) + "," +
             tier + "\n";
    }
  }
  return out;
}

std::string render_percase_csv(const nlohmann::ordered_json& report) {
  std::string out = "case,method,ood,dsc,ace,ba_ece,ncc,ged,u,r\n";
  for (const auto& row : report.at("per_case")) {
    out += row.at("case").get<std::string>() + "," +
           row.at("method").get<std::string>() + "," +
           (row.at("ood").get<bool>() ? "1" : "0");
    for (const char* field : {"dsc", "ace", "ba_ece", "ncc", "ged", "u", "r"})
      out += "," + g17(row.at(field).get<double>());
    out += "\n";
  }
  return out;
}

std::string render_referral_csv(const nlohmann::ordered_json& report) {
  std::string out = "method,coverage,risk\n";
  for (const auto& [method, points] : report.at("curves").items()) {
    for (const auto& p : points) {
      out += method + "," + g17(p.at(0).get<double>()) + "," +
             g17(p.at(1).get<double>()) + "\n";
    }
  }
  return out;
}

std::string render_report(const nlohmann::ordered_json& report,
                          ReportFormat format) {
  struct Line {
    std::string metric, split, cv, de, delta, ci, p, signif, better;
  };
  std::vector<Line> lines;
  for (const auto& row : report.at("comparisons")) {
    Line line;
    line.metric = row.at("metric").get<std::string>();
    line.split = row.at("split").get<std::string>();
    const int direction = metric_direction(line.metric);
    const auto& cv = row.at("cv");
    const auto& de = row.at("de");
    if (!cv.is_null())
      line.cv = format_x100(cv.at("mean").get<double>()) + " (" +
                format_x100(cv.at("ci_low").get<double>()) + ", " +
                format_x100(cv.at("ci_high").get<double>()) + ")";
    if (!de.is_null())
      line.de = format_x100(de.at("mean").get<double>()) + " (" +
                format_x100(de.at("ci_low").get<double>()) + ", " +
                format_x100(de.at("ci_high").get<double>()) + ")";
    const auto& delta = row.at("delta");
    if (!delta.is_null()) {
      line.delta = format_x100(delta.at("mean").get<double>(), true);
      line.ci = "(" + format_x100(delta.at("ci_low").get<double>(), true) +
                ", " + format_x100(delta.at("ci_high").get<double>(), true) +
                ")";
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.4g", delta.at("p").get<double>());
      line.p = buf;
      const std::string tier = delta.at("tier").get<std::string>();
      line.signif = tier == "ns" ? "" : tier;
    }
    if (!cv.is_null() && !de.is_null()) {
      const double vc = cv.at("mean").get<double>();
      const double vd = de.at("mean").get<double>();
      if (vc == vd)
        line.better = "tie";
      else if ((vd > vc) == (direction > 0))
        line.better = "de";
      else
        line.better = "cv";
    }
    lines.push_back(std::move(line));
  }

  std::string out;
  if (format == ReportFormat::Csv) {
    out = "metric,split,cv,de,delta,delta_ci,p,signif,better\n";
    for (const Line& l : lines) {
      std::string cv = l.cv, de = l.de, ci = l.ci;
      for (std::string* s : {&cv, &de, &ci})
        if (s->find(',') != std::string::npos) *s = "\"" + *s + "\"";
      out += l.metric + "," + l.split + "," + cv + "," + de + "," + l.delta +
             "," + ci + "," + l.p + "," + l.signif + "," + l.better + "\n";
    }
  } else {
    out =
        "| metric | split | cv | de | delta | 95% CI | p | signif | better "
        "|\n|---|---|---|---|---|---|---|---|---|\n";
    for (const Line& l : lines) {
      out += "| " + l.metric + " | " + l.split + " | " + l.cv + " | " + l.de +
             " | " + l.delta + " | " + l.ci + " | " + l.p + " | " + l.signif +
             " | " + l.better + " |\n";
    }
  }
  return out;
}

void write_report_files(const ComparisonReport& report,
                        const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  require(!ec, Err::IoError, "cannot create " + out_dir.string());

  std::vector<std::filesystem::path> written;
  auto write_file = [&](const std::filesystem::path& p,
                        const std::string& text) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    require(out.good(), Err::IoError, "cannot write " + p.string());
    out << text;
    require(out.good(), Err::IoError, "write failed: " + p.string());
    written.push_back(p);
  };

  try {
    const ordered_json j = report_to_json(report);
    write_file(out_dir / "report.json", j.dump(2) + "\n");
    write_file(out_dir / "table.csv", render_table_csv(j));
    write_file(out_dir / "percase.csv", render_percase_csv(j));
    write_file(out_dir / "referral.csv", render_referral_csv(j));
  } catch (...) {
    for (const auto& p : written) std::filesystem::remove(p, ec);
    throw;
  }
}

}  // namespace uqseg
