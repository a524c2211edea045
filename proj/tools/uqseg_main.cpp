// uqseg command line: evaluate | simulate | split-plan | report
//
// Exit codes: 0 success, 2 schema/validation error, 3 computation error,
// 4 I/O error.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "uqseg/cli_support.hpp"
#include "uqseg/report.hpp"

namespace fs = std::filesystem;

namespace {

nlohmann::ordered_json load_report_json(const fs::path& path) {
  std::ifstream in(path);
  uqseg::require(in.good(), uqseg::Err::IoError,
                 "cannot open: " + path.string());
  try {
    return nlohmann::ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    uqseg::fail(uqseg::Err::SchemaError,
                "invalid report JSON: " + std::string(e.what()));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Uncertainty evaluation toolkit for segmentation ensembles"};
  app.require_subcommand(1);

  uqseg::EvalOptions options;
  std::string cal_mask = "all";
  std::string ged_distance = "iou";
  std::string ood_direction_file;
  app.add_option("--seed", options.seed, "master RNG seed")
      ->default_val(42);
  app.add_option("--threads", options.threads, "worker threads")
      ->default_val(1);
  app.add_option("--bins", options.binning.n_bins, "calibration bins")
      ->default_val(10);
  app.add_flag("--adaptive-bins", options.binning.adaptive,
               "equal-mass instead of equal-width bins");
  app.add_option("--band-radius", options.band_radius,
                 "boundary band radius in voxels")
      ->default_val(2);
  app.add_option("--cal-mask", cal_mask,
                 "calibration/correlation domain: all|foreground")
      ->check(CLI::IsMember({"all", "foreground"}));
  app.add_option("--ged-distance", ged_distance,
                 "GED segmentation distance: iou|dice")
      ->check(CLI::IsMember({"iou", "dice"}));
  app.add_option("--bootstrap", options.bootstrap, "bootstrap resamples")
      ->default_val(10000);
  app.add_flag("--include-ood", options.include_ood_in_curves,
               "include OOD cases in referral curves");
  app.add_option("--ood-direction-file", ood_direction_file,
                 "JSON map metric -> +1/-1 overriding the OOD effect sign");

  auto* evaluate = app.add_subcommand(
      "evaluate", "evaluate a dataset manifest and write report files");
  std::string manifest_path, out_dir;
  evaluate->add_option("--manifest", manifest_path, "manifest JSON path")
      ->required();
  evaluate->add_option("--out", out_dir, "output directory")->required();

  auto* simulate = app.add_subcommand(
      "simulate", "generate a synthetic multi-rater dataset with surrogate "
                  "cv/de ensembles");
  std::string spec_path, sim_out;
  simulate->add_option("--spec", spec_path, "phantom spec JSON path")
      ->required();
  simulate->add_option("--out", sim_out, "output directory")->required();

  auto* split_plan = app.add_subcommand(
      "split-plan", "plan grouped K-fold or deep-ensemble training splits");
  std::string items_path, plan_out, audit_path;
  int folds = 0, de_members = 0;
  std::uint64_t base_seed = 0;
  split_plan->add_option("--items", items_path,
                         "items CSV (item_id,image_id,rater_id)")
      ->required();
  split_plan->add_option("--k", folds, "fold count for a grouped K-fold plan");
  split_plan->add_option("--de-members", de_members,
                         "member count for a deep-ensemble plan");
  split_plan->add_option("--base-seed", base_seed,
                         "base seed for deep-ensemble member seeds");
  split_plan->add_option("--out", plan_out, "output JSON path");
  split_plan->add_option("--audit", audit_path,
                         "audit an existing fold-plan JSON for leakage");

  auto* report_cmd = app.add_subcommand(
      "report", "render a report.json as a comparison table");
  std::string report_path, report_format = "markdown", report_out;
  report_cmd->add_option("--report", report_path, "report.json path")
      ->required();
  report_cmd->add_option("--format", report_format, "csv|markdown")
      ->check(CLI::IsMember({"csv", "markdown"}));
  report_cmd->add_option("--out", report_out,
                         "output path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    options.cal_mask = cal_mask == "all" ? uqseg::CalMaskMode::All
                                         : uqseg::CalMaskMode::Foreground;
    options.ged_distance = ged_distance == "iou" ? uqseg::GedDistance::IoU
                                                 : uqseg::GedDistance::Dice;
    if (!ood_direction_file.empty())
      options.ood_direction = uqseg::read_ood_direction_file(ood_direction_file);

    if (*evaluate) {
      const uqseg::Manifest manifest = uqseg::parse_manifest(manifest_path);
      const uqseg::ComparisonReport report =
          uqseg::evaluate_manifest(manifest, options);
      uqseg::write_report_files(report, out_dir);
      std::cout << "wrote " << (fs::path(out_dir) / "report.json").string()
                << "\n";
    } else if (*simulate) {
      const uqseg::SimulateSpec spec = uqseg::parse_simulate_spec(spec_path);
      const fs::path manifest = uqseg::simulate_to_dir(spec, sim_out);
      std::cout << "wrote " << manifest.string() << "\n";
    } else if (*split_plan) {
      const auto items = uqseg::read_items_csv(items_path);
      if (!audit_path.empty()) {
        const uqseg::FoldPlan plan = uqseg::fold_plan_from_json(audit_path);
        const auto violations = uqseg::audit_leakage(plan, items);
        for (const auto& v : violations) {
          const char* kind = v.kind == uqseg::ViolationKind::TrainValOverlap
                                 ? "train/val overlap"
                             : v.kind == uqseg::ViolationKind::MissingItem
                                 ? "item missing from all val sets"
                             : v.kind == uqseg::ViolationKind::DuplicateItem
                                 ? "item in multiple val sets"
                                 : "unknown item";
          std::cout << "violation: fold=" << v.fold << " id=" << v.id << " ("
                    << kind << ")\n";
        }
        std::cout << (violations.empty() ? "audit clean\n"
                                         : "audit found violations\n");
        return violations.empty() ? 0 : 2;
      }
      uqseg::require(
          (folds > 0) != (de_members > 0), uqseg::Err::InvalidArgument,
          "specify exactly one of --k or --de-members");
      std::string text;
      if (folds > 0) {
        const uqseg::FoldPlan plan =
            uqseg::grouped_kfold(items, folds, options.seed);
        const auto violations = uqseg::audit_leakage(plan, items);
        uqseg::require(violations.empty(), uqseg::Err::InvalidArgument,
                       "generated plan failed its own leakage audit");
        text = uqseg::fold_plan_to_json(plan);
      } else {
        text = uqseg::de_plan_to_json(
            uqseg::de_plan(items, de_members, base_seed));
      }
      if (plan_out.empty()) {
        std::cout << text;
      } else {
        std::ofstream out(plan_out, std::ios::binary | std::ios::trunc);
        uqseg::require(out.good(), uqseg::Err::IoError,
                       "cannot write " + plan_out);
        out << text;
        std::cout << "wrote " << plan_out << "\n";
      }
    } else if (*report_cmd) {
      const auto report = load_report_json(report_path);
      const std::string text = uqseg::render_report(
          report, report_format == "csv" ? uqseg::ReportFormat::Csv
                                         : uqseg::ReportFormat::Markdown);
      if (report_out.empty()) {
        std::cout << text;
      } else {
        std::ofstream out(report_out, std::ios::binary | std::ios::trunc);
        uqseg::require(out.good(), uqseg::Err::IoError,
                       "cannot write " + report_out);
        out << text;
      }
    }
  } catch (const uqseg::UqError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return uqseg::exit_code(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
