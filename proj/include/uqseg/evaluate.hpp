#pragma once
// Per-case evaluation: turns one case's member predictions, rater masks and
// consensus into a MetricRecord via the ensemble/metrics modules.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "uqseg/ensemble.hpp"
#include "uqseg/metrics.hpp"

namespace uqseg {

enum class CalMaskMode {
  All,         // every voxel enters calibration / correlation domains
  Foreground,  // union of predicted and rater foregrounds
};

struct EvalOptions {
  BinningSpec binning{10, false};
  int band_radius = 2;
  CalMaskMode cal_mask = CalMaskMode::All;
  GedDistance ged_distance = GedDistance::IoU;
  int bootstrap = 10000;
  std::uint64_t seed = 42;
  int threads = 1;
  bool include_ood_in_curves = false;
  // per-metric override of the OOD effect sign (+1 higher-is-better)
  std::map<std::string, int> ood_direction;
};

struct CaseInput {
  std::string id;
  bool ood = false;
  std::vector<ProbMap> members;
  std::vector<LabelMap> raters;
  LabelMap consensus;
};

MetricRecord evaluate_case(const CaseInput& in, const EvalOptions& options);

}  // namespace uqseg
