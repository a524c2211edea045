#pragma once
// Case-level segmentation and uncertainty metrics: Dice overlap, rater-
// averaged calibration errors (ACE, boundary-aware ECE), normalized cross-
// correlation, generalized energy distance and the majority-vote consensus
// fallback. Pure functions; per-case evaluation parallelizes trivially.

#include <span>
#include <string>
#include <vector>

#include "uqseg/volume.hpp"

namespace uqseg {

struct BinningSpec {
  int n_bins = 10;
  bool adaptive = false;  // equal-mass (quantile) edges instead of equal width
};

// Confidence bins over [0,1]. A value lands in the largest bin i with
// edges[i] <= v, capped at the last bin, so bins are [e_i, e_{i+1}) with the
// final bin closed.
struct CalibrationBinning {
  std::vector<double> edges;      // n_bins + 1 ascending, edges[0]=0, back=1
  std::vector<Index> counts;      // |B_i|
  std::vector<double> mean_conf;  // 0 for empty bins
  std::vector<double> accuracy;   // rater-averaged accuracy, 0 for empty bins
  Index total = 0;
};

CalibrationBinning bin_calibration(const Eigen::ArrayXd& conf,
                                   const Eigen::ArrayXd& agreement,
                                   const BinningSpec& spec);

// Fraction of raters whose label matches the prediction, per voxel.
Eigen::ArrayXd rater_agreement(const LabelMap& prediction,
                               std::span<const LabelMap> raters);

// Mean foreground-class Dice overlap; a class empty in both maps scores 1.
double dsc(const LabelMap& a, const LabelMap& b);

// Average Calibration Error: mean |accuracy - mean confidence| over
// non-empty bins, each bin weighted equally.
double ace(const ScalarMap& confidence, const LabelMap& prediction,
           std::span<const LabelMap> raters, const BinningSpec& spec = {},
           const MaskArray* mask = nullptr);

// Voxels within Chebyshev distance `radius` of a consensus label boundary
// (a boundary voxel has a 26-neighbor with a different label).
MaskArray boundary_band(const LabelMap& consensus, int radius);

// Expected Calibration Error restricted to the consensus boundary band,
// bins weighted by their share of band voxels.
double ba_ece(const ScalarMap& confidence, const LabelMap& prediction,
              std::span<const LabelMap> raters, const LabelMap& consensus,
              int band_radius = 2, const BinningSpec& spec = {});

struct NccResult {
  double value = 0.0;
  bool degenerate = false;  // a constant input; value forced to 0
};

// Pearson correlation over the voxel domain (optionally masked).
NccResult ncc(const ScalarMap& a, const ScalarMap& b,
              const MaskArray* mask = nullptr);

enum class GedDistance { IoU, Dice };

// 1 - mean foreground-class overlap (IoU by default), both-empty class := 1.
double seg_distance(const LabelMap& a, const LabelMap& b,
                    GedDistance d = GedDistance::IoU);

// Generalized energy distance between the member and rater label sets.
// Within-set expectations run over all ordered pairs including the diagonal.
double ged(std::span<const LabelMap> members, std::span<const LabelMap> raters,
           GedDistance d = GedDistance::IoU);

// Per-voxel most frequent rater label, ties broken by lowest class index.
LabelMap majority_consensus(std::span<const LabelMap> raters, int classes);

// Per-case metric row consumed by the comparison statistics.
struct MetricRecord {
  std::string case_id;
  bool ood = false;
  double dsc = 0.0;
  double ace = 0.0;
  double ba_ece = 0.0;
  double ncc = 0.0;
  double ged = 0.0;
  double u = 0.0;  // inter-model disagreement
  double r = 0.0;  // 1 - dsc
};

}  // namespace uqseg
