#pragma once
// Aggregation of ensemble member predictions and the voxelwise uncertainty
// maps derived from them. All functions are pure and reentrant.

#include <span>
#include <vector>

#include "uqseg/volume.hpp"

namespace uqseg {

enum class EnsembleKind { CV, DE, Other };

struct EnsembleBundle {
  std::vector<ProbMap> members;
  EnsembleKind kind = EnsembleKind::Other;
};

// Mean class-probability map over the members: p(c,v) = mean_m p_m(c,v).
ProbMap aggregate_mean(const EnsembleBundle& bundle);

// Per-voxel argmax, ties broken by the lowest class index.
LabelMap hard_prediction(const ProbMap& p);

// conf(v) = max_c p_c(v), in [1/C, 1].
ScalarMap confidence_map(const ProbMap& p);

// Normalized predictive entropy: H(v) = -sum_c p ln p / ln C, 0 ln 0 := 0.
ScalarMap entropy_map(const ProbMap& p);

// Per-voxel population variance of one-hot rater labels, summed over classes:
// V(v) = sum_c f_c (1 - f_c) with f_c the fraction of raters voting c.
ScalarMap rater_variance_map(std::span<const LabelMap> raters, int classes);

// Mean over unordered member pairs of (1 - mean foreground-class DSC) of the
// hard predictions.
double pairwise_disagreement(const EnsembleBundle& bundle);
double pairwise_disagreement(std::span<const LabelMap> hard_members);

}  // namespace uqseg
