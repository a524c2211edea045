#pragma once
// Synthetic multi-rater phantoms plus surrogate ensemble members.
//
// Each case is a smooth blob defined by a signed-distance-like field; raters
// threshold that field at seeded offsets plus low-frequency spatial noise, so
// annotation ambiguity concentrates at boundaries. Every case additionally
// carries one tagged structural variant (a lobe) whose geometry is derived
// from the concept tag. Surrogate members turn the field into softmax maps
// through prototype-distance logits; members disagree through
//   - seed noise: a smooth field added to the distance field, and
//   - an exposure penalty: smooth multiplicative per-class logit gains
//     applied inside the regions of concepts the member never trained on.
// CV-style members miss exactly the concepts of their validation fold, DE
// members see everything, which makes the fold-vs-seed disagreement
// decomposition directly testable.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "uqseg/evaluate.hpp"
#include "uqseg/volume.hpp"

namespace uqseg {

struct PhantomSpec {
  GridShape grid{32, 32, 32};
  int classes = 2;
  int n_cases = 60;
  int n_raters = 3;
  double sigma_rater = 1.0;   // rater threshold offset scale, voxels
  int concept_count = 0;      // 0 -> one private concept per case
  double ood_fraction = 0.0;  // trailing fraction of cases flagged OOD
  std::uint64_t seed = 1;
};

struct PhantomCase {
  std::string id;
  std::string group;  // image identity used for split grouping
  Volume<float> image;
  Volume<float> gt_field;            // signed distance-like logit source
  std::vector<double> class_levels;  // thresholds separating the C classes
  std::vector<int> concepts;
  std::vector<MaskArray> concept_regions;  // aligned with concepts
  std::vector<LabelMap> raters;
  LabelMap consensus;
  bool ood = false;
};

std::vector<PhantomCase> make_phantom_dataset(const PhantomSpec& spec);

struct SurrogateMember {
  std::uint64_t seed = 0;
  std::vector<int> exposure;  // sorted concept tags seen in training
  double sigma_seed = 0.1;    // seed-noise field scale, voxels
  double sigma_data = 0.5;    // exposure-gap gain amplitude
  double temperature = 2.0;   // logit temperature
};

ProbMap surrogate_predict(const SurrogateMember& member,
                          const PhantomCase& c);

// Support of the exposure perturbation for this (member, case): the union of
// regions whose concept tag the member has not seen.
MaskArray exposure_support(const SurrogateMember& member,
                           const PhantomCase& c);

struct SurrogatePlans {
  std::vector<SurrogateMember> cv;  // member k misses its val-fold concepts
  std::vector<SurrogateMember> de;  // full exposure, seeds from de_plan
};

SurrogatePlans plan_surrogates(std::span<const PhantomCase> cases, int k,
                               int m, double sigma_seed, double sigma_data,
                               double temperature, std::uint64_t seed);

struct ExperimentConfig {
  PhantomSpec phantom;
  int k = 5;
  int m = 5;
  double sigma_seed = 0.1;
  double sigma_data = 0.5;
  double temperature = 2.0;
  EvalOptions eval;
  int threads = 1;
};

struct ExperimentResult {
  std::vector<MetricRecord> cv;  // aligned by case order
  std::vector<MetricRecord> de;
};

// Scores every phantom case with both a CV-style and a DE-style surrogate
// ensemble under otherwise identical settings.
ExperimentResult run_experiment(const ExperimentConfig& config);

}  // namespace uqseg
