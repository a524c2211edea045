#include "uqseg/evaluate.hpp"

namespace uqseg {

MetricRecord evaluate_case(const CaseInput& in, const EvalOptions& options) {
  require(!in.members.empty(), Err::EmptyEnsemble,
          "case " + in.id + " has no ensemble members");
  require(!in.raters.empty(), Err::TooFewRaters,
          "case " + in.id + " has no rater annotations");
  const int classes = in.consensus.classes();
  for (const ProbMap& m : in.members)
    require(m.classes() == classes && m.shape() == in.consensus.shape(),
            Err::ShapeInconsistency,
            "case " + in.id + ": member grid/classes mismatch");
  for (const LabelMap& r : in.raters)
    require(r.classes() == classes && r.shape() == in.consensus.shape(),
            Err::ShapeInconsistency,
            "case " + in.id + ": rater grid/classes mismatch");

  EnsembleBundle bundle{in.members, EnsembleKind::Other};
  const ProbMap mean = aggregate_mean(bundle);
  const LabelMap prediction = hard_prediction(mean);
  const ScalarMap confidence = confidence_map(mean);
  const ScalarMap entropy = entropy_map(mean);

  MaskArray mask;
  const MaskArray* mask_ptr = nullptr;
  if (options.cal_mask == CalMaskMode::Foreground) {
    mask = prediction.values() > std::uint8_t(0);
    for (const LabelMap& r : in.raters)
      mask = mask || (r.values() > std::uint8_t(0));
    mask_ptr = &mask;
  }

  MetricRecord rec;
  rec.case_id = in.id;
  rec.ood = in.ood;
  rec.dsc = dsc(prediction, in.consensus);
  rec.r = 1.0 - rec.dsc;
  rec.ace = ace(confidence, prediction, in.raters, options.binning, mask_ptr);
  rec.ba_ece = ba_ece(confidence, prediction, in.raters, in.consensus,
                      options.band_radius, options.binning);

  // A single rater yields a constant (zero) variance map, so the correlation
  // degenerates to 0 rather than erroring out.
  if (in.raters.size() >= 2) {
    const ScalarMap variance = rater_variance_map(in.raters, classes);
    rec.ncc = ncc(entropy, variance, mask_ptr).value;
  } else {
    rec.ncc = 0.0;
  }

  std::vector<LabelMap> hard;
  hard.reserve(in.members.size());
  for (const ProbMap& m : in.members) hard.push_back(hard_prediction(m));
  rec.ged = ged(hard, in.raters, options.ged_distance);
  rec.u = pairwise_disagreement(std::span<const LabelMap>(hard));
  return rec;
}

}  // namespace uqseg
