#include "uqseg/ensemble.hpp"

#include <cmath>

#include "uqseg/metrics.hpp"

namespace uqseg {

namespace {

void check_members(const EnsembleBundle& b) {
  require(!b.members.empty(), Err::EmptyEnsemble, "ensemble has no members");
  const ProbMap& head = b.members.front();
  for (const ProbMap& m : b.members) {
    require(m.shape() == head.shape() && m.classes() == head.classes(),
            Err::ShapeMismatch, "ensemble members disagree on (C,Z,Y,X)");
  }
}

}  // namespace

ProbMap aggregate_mean(const EnsembleBundle& bundle) {
  check_members(bundle);
  const ProbMap& head = bundle.members.front();
  Eigen::ArrayXXd acc =
      Eigen::ArrayXXd::Zero(head.channels().rows(), head.channels().cols());
  for (const ProbMap& m : bundle.members) acc += m.channels().cast<double>();
  acc /= double(bundle.members.size());
  return ProbMap(head.shape(), head.classes(), acc.cast<float>(),
                 head.spacing());
}

LabelMap hard_prediction(const ProbMap& p) {
  const ChannelArray& ch = p.channels();
  VoxelArray<std::uint8_t> out(ch.rows());
  const int classes = p.classes();
  for (Index v = 0; v < ch.rows(); ++v) {
    int best = 0;
    float best_value = ch(v, 0);
    for (int c = 1; c < classes; ++c) {
      if (ch(v, c) > best_value) {
        best_value = ch(v, c);
        best = c;
      }
    }
    out[v] = static_cast<std::uint8_t>(best);
  }
  return LabelMap(p.shape(), classes, std::move(out), p.spacing());
}

ScalarMap confidence_map(const ProbMap& p) {
  Eigen::ArrayXd conf = p.channels().rowwise().maxCoeff().cast<double>();
  return ScalarMap(p.shape(), std::move(conf), p.spacing());
}

ScalarMap entropy_map(const ProbMap& p) {
  const ChannelArray& ch = p.channels();
  Eigen::ArrayXd h = Eigen::ArrayXd::Zero(ch.rows());
  for (int c = 0; c < p.classes(); ++c) {
    const Eigen::ArrayXd pc = ch.col(c).cast<double>();
    h -= (pc > 0.0).select(pc * pc.log(), 0.0);
  }
  h /= std::log(double(p.classes()));
  return ScalarMap(p.shape(), std::move(h), p.spacing());
}

ScalarMap rater_variance_map(std::span<const LabelMap> raters, int classes) {
  require(raters.size() >= 2, Err::TooFewRaters,
          "rater variance needs at least 2 raters");
  const LabelMap& head = raters.front();
  for (const LabelMap& r : raters) {
    require(r.shape() == head.shape(), Err::ShapeMismatch,
            "rater maps disagree on shape");
    require(int(r.values().maxCoeff()) < classes, Err::LabelOutOfRange,
            "rater label >= class count");
  }
  const Index voxels = head.shape().voxels();
  Eigen::ArrayXXd fractions = Eigen::ArrayXXd::Zero(voxels, classes);
  for (const LabelMap& r : raters) {
    const auto& v = r.values();
    for (Index i = 0; i < voxels; ++i) fractions(i, v[i]) += 1.0;
  }
  fractions /= double(raters.size());
  Eigen::ArrayXd variance = 1.0 - fractions.square().rowwise().sum();
  return ScalarMap(head.shape(), std::move(variance), head.spacing());
}

double pairwise_disagreement(std::span<const LabelMap> hard_members) {
  require(hard_members.size() >= 2, Err::SingleMember,
          "inter-model disagreement is undefined for a single member");
  double total = 0.0;
  int pairs = 0;
  for (std::size_t i = 0; i < hard_members.size(); ++i) {
    for (std::size_t j = i + 1; j < hard_members.size(); ++j) {
      total += 1.0 - dsc(hard_members[i], hard_members[j]);
      ++pairs;
    }
  }
  return total / double(pairs);
}

double pairwise_disagreement(const EnsembleBundle& bundle) {
  require(bundle.members.size() >= 2, Err::SingleMember,
          "inter-model disagreement is undefined for a single member");
  check_members(bundle);
  std::vector<LabelMap> hard;
  hard.reserve(bundle.members.size());
  for (const ProbMap& m : bundle.members) hard.push_back(hard_prediction(m));
  return pairwise_disagreement(std::span<const LabelMap>(hard));
}

}  // namespace uqseg
