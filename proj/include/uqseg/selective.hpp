#pragma once
// Sample-level failure detection: risk-coverage (referral) curves and AURC.

#include <span>
#include <string>
#include <vector>

namespace uqseg {

struct CaseScore {
  std::string case_id;
  double u = 0.0;  // inter-model disagreement used for ranking
  double r = 0.0;  // risk, 1 - DSC against consensus
};

struct RiskCoveragePoint {
  double coverage = 0.0;
  double risk = 0.0;
};

using RiskCoverageCurve = std::vector<RiskCoveragePoint>;

// Cases sorted ascending by u (ties broken by case id, stable); point k is
// (k/n, mean risk over the k lowest-u cases).
RiskCoverageCurve risk_coverage_curve(std::span<const CaseScore> scores);

// Discrete mean of the curve risks over k = 1..n.
double aurc(const RiskCoverageCurve& curve);
double aurc(std::span<const CaseScore> scores);

}  // namespace uqseg
