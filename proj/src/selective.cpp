#include "uqseg/selective.hpp"

#include <algorithm>
#include <cmath>

#include "uqseg/errors.hpp"

namespace uqseg {

RiskCoverageCurve risk_coverage_curve(std::span<const CaseScore> scores) {
  require(!scores.empty(), Err::EmptyInput, "no case scores");
  std::vector<const CaseScore*> order;
  order.reserve(scores.size());
  for (const CaseScore& s : scores) {
    require(std::isfinite(s.u) && std::isfinite(s.r), Err::InvalidArgument,
            "non-finite case score");
    order.push_back(&s);
  }
  std::stable_sort(order.begin(), order.end(),
                   [](const CaseScore* a, const CaseScore* b) {
                     if (a->u != b->u) return a->u < b->u;
                     return a->case_id < b->case_id;
                   });
  const double n = double(scores.size());
  RiskCoverageCurve curve;
  curve.reserve(scores.size());
  double risk_sum = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    risk_sum += order[k]->r;
    curve.push_back({double(k + 1) / n, risk_sum / double(k + 1)});
  }
  return curve;
}

double aurc(const RiskCoverageCurve& curve) {
  require(!curve.empty(), Err::EmptyInput, "empty risk-coverage curve");
  double total = 0.0;
  for (const RiskCoveragePoint& p : curve) total += p.risk;
  return total / double(curve.size());
}

double aurc(std::span<const CaseScore> scores) {
  return aurc(risk_coverage_curve(scores));
}

}  // namespace uqseg
