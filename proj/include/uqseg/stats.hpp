#pragma once
// Paired bootstrap inference between two ensemble configurations.
//
// Resampling contract (fixed so results are reproducible across
// implementations and thread counts): resample b draws index j as
// CounterRng(seed, b).below(j, n). The 95% interval uses the 2.5 percentile
// with linear interpolation between closest ranks; the 97.5 percentile is
// its mirror image (the same interpolation weights applied to the reversed
// order statistics), which makes swapped-configuration results exactly
// anti-symmetric. The two-sided p-value is the add-one smoothed
// sign-crossing estimator
//   p = min(1, 2 * (min(#{d <= 0}, #{d >= 0}) + 1) / (B + 1)).

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "uqseg/selective.hpp"

namespace uqseg {

struct PairedSample {
  std::vector<std::string> case_ids;
  std::vector<double> values_a;  // first configuration (e.g. CV)
  std::vector<double> values_b;  // second configuration (e.g. DE)
};

enum class SigTier { ns, star, dagger };

constexpr const char* tier_label(SigTier t) {
  switch (t) {
    case SigTier::ns: return "ns";
    case SigTier::star: return "*";
    case SigTier::dagger: return "\xE2\x80\xA0";  // dagger sign
  }
  return "ns";
}

constexpr SigTier tier_for_p(double p) {
  if (p < 0.001) return SigTier::dagger;
  if (p < 0.05) return SigTier::star;
  return SigTier::ns;
}

struct BootstrapResult {
  double mean_delta = 0.0;  // mean of per-case differences on the input
  double ci_low = 0.0;      // 95% percentile interval of resampled means
  double ci_high = 0.0;
  double p_value = 1.0;
  SigTier tier = SigTier::ns;
  int resamples = 0;
  std::uint64_t seed = 0;
};

// Paired bootstrap on per-case differences values_b - values_a.
BootstrapResult paired_bootstrap(const PairedSample& sample,
                                 int resamples = 10000, std::uint64_t seed = 0,
                                 int threads = 1);

// Same machinery on (values_b - values_a) * direction, direction in {+1,-1}
// with +1 when higher values are better.
BootstrapResult ood_delta(const PairedSample& sample, int direction,
                          int resamples = 10000, std::uint64_t seed = 0,
                          int threads = 1);

// Paired AURC bootstrap: each resample draws one index multiset, rebuilds the
// risk-coverage curve of both methods on it and differences the AURCs.
BootstrapResult bootstrap_aurc(std::span<const CaseScore> scores_a,
                               std::span<const CaseScore> scores_b,
                               int resamples = 10000, std::uint64_t seed = 0,
                               int threads = 1);

struct MethodSummary {
  double mean = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

// Unpaired case bootstrap of a per-case metric mean.
MethodSummary bootstrap_mean(std::span<const double> values, int resamples,
                             std::uint64_t seed, int threads = 1);

// Unpaired case bootstrap of a single method's AURC (curve rebuilt per
// resample).
MethodSummary bootstrap_aurc_summary(std::span<const CaseScore> scores,
                                     int resamples, std::uint64_t seed,
                                     int threads = 1);

}  // namespace uqseg
