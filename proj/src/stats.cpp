#include "uqseg/stats.hpp"

#include <algorithm>
#include <cmath>

#include "uqseg/errors.hpp"
#include "uqseg/parallel.hpp"
#include "uqseg/rng.hpp"

namespace uqseg {

namespace {

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

// 2.5 percentile by linear interpolation between closest ranks; the 97.5
// percentile is the mirrored interpolation on the reversed order statistics,
// so negating every value exactly swaps and negates the endpoints.
Interval percentile_interval(std::vector<double>& values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  const double pos = 0.025 * double(n - 1);
  const std::size_t lo = std::size_t(std::floor(pos));
  const double frac = pos - double(lo);
  const std::size_t next = std::min(lo + 1, n - 1);
  const std::size_t hi = n - 1 - lo;
  const std::size_t hi_next = hi == 0 ? 0 : hi - 1;
  Interval out;
  out.low = values[lo] + (values[next] - values[lo]) * frac;
  out.high = values[hi] + (values[hi_next] - values[hi]) * frac;
  return out;
}

BootstrapResult summarize(double mean_delta, std::vector<double> deltas,
                          std::uint64_t seed) {
  BootstrapResult out;
  out.mean_delta = mean_delta;
  out.resamples = int(deltas.size());
  out.seed = seed;
  std::int64_t le = 0, ge = 0;
  for (double d : deltas) {
    if (d <= 0.0) ++le;
    if (d >= 0.0) ++ge;
  }
  out.p_value = std::min(
      1.0, 2.0 * double(std::min(le, ge) + 1) / double(deltas.size() + 1));
  out.tier = tier_for_p(out.p_value);
  const Interval ci = percentile_interval(deltas);
  out.ci_low = ci.low;
  out.ci_high = ci.high;
  return out;
}

void check_finite(std::span<const double> v) {
  for (double x : v)
    require(std::isfinite(x), Err::InvalidArgument, "non-finite sample value");
}

BootstrapResult bootstrap_diffs(std::span<const double> diffs, int resamples,
                                std::uint64_t seed, int threads) {
  require(diffs.size() >= 2, Err::TooFewCases,
          "paired bootstrap needs at least 2 cases");
  require(resamples >= 1, Err::InvalidArgument, "resamples must be >= 1");
  check_finite(diffs);
  const std::uint32_t n = std::uint32_t(diffs.size());
  double mean_delta = 0.0;
  for (double d : diffs) mean_delta += d;
  mean_delta /= double(n);

  std::vector<double> deltas(static_cast<std::size_t>(resamples));
  parallel_for(resamples, threads, [&](std::int64_t b) {
    const CounterRng rng(seed, std::uint64_t(b));
    double acc = 0.0;
    for (std::uint32_t j = 0; j < n; ++j) acc += diffs[rng.below(j, n)];
    deltas[std::size_t(b)] = acc / double(n);
  });
  return summarize(mean_delta, std::move(deltas), seed);
}

void check_paired(const PairedSample& s) {
  require(s.case_ids.size() == s.values_a.size() &&
              s.case_ids.size() == s.values_b.size(),
          Err::MisalignedCases, "paired sample fields differ in length");
  require(!s.case_ids.empty(), Err::TooFewCases, "empty paired sample");
}

}  // namespace

BootstrapResult paired_bootstrap(const PairedSample& sample, int resamples,
                                 std::uint64_t seed, int threads) {
  check_paired(sample);
  std::vector<double> diffs(sample.values_a.size());
  for (std::size_t i = 0; i < diffs.size(); ++i)
    diffs[i] = sample.values_b[i] - sample.values_a[i];
  return bootstrap_diffs(diffs, resamples, seed, threads);
}

BootstrapResult ood_delta(const PairedSample& sample, int direction,
                          int resamples, std::uint64_t seed, int threads) {
  require(direction == 1 || direction == -1, Err::InvalidArgument,
          "direction must be +1 or -1");
  check_paired(sample);
  std::vector<double> diffs(sample.values_a.size());
  for (std::size_t i = 0; i < diffs.size(); ++i)
    diffs[i] =
        (sample.values_b[i] - sample.values_a[i]) * double(direction);
  return bootstrap_diffs(diffs, resamples, seed, threads);
}

BootstrapResult bootstrap_aurc(std::span<const CaseScore> scores_a,
                               std::span<const CaseScore> scores_b,
                               int resamples, std::uint64_t seed,
                               int threads) {
  require(scores_a.size() == scores_b.size(), Err::MisalignedCases,
          "score lists differ in length");
  require(scores_a.size() >= 2, Err::TooFewCases,
          "AURC bootstrap needs at least 2 cases");
  require(resamples >= 1, Err::InvalidArgument, "resamples must be >= 1");
  for (std::size_t i = 0; i < scores_a.size(); ++i)
    require(scores_a[i].case_id == scores_b[i].case_id, Err::MisalignedCases,
            "case ids are not aligned: " + scores_a[i].case_id);

  const std::uint32_t n = std::uint32_t(scores_a.size());
  const double mean_delta = aurc(scores_b) - aurc(scores_a);

  std::vector<double> deltas(static_cast<std::size_t>(resamples));
  parallel_for(resamples, threads, [&](std::int64_t b) {
    const CounterRng rng(seed, std::uint64_t(b));
    std::vector<CaseScore> sample_a(n), sample_b(n);
    for (std::uint32_t j = 0; j < n; ++j) {
      const std::uint32_t idx = rng.below(j, n);
      sample_a[j] = scores_a[idx];
      sample_b[j] = scores_b[idx];
    }
    deltas[std::size_t(b)] = aurc(sample_b) - aurc(sample_a);
  });
  return summarize(mean_delta, std::move(deltas), seed);
}

MethodSummary bootstrap_mean(std::span<const double> values, int resamples,
                             std::uint64_t seed, int threads) {
  require(!values.empty(), Err::TooFewCases, "empty sample");
  require(resamples >= 1, Err::InvalidArgument, "resamples must be >= 1");
  check_finite(values);
  const std::uint32_t n = std::uint32_t(values.size());
  MethodSummary out;
  for (double v : values) out.mean += v;
  out.mean /= double(n);

  std::vector<double> means(static_cast<std::size_t>(resamples));
  parallel_for(resamples, threads, [&](std::int64_t b) {
    const CounterRng rng(seed, std::uint64_t(b));
    double acc = 0.0;
    for (std::uint32_t j = 0; j < n; ++j) acc += values[rng.below(j, n)];
    means[std::size_t(b)] = acc / double(n);
  });
  const Interval ci = percentile_interval(means);
  out.ci_low = ci.low;
  out.ci_high = ci.high;
  return out;
}

MethodSummary bootstrap_aurc_summary(std::span<const CaseScore> scores,
                                     int resamples, std::uint64_t seed,
                                     int threads) {
  require(!scores.empty(), Err::TooFewCases, "empty score list");
  require(resamples >= 1, Err::InvalidArgument, "resamples must be >= 1");
  const std::uint32_t n = std::uint32_t(scores.size());
  MethodSummary out;
  out.mean = aurc(scores);

  std::vector<double> values(static_cast<std::size_t>(resamples));
  parallel_for(resamples, threads, [&](std::int64_t b) {
    const CounterRng rng(seed, std::uint64_t(b));
    std::vector<CaseScore> sample(n);
    for (std::uint32_t j = 0; j < n; ++j) sample[j] = scores[rng.below(j, n)];
    values[std::size_t(b)] = aurc(sample);
  });
  const Interval ci = percentile_interval(values);
  out.ci_low = ci.low;
  out.ci_high = ci.high;
  return out;
}

}  // namespace uqseg
