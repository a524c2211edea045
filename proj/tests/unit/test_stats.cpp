#include <doctest.h>

#include <cstring>
#include <random>

#include "oracles.hpp"
#include "uqseg/stats.hpp"

using namespace uqseg;

namespace {

PairedSample make_sample(const std::vector<double>& a,
                         const std::vector<double>& b) {
  PairedSample s;
  for (std::size_t i = 0; i < a.size(); ++i)
    s.case_ids.push_back("c" + std::to_string(i));
  s.values_a = a;
  s.values_b = b;
  return s;
}

bool bitwise_equal(const BootstrapResult& x, const BootstrapResult& y) {
  return std::memcmp(&x.mean_delta, &y.mean_delta, sizeof(double)) == 0 &&
         std::memcmp(&x.ci_low, &y.ci_low, sizeof(double)) == 0 &&
         std::memcmp(&x.ci_high, &y.ci_high, sizeof(double)) == 0 &&
         std::memcmp(&x.p_value, &y.p_value, sizeof(double)) == 0 &&
         x.tier == y.tier;
}

}  // namespace

TEST_CASE("tier thresholds are exact at the boundaries") {
  CHECK(tier_for_p(0.05) == SigTier::ns);
  CHECK(tier_for_p(0.049999) == SigTier::star);
  CHECK(tier_for_p(0.001) == SigTier::star);
  CHECK(tier_for_p(0.0009) == SigTier::dagger);
  CHECK(tier_for_p(1.0) == SigTier::ns);
}

TEST_CASE("paired_bootstrap") {
  SUBCASE("identical samples") {
    const auto s = make_sample({0.1, 0.5, 0.9, 0.3}, {0.1, 0.5, 0.9, 0.3});
    const BootstrapResult r = paired_bootstrap(s, 500, 42);
    CHECK(r.mean_delta == 0.0);
    CHECK(r.ci_low == 0.0);
    CHECK(r.ci_high == 0.0);
    CHECK(r.p_value == 1.0);
    CHECK(r.tier == SigTier::ns);
  }
  SUBCASE("constant shift gives a degenerate CI and dagger tier") {
    // exact per-case difference of 0.07 everywhere
    const std::vector<double> a{0.0, 0.0, 0.0, 0.0, 0.0};
    const std::vector<double> b{0.07, 0.07, 0.07, 0.07, 0.07};
    const BootstrapResult r = paired_bootstrap(make_sample(a, b), 10000, 1);
    CHECK(r.mean_delta == doctest::Approx(0.07));
    CHECK(r.ci_low == r.ci_high);
    CHECK(r.ci_low == doctest::Approx(0.07));
    CHECK(r.tier == SigTier::dagger);
    // a shift on arbitrary values stays degenerate up to rounding
    std::vector<double> base{0.2, 0.4, 0.6, 0.8, 0.5};
    std::vector<double> shifted;
    for (double v : base) shifted.push_back(v + 0.07);
    const BootstrapResult r2 =
        paired_bootstrap(make_sample(base, shifted), 10000, 1);
    CHECK(r2.ci_low == doctest::Approx(r2.ci_high).epsilon(1e-12));
    CHECK(r2.tier == SigTier::dagger);
  }
  SUBCASE("matches the independent oracle resampler") {
    const std::vector<double> a{0.31, 0.72, 0.11, 0.56, 0.44};
    const std::vector<double> b{0.42, 0.69, 0.25, 0.61, 0.40};
    const BootstrapResult r = paired_bootstrap(make_sample(a, b), 2000, 77);
    const oracle::BootstrapOracle o = oracle::paired_bootstrap(a, b, 2000, 77);
    CHECK(r.mean_delta == o.mean);
    CHECK(r.ci_low == o.lo);
    CHECK(r.ci_high == o.hi);
    CHECK(r.p_value == o.p);
  }
  SUBCASE("bit-identical across thread counts") {
    std::mt19937_64 rng(3);
    std::vector<double> a, b;
    for (int i = 0; i < 37; ++i) {
      a.push_back(double(rng() % 1000) / 1000.0);
      b.push_back(double(rng() % 1000) / 1000.0);
    }
    const auto s = make_sample(a, b);
    const BootstrapResult r1 = paired_bootstrap(s, 4000, 9, 1);
    const BootstrapResult r8 = paired_bootstrap(s, 4000, 9, 8);
    CHECK(bitwise_equal(r1, r8));
  }
  SUBCASE("sign anti-symmetry under swapping the configurations") {
    std::mt19937_64 rng(5);
    std::vector<double> a, b;
    for (int i = 0; i < 21; ++i) {
      a.push_back(double(rng() % 1000) / 1000.0);
      b.push_back(double(rng() % 1000) / 1000.0);
    }
    const BootstrapResult fwd = paired_bootstrap(make_sample(a, b), 2000, 11);
    const BootstrapResult rev = paired_bootstrap(make_sample(b, a), 2000, 11);
    CHECK(rev.mean_delta == -fwd.mean_delta);
    CHECK(rev.ci_low == -fwd.ci_high);
    CHECK(rev.ci_high == -fwd.ci_low);
    CHECK(rev.p_value == fwd.p_value);
  }
  SUBCASE("too few cases") {
    CHECK_THROWS_WITH_AS(paired_bootstrap(make_sample({0.5}, {0.6}), 100, 1),
                         doctest::Contains("TooFewCases"), UqError);
  }
}

TEST_CASE("ood_delta") {
  const std::vector<double> a{0.30, 0.50, 0.70, 0.20};
  const std::vector<double> b{0.35, 0.48, 0.77, 0.26};
  const auto s = make_sample(a, b);
  SUBCASE("s=+1 equals paired_bootstrap") {
    CHECK(bitwise_equal(ood_delta(s, +1, 1500, 5), paired_bootstrap(s, 1500, 5)));
  }
  SUBCASE("s=-1 negates and mirrors") {
    const BootstrapResult plus = ood_delta(s, +1, 1500, 5);
    const BootstrapResult minus = ood_delta(s, -1, 1500, 5);
    CHECK(minus.mean_delta == -plus.mean_delta);
    CHECK(minus.ci_low == -plus.ci_high);
    CHECK(minus.ci_high == -plus.ci_low);
    CHECK(minus.p_value == plus.p_value);
  }
  SUBCASE("lower-is-better metric improved by 0.02 gives +0.02") {
    std::vector<double> worse{0.30, 0.50, 0.70, 0.20};
    std::vector<double> better;
    for (double v : worse) better.push_back(v - 0.02);
    const BootstrapResult r =
        ood_delta(make_sample(worse, better), -1, 1000, 3);
    CHECK(r.mean_delta == doctest::Approx(0.02));
    CHECK(r.ci_low == doctest::Approx(0.02));
    CHECK(r.ci_high == doctest::Approx(0.02));
  }
  SUBCASE("invalid direction") {
    CHECK_THROWS_WITH_AS(ood_delta(s, 0, 100, 1),
                         doctest::Contains("InvalidArgument"), UqError);
  }
}

TEST_CASE("bootstrap_aurc") {
  auto scores = [](std::initializer_list<std::pair<double, double>> ur) {
    std::vector<CaseScore> out;
    int i = 0;
    for (const auto& [u, r] : ur)
      out.push_back({"c" + std::to_string(i++), u, r});
    return out;
  };
  SUBCASE("identical methods give a degenerate zero delta") {
    const auto a = scores({{1, 0.1}, {2, 0.3}, {3, 0.2}, {4, 0.6}});
    const BootstrapResult r = bootstrap_aurc(a, a, 800, 13);
    CHECK(r.mean_delta == 0.0);
    CHECK(r.ci_low == 0.0);
    CHECK(r.ci_high == 0.0);
    CHECK(r.p_value == 1.0);
  }
  SUBCASE("rigid risk shift moves every resample by the shift") {
    const auto a = scores({{1, 0.2}, {2, 0.5}, {3, 0.4}, {4, 0.9}});
    auto b = a;
    for (auto& s : b) s.r -= 0.1;
    const BootstrapResult r = bootstrap_aurc(a, b, 3000, 13);
    CHECK(r.mean_delta == doctest::Approx(-0.1));
    CHECK(r.ci_low == doctest::Approx(-0.1));
    CHECK(r.ci_high == doctest::Approx(-0.1));
    CHECK(r.tier == SigTier::dagger);
  }
  SUBCASE("matches the curve-rebuilding oracle exactly") {
    const auto a = scores({{1.0, 0.15}, {0.4, 0.30}, {2.2, 0.70}, {0.9, 0.05}});
    auto b = a;
    b[0].u = 1.9;
    b[0].r = 0.22;
    b[2].u = 0.3;
    b[2].r = 0.55;
    const BootstrapResult r = bootstrap_aurc(a, b, 3000, 21);
    std::vector<oracle::ScoredCase> oa, ob;
    for (const auto& s : a) oa.push_back({s.case_id, s.u, s.r});
    for (const auto& s : b) ob.push_back({s.case_id, s.u, s.r});
    const oracle::BootstrapOracle o = oracle::aurc_bootstrap(oa, ob, 3000, 21);
    CHECK(r.mean_delta == o.mean);
    CHECK(r.ci_low == o.lo);
    CHECK(r.ci_high == o.hi);
    CHECK(r.p_value == o.p);
  }
  SUBCASE("misaligned case ids") {
    const auto a = scores({{1, 0.1}, {2, 0.3}});
    auto b = a;
    b[1].case_id = "other";
    CHECK_THROWS_WITH_AS(bootstrap_aurc(a, b, 100, 1),
                         doctest::Contains("MisalignedCases"), UqError);
  }
  SUBCASE("bit-identical across thread counts") {
    const auto a = scores({{1, 0.1}, {2, 0.3}, {3, 0.2}, {4, 0.6}, {5, 0.5}});
    auto b = a;
    for (auto& s : b) s.u = 6.0 - s.u;
    CHECK(bitwise_equal(bootstrap_aurc(a, b, 2000, 31, 1),
                        bootstrap_aurc(a, b, 2000, 31, 8)));
  }
}

TEST_CASE("bootstrap_mean summaries") {
  std::vector<double> values{0.2, 0.4, 0.6, 0.8};
  const MethodSummary s = bootstrap_mean(values, 2000, 17);
  CHECK(s.mean == doctest::Approx(0.5));
  CHECK(s.ci_low <= s.mean);
  CHECK(s.mean <= s.ci_high);
  const MethodSummary single = bootstrap_mean(std::vector<double>{0.7}, 100, 1);
  CHECK(single.mean == doctest::Approx(0.7));
  CHECK(single.ci_low == doctest::Approx(0.7));
  CHECK(single.ci_high == doctest::Approx(0.7));
}
