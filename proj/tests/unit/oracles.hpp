#pragma once
// Brute-force reference implementations used only by the tests. These stay
// deliberately naive (explicit voxel loops, explicit pair enumeration,
// separate sort/percentile code) and independent of the library's
// implementation paths.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "uqseg/rng.hpp"
#include "uqseg/volume.hpp"

namespace oracle {

using uqseg::GridShape;
using uqseg::Index;

struct Case {
  GridShape grid;
  int classes = 2;
  // members[m][c][v]: probabilities; raters[n][v], consensus[v]: labels
  std::vector<std::vector<std::vector<double>>> members;
  std::vector<std::vector<int>> raters;
  std::vector<int> consensus;
};

inline double dsc_labels(const std::vector<int>& a, const std::vector<int>& b,
                         int classes) {
  double total = 0.0;
  for (int c = 1; c < classes; ++c) {
    long na = 0, nb = 0, ni = 0;
    for (std::size_t v = 0; v < a.size(); ++v) {
      if (a[v] == c) ++na;
      if (b[v] == c) ++nb;
      if (a[v] == c && b[v] == c) ++ni;
    }
    total += (na + nb == 0) ? 1.0 : 2.0 * double(ni) / double(na + nb);
  }
  return total / double(classes - 1);
}

inline double iou_distance(const std::vector<int>& a,
                           const std::vector<int>& b, int classes,
                           bool use_dice) {
  double total = 0.0;
  for (int c = 1; c < classes; ++c) {
    long na = 0, nb = 0, ni = 0;
    for (std::size_t v = 0; v < a.size(); ++v) {
      if (a[v] == c) ++na;
      if (b[v] == c) ++nb;
      if (a[v] == c && b[v] == c) ++ni;
    }
    double overlap;
    if (na + nb == 0)
      overlap = 1.0;
    else if (use_dice)
      overlap = 2.0 * double(ni) / double(na + nb);
    else
      overlap = double(ni) / double(na + nb - ni);
    total += overlap;
  }
  return 1.0 - total / double(classes - 1);
}

inline std::vector<int> argmax_labels(
    const std::vector<std::vector<double>>& prob) {
  std::vector<int> out(prob[0].size(), 0);
  for (std::size_t v = 0; v < out.size(); ++v) {
    int best = 0;
    for (std::size_t c = 1; c < prob.size(); ++c)
      if (prob[c][v] > prob[best][v]) best = int(c);
    out[v] = best;
  }
  return out;
}

// mean probability at one (class, voxel); the pipeline stores averaged maps
// as f32, so the oracle applies the same quantization
inline double mean_prob(const Case& cs, int c, std::size_t v) {
  double p = 0.0;
  for (const auto& m : cs.members) p += m[std::size_t(c)][v];
  return double(float(p / double(cs.members.size())));
}

inline std::vector<double> mean_prob_confidence(const Case& cs) {
  const std::size_t voxels = cs.members[0][0].size();
  std::vector<double> conf(voxels, 0.0);
  for (std::size_t v = 0; v < voxels; ++v) {
    double best = -1.0;
    for (int c = 0; c < cs.classes; ++c) best = std::max(best, mean_prob(cs, c, v));
    conf[v] = best;
  }
  return conf;
}

inline std::vector<int> mean_prob_prediction(const Case& cs) {
  const std::size_t voxels = cs.members[0][0].size();
  std::vector<int> pred(voxels, 0);
  for (std::size_t v = 0; v < voxels; ++v) {
    int best = 0;
    double best_p = -1.0;
    for (int c = 0; c < cs.classes; ++c) {
      const double p = mean_prob(cs, c, v);
      if (p > best_p) {
        best_p = p;
        best = c;
      }
    }
    pred[v] = best;
  }
  return pred;
}

// bin index: largest i with i/n <= v, capped at n-1
inline int bin_of(double v, int n_bins) {
  int idx = 0;
  for (int i = n_bins - 1; i >= 1; --i) {
    if (v >= double(i) / double(n_bins)) {
      idx = i;
      break;
    }
  }
  return idx;
}

inline double ace(const std::vector<double>& conf,
                  const std::vector<int>& pred,
                  const std::vector<std::vector<int>>& raters, int n_bins,
                  const std::vector<bool>* mask = nullptr) {
  std::vector<long> count(std::size_t(n_bins), 0);
  std::vector<double> conf_sum(std::size_t(n_bins), 0.0);
  std::vector<double> acc_sum(std::size_t(n_bins), 0.0);
  for (std::size_t v = 0; v < conf.size(); ++v) {
    if (mask != nullptr && !(*mask)[v]) continue;
    const int b = bin_of(conf[v], n_bins);
    count[std::size_t(b)] += 1;
    conf_sum[std::size_t(b)] += conf[v];
    double agree = 0.0;
    for (const auto& r : raters)
      if (r[v] == pred[v]) agree += 1.0;
    acc_sum[std::size_t(b)] += agree / double(raters.size());
  }
  double total = 0.0;
  int non_empty = 0;
  for (int b = 0; b < n_bins; ++b) {
    if (count[std::size_t(b)] == 0) continue;
    total += std::abs(acc_sum[std::size_t(b)] / double(count[std::size_t(b)]) -
                      conf_sum[std::size_t(b)] / double(count[std::size_t(b)]));
    ++non_empty;
  }
  return total / double(non_empty);
}

// band membership by scanning the full Chebyshev window for boundary voxels
inline std::vector<bool> band(const std::vector<int>& consensus,
                              const GridShape& g, int radius) {
  auto at = [&](Index z, Index y, Index x) {
    return consensus[std::size_t(g.linear(z, y, x))];
  };
  std::vector<bool> is_boundary(consensus.size(), false);
  for (Index z = 0; z < g.nz; ++z)
    for (Index y = 0; y < g.ny; ++y)
      for (Index x = 0; x < g.nx; ++x) {
        bool b = false;
        for (Index dz = -1; dz <= 1; ++dz)
          for (Index dy = -1; dy <= 1; ++dy)
            for (Index dx = -1; dx <= 1; ++dx) {
              const Index zz = z + dz, yy = y + dy, xx = x + dx;
              if (zz < 0 || zz >= g.nz || yy < 0 || yy >= g.ny || xx < 0 ||
                  xx >= g.nx)
                continue;
              if (at(zz, yy, xx) != at(z, y, x)) b = true;
            }
        is_boundary[std::size_t(g.linear(z, y, x))] = b;
      }
  std::vector<bool> in_band(consensus.size(), false);
  for (Index z = 0; z < g.nz; ++z)
    for (Index y = 0; y < g.ny; ++y)
      for (Index x = 0; x < g.nx; ++x) {
        bool near = false;
        for (Index dz = -radius; dz <= radius && !near; ++dz)
          for (Index dy = -radius; dy <= radius && !near; ++dy)
            for (Index dx = -radius; dx <= radius && !near; ++dx) {
              const Index zz = z + dz, yy = y + dy, xx = x + dx;
              if (zz < 0 || zz >= g.nz || yy < 0 || yy >= g.ny || xx < 0 ||
                  xx >= g.nx)
                continue;
              if (is_boundary[std::size_t(g.linear(zz, yy, xx))]) near = true;
            }
        in_band[std::size_t(g.linear(z, y, x))] = near;
      }
  return in_band;
}

inline double ba_ece(const std::vector<double>& conf,
                     const std::vector<int>& pred,
                     const std::vector<std::vector<int>>& raters,
                     const std::vector<int>& consensus, const GridShape& g,
                     int radius, int n_bins) {
  const std::vector<bool> in_band = band(consensus, g, radius);
  std::vector<long> count(std::size_t(n_bins), 0);
  std::vector<double> conf_sum(std::size_t(n_bins), 0.0);
  std::vector<double> acc_sum(std::size_t(n_bins), 0.0);
  long total_count = 0;
  for (std::size_t v = 0; v < conf.size(); ++v) {
    if (!in_band[v]) continue;
    ++total_count;
    const int b = bin_of(conf[v], n_bins);
    count[std::size_t(b)] += 1;
    conf_sum[std::size_t(b)] += conf[v];
    double agree = 0.0;
    for (const auto& r : raters)
      if (r[v] == pred[v]) agree += 1.0;
    acc_sum[std::size_t(b)] += agree / double(raters.size());
  }
  double total = 0.0;
  for (int b = 0; b < n_bins; ++b) {
    if (count[std::size_t(b)] == 0) continue;
    total += double(count[std::size_t(b)]) / double(total_count) *
             std::abs(acc_sum[std::size_t(b)] / double(count[std::size_t(b)]) -
                      conf_sum[std::size_t(b)] / double(count[std::size_t(b)]));
  }
  return total;
}

inline double ncc(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = double(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t v = 0; v < a.size(); ++v) {
    ma += a[v];
    mb += b[v];
  }
  ma /= n;
  mb /= n;
  double cov = 0.0, va = 0.0, vb = 0.0;
  for (std::size_t v = 0; v < a.size(); ++v) {
    cov += (a[v] - ma) * (b[v] - mb);
    va += (a[v] - ma) * (a[v] - ma);
    vb += (b[v] - mb) * (b[v] - mb);
  }
  if (va <= 0.0 || vb <= 0.0) return 0.0;
  return cov / n / (std::sqrt(va / n) * std::sqrt(vb / n));
}

inline std::vector<double> entropy(const Case& cs) {
  const std::size_t voxels = cs.members[0][0].size();
  std::vector<double> h(voxels, 0.0);
  for (std::size_t v = 0; v < voxels; ++v) {
    double total = 0.0;
    for (int c = 0; c < cs.classes; ++c) {
      const double p = mean_prob(cs, c, v);
      if (p > 0.0) total -= p * std::log(p);
    }
    h[v] = total / std::log(double(cs.classes));
  }
  return h;
}

inline std::vector<double> rater_variance(
    const std::vector<std::vector<int>>& raters, int classes) {
  std::vector<double> out(raters[0].size(), 0.0);
  for (std::size_t v = 0; v < out.size(); ++v) {
    double sum = 0.0;
    for (int c = 0; c < classes; ++c) {
      long n = 0;
      for (const auto& r : raters)
        if (r[v] == c) ++n;
      const double f = double(n) / double(raters.size());
      sum += f * (1.0 - f);
    }
    out[v] = sum;
  }
  return out;
}

inline double ged(const std::vector<std::vector<int>>& members,
                  const std::vector<std::vector<int>>& raters, int classes,
                  bool use_dice = false) {
  double cross = 0.0;
  for (const auto& m : members)
    for (const auto& r : raters)
      cross += iou_distance(m, r, classes, use_dice);
  cross /= double(members.size() * raters.size());
  double wm = 0.0;
  for (const auto& a : members)
    for (const auto& b : members) wm += iou_distance(a, b, classes, use_dice);
  wm /= double(members.size() * members.size());
  double wn = 0.0;
  for (const auto& a : raters)
    for (const auto& b : raters) wn += iou_distance(a, b, classes, use_dice);
  wn /= double(raters.size() * raters.size());
  return std::sqrt(std::max(0.0, 2.0 * cross - wm - wn));
}

inline double pairwise_u(const std::vector<std::vector<int>>& hard,
                         int classes) {
  double total = 0.0;
  int pairs = 0;
  for (std::size_t i = 0; i < hard.size(); ++i)
    for (std::size_t j = i + 1; j < hard.size(); ++j) {
      total += 1.0 - dsc_labels(hard[i], hard[j], classes);
      ++pairs;
    }
  return total / double(pairs);
}

struct ScoredCase {
  std::string id;
  double u = 0.0;
  double r = 0.0;
};

inline double aurc(std::vector<ScoredCase> scores) {
  std::sort(scores.begin(), scores.end(),
            [](const ScoredCase& a, const ScoredCase& b) {
              if (a.u != b.u) return a.u < b.u;
              return a.id < b.id;
            });
  double prefix = 0.0, total = 0.0;
  for (std::size_t k = 0; k < scores.size(); ++k) {
    prefix += scores[k].r;
    total += prefix / double(k + 1);
  }
  return total / double(scores.size());
}

// documented interval rule: 2.5 percentile by linear interpolation, 97.5
// percentile as its mirror on the reversed order statistics
inline std::pair<double, double> interval95(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  const double pos = 0.025 * double(n - 1);
  const std::size_t lo = std::size_t(pos);
  const double frac = pos - double(lo);
  const std::size_t next = lo + 1 < n ? lo + 1 : n - 1;
  const std::size_t hi = n - 1 - lo;
  const std::size_t hi_next = hi > 0 ? hi - 1 : 0;
  const double low = values[lo] + (values[next] - values[lo]) * frac;
  const double high = values[hi] + (values[hi_next] - values[hi]) * frac;
  return {low, high};
}

struct BootstrapOracle {
  double mean = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  double p = 1.0;
};

// independent resampler sharing only the documented RNG contract
inline BootstrapOracle paired_bootstrap(const std::vector<double>& a,
                                        const std::vector<double>& b, int B,
                                        std::uint64_t seed) {
  const std::uint32_t n = std::uint32_t(a.size());
  BootstrapOracle out;
  for (std::size_t i = 0; i < a.size(); ++i) out.mean += b[i] - a[i];
  out.mean /= double(n);
  std::vector<double> deltas;
  long le = 0, ge = 0;
  for (int bb = 0; bb < B; ++bb) {
    const uqseg::CounterRng rng(seed, std::uint64_t(bb));
    double acc = 0.0;
    for (std::uint32_t j = 0; j < n; ++j) {
      const std::uint32_t idx = rng.below(j, n);
      acc += b[idx] - a[idx];
    }
    const double d = acc / double(n);
    deltas.push_back(d);
    if (d <= 0.0) ++le;
    if (d >= 0.0) ++ge;
  }
  out.p = std::min(1.0, 2.0 * double(std::min(le, ge) + 1) / double(B + 1));
  const auto [lo, hi] = interval95(deltas);
  out.lo = lo;
  out.hi = hi;
  return out;
}

inline BootstrapOracle aurc_bootstrap(const std::vector<ScoredCase>& a,
                                      const std::vector<ScoredCase>& b, int B,
                                      std::uint64_t seed) {
  const std::uint32_t n = std::uint32_t(a.size());
  BootstrapOracle out;
  out.mean = aurc(b) - aurc(a);
  std::vector<double> deltas;
  long le = 0, ge = 0;
  for (int bb = 0; bb < B; ++bb) {
    const uqseg::CounterRng rng(seed, std::uint64_t(bb));
    std::vector<ScoredCase> sa, sb;
    for (std::uint32_t j = 0; j < n; ++j) {
      const std::uint32_t idx = rng.below(j, n);
      sa.push_back(a[idx]);
      sb.push_back(b[idx]);
    }
    const double d = aurc(sb) - aurc(sa);
    deltas.push_back(d);
    if (d <= 0.0) ++le;
    if (d >= 0.0) ++ge;
  }
  out.p = std::min(1.0, 2.0 * double(std::min(le, ge) + 1) / double(B + 1));
  const auto [lo, hi] = interval95(deltas);
  out.lo = lo;
  out.hi = hi;
  return out;
}

}  // namespace oracle
