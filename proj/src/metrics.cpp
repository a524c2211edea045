#include "uqseg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace uqseg {

namespace {

void check_same_shape(const GridShape& a, const GridShape& b) {
  require(a == b, Err::ShapeMismatch, "voxel grids differ");
}

void check_labels(const LabelMap& a, const LabelMap& b) {
  check_same_shape(a.shape(), b.shape());
  require(a.classes() == b.classes(), Err::ShapeMismatch,
          "label maps disagree on class count");
}

std::vector<double> make_edges(const Eigen::ArrayXd& conf,
                               const BinningSpec& spec) {
  require(spec.n_bins >= 1, Err::InvalidArgument, "n_bins must be >= 1");
  std::vector<double> edges(std::size_t(spec.n_bins) + 1);
  if (!spec.adaptive) {
    for (int i = 0; i <= spec.n_bins; ++i)
      edges[i] = double(i) / double(spec.n_bins);
  } else {
    // quantile edges (linear interpolation between closest ranks)
    std::vector<double> sorted(conf.data(), conf.data() + conf.size());
    std::sort(sorted.begin(), sorted.end());
    const double last = double(sorted.size() - 1);
    for (int i = 0; i <= spec.n_bins; ++i) {
      const double pos = last * double(i) / double(spec.n_bins);
      const std::size_t lo = std::size_t(std::floor(pos));
      const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
      edges[i] = sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - double(lo));
    }
    edges.front() = 0.0;
    edges.back() = 1.0;
    for (std::size_t i = 1; i < edges.size(); ++i)
      edges[i] = std::max(edges[i], edges[i - 1]);
  }
  edges.front() = 0.0;
  edges.back() = 1.0;
  return edges;
}

int bin_index(const std::vector<double>& edges, double v) {
  const int n = int(edges.size()) - 1;
  const auto it = std::upper_bound(edges.begin() + 1, edges.end() - 1, v);
  const int idx = int(it - (edges.begin() + 1));
  return std::min(idx, n - 1);
}

}  // namespace

Eigen::ArrayXd rater_agreement(const LabelMap& prediction,
                               std::span<const LabelMap> raters) {
  require(!raters.empty(), Err::TooFewRaters, "no rater annotations");
  Eigen::ArrayXd agree = Eigen::ArrayXd::Zero(prediction.shape().voxels());
  for (const LabelMap& r : raters) {
    check_same_shape(prediction.shape(), r.shape());
    agree += (prediction.values() == r.values()).cast<double>();
  }
  agree /= double(raters.size());
  return agree;
}

CalibrationBinning bin_calibration(const Eigen::ArrayXd& conf,
                                   const Eigen::ArrayXd& agreement,
                                   const BinningSpec& spec) {
  require(conf.size() == agreement.size(), Err::ShapeMismatch,
          "confidence/agreement length mismatch");
  require(conf.size() >= 1, Err::NoVoxels, "empty calibration domain");
  CalibrationBinning out;
  out.edges = make_edges(conf, spec);
  out.counts.assign(std::size_t(spec.n_bins), 0);
  out.mean_conf.assign(std::size_t(spec.n_bins), 0.0);
  out.accuracy.assign(std::size_t(spec.n_bins), 0.0);
  out.total = conf.size();
  for (Index v = 0; v < conf.size(); ++v) {
    const int b = bin_index(out.edges, conf[v]);
    out.counts[b] += 1;
    out.mean_conf[b] += conf[v];
    out.accuracy[b] += agreement[v];
  }
  for (int b = 0; b < spec.n_bins; ++b) {
    if (out.counts[b] > 0) {
      out.mean_conf[b] /= double(out.counts[b]);
      out.accuracy[b] /= double(out.counts[b]);
    }
  }
  return out;
}

double dsc(const LabelMap& a, const LabelMap& b) {
  check_labels(a, b);
  const int classes = a.classes();
  std::vector<std::int64_t> count_a(classes, 0), count_b(classes, 0),
      inter(classes, 0);
  const auto& va = a.values();
  const auto& vb = b.values();
  for (Index i = 0; i < va.size(); ++i) {
    ++count_a[va[i]];
    ++count_b[vb[i]];
    if (va[i] == vb[i]) ++inter[va[i]];
  }
  double total = 0.0;
  for (int c = 1; c < classes; ++c) {
    const std::int64_t denom = count_a[c] + count_b[c];
    total += denom == 0 ? 1.0 : 2.0 * double(inter[c]) / double(denom);
  }
  return total / double(classes - 1);
}

namespace {

// flatten confidence/agreement over an optional voxel mask
std::pair<Eigen::ArrayXd, Eigen::ArrayXd> masked_domain(
    const ScalarMap& confidence, const Eigen::ArrayXd& agreement,
    const MaskArray* mask) {
  const Eigen::ArrayXd& conf = confidence.values();
  if (mask == nullptr) return {conf, agreement};
  require(mask->size() == conf.size(), Err::ShapeMismatch,
          "mask length does not match volume");
  const Index n = mask->count();
  Eigen::ArrayXd mc(n), ma(n);
  Index k = 0;
  for (Index v = 0; v < conf.size(); ++v) {
    if ((*mask)[v]) {
      mc[k] = conf[v];
      ma[k] = agreement[v];
      ++k;
    }
  }
  return {std::move(mc), std::move(ma)};
}

}  // namespace

double ace(const ScalarMap& confidence, const LabelMap& prediction,
           std::span<const LabelMap> raters, const BinningSpec& spec,
           const MaskArray* mask) {
  check_same_shape(confidence.shape(), prediction.shape());
  const Eigen::ArrayXd agreement = rater_agreement(prediction, raters);
  auto [conf, agree] = masked_domain(confidence, agreement, mask);
  require(conf.size() >= 1, Err::NoVoxels, "empty calibration domain");
  const CalibrationBinning bins = bin_calibration(conf, agree, spec);
  double total = 0.0;
  int non_empty = 0;
  for (std::size_t b = 0; b < bins.counts.size(); ++b) {
    if (bins.counts[b] == 0) continue;
    total += std::abs(bins.accuracy[b] - bins.mean_conf[b]);
    ++non_empty;
  }
  return total / double(non_empty);
}

MaskArray boundary_band(const LabelMap& consensus, int radius) {
  require(radius >= 1, Err::InvalidArgument, "band radius must be >= 1");
  const GridShape& g = consensus.shape();
  const auto& lab = consensus.values();
  MaskArray current = MaskArray::Constant(g.voxels(), false);
  for (Index z = 0; z < g.nz; ++z) {
    for (Index y = 0; y < g.ny; ++y) {
      for (Index x = 0; x < g.nx; ++x) {
        const Index v = g.linear(z, y, x);
        const std::uint8_t center = lab[v];
        bool boundary = false;
        for (Index dz = -1; dz <= 1 && !boundary; ++dz) {
          const Index zz = z + dz;
          if (zz < 0 || zz >= g.nz) continue;
          for (Index dy = -1; dy <= 1 && !boundary; ++dy) {
            const Index yy = y + dy;
            if (yy < 0 || yy >= g.ny) continue;
            for (Index dx = -1; dx <= 1; ++dx) {
              const Index xx = x + dx;
              if (xx < 0 || xx >= g.nx) continue;
              if (lab[g.linear(zz, yy, xx)] != center) {
                boundary = true;
                break;
              }
            }
          }
        }
        current[v] = boundary;
      }
    }
  }
  // Chebyshev dilation, one ring per step
  for (int step = 0; step < radius; ++step) {
    MaskArray next = current;
    for (Index z = 0; z < g.nz; ++z) {
      for (Index y = 0; y < g.ny; ++y) {
        for (Index x = 0; x < g.nx; ++x) {
          const Index v = g.linear(z, y, x);
          if (current[v]) continue;
          bool near = false;
          for (Index dz = -1; dz <= 1 && !near; ++dz) {
            const Index zz = z + dz;
            if (zz < 0 || zz >= g.nz) continue;
            for (Index dy = -1; dy <= 1 && !near; ++dy) {
              const Index yy = y + dy;
              if (yy < 0 || yy >= g.ny) continue;
              for (Index dx = -1; dx <= 1; ++dx) {
                const Index xx = x + dx;
                if (xx < 0 || xx >= g.nx) continue;
                if (current[g.linear(zz, yy, xx)]) {
                  near = true;
                  break;
                }
              }
            }
          }
          next[v] = near;
        }
      }
    }
    current = std::move(next);
  }
  return current;
}

double ba_ece(const ScalarMap& confidence, const LabelMap& prediction,
              std::span<const LabelMap> raters, const LabelMap& consensus,
              int band_radius, const BinningSpec& spec) {
  check_same_shape(confidence.shape(), prediction.shape());
  check_same_shape(confidence.shape(), consensus.shape());
  const MaskArray band = boundary_band(consensus, band_radius);
  require(band.any(), Err::EmptyBand,
          "consensus map has no label boundary");
  const Eigen::ArrayXd agreement = rater_agreement(prediction, raters);
  auto [conf, agree] = masked_domain(confidence, agreement, &band);
  const CalibrationBinning bins = bin_calibration(conf, agree, spec);
  double total = 0.0;
  for (std::size_t b = 0; b < bins.counts.size(); ++b) {
    if (bins.counts[b] == 0) continue;
    total += double(bins.counts[b]) / double(bins.total) *
             std::abs(bins.accuracy[b] - bins.mean_conf[b]);
  }
  return total;
}

NccResult ncc(const ScalarMap& a, const ScalarMap& b, const MaskArray* mask) {
  check_same_shape(a.shape(), b.shape());
  const auto& va = a.values();
  const auto& vb = b.values();
  if (mask != nullptr)
    require(mask->size() == va.size(), Err::ShapeMismatch,
            "mask length does not match volume");
  const Index n = mask == nullptr ? va.size() : mask->count();
  require(n >= 2, Err::TooFewVoxels, "correlation needs at least 2 voxels");

  double mean_a = 0.0, mean_b = 0.0;
  for (Index v = 0; v < va.size(); ++v) {
    if (mask != nullptr && !(*mask)[v]) continue;
    mean_a += va[v];
    mean_b += vb[v];
  }
  mean_a /= double(n);
  mean_b /= double(n);

  double caa = 0.0, cbb = 0.0, cab = 0.0;
  for (Index v = 0; v < va.size(); ++v) {
    if (mask != nullptr && !(*mask)[v]) continue;
    const double da = va[v] - mean_a;
    const double db = vb[v] - mean_b;
    caa += da * da;
    cbb += db * db;
    cab += da * db;
  }
  if (caa <= 0.0 || cbb <= 0.0) return {0.0, true};
  const double value = cab / std::sqrt(caa * cbb);
  return {std::clamp(value, -1.0, 1.0), false};
}

double seg_distance(const LabelMap& a, const LabelMap& b, GedDistance d) {
  check_labels(a, b);
  const int classes = a.classes();
  std::vector<std::int64_t> count_a(classes, 0), count_b(classes, 0),
      inter(classes, 0);
  const auto& va = a.values();
  const auto& vb = b.values();
  for (Index i = 0; i < va.size(); ++i) {
    ++count_a[va[i]];
    ++count_b[vb[i]];
    if (va[i] == vb[i]) ++inter[va[i]];
  }
  double total = 0.0;
  for (int c = 1; c < classes; ++c) {
    double overlap;
    if (count_a[c] + count_b[c] == 0) {
      overlap = 1.0;
    } else if (d == GedDistance::IoU) {
      const std::int64_t uni = count_a[c] + count_b[c] - inter[c];
      overlap = double(inter[c]) / double(uni);
    } else {
      overlap = 2.0 * double(inter[c]) / double(count_a[c] + count_b[c]);
    }
    total += overlap;
  }
  return 1.0 - total / double(classes - 1);
}

double ged(std::span<const LabelMap> members, std::span<const LabelMap> raters,
           GedDistance d) {
  require(!members.empty() && !raters.empty(), Err::EmptyInput,
          "GED needs at least one member and one rater");
  for (const LabelMap& m : members) check_labels(members.front(), m);
  for (const LabelMap& r : raters) check_labels(members.front(), r);

  const double m = double(members.size());
  const double n = double(raters.size());

  double cross = 0.0;
  for (const LabelMap& a : members)
    for (const LabelMap& b : raters) cross += seg_distance(a, b, d);
  cross /= m * n;

  double within_m = 0.0;
  for (std::size_t i = 0; i < members.size(); ++i)
    for (std::size_t j = i + 1; j < members.size(); ++j)
      within_m += 2.0 * seg_distance(members[i], members[j], d);
  within_m /= m * m;

  double within_n = 0.0;
  for (std::size_t i = 0; i < raters.size(); ++i)
    for (std::size_t j = i + 1; j < raters.size(); ++j)
      within_n += 2.0 * seg_distance(raters[i], raters[j], d);
  within_n /= n * n;

  return std::sqrt(std::max(0.0, 2.0 * cross - within_m - within_n));
}

LabelMap majority_consensus(std::span<const LabelMap> raters, int classes) {
  require(!raters.empty(), Err::EmptyInput, "no rater annotations");
  const LabelMap& head = raters.front();
  for (const LabelMap& r : raters) {
    check_same_shape(head.shape(), r.shape());
    require(int(r.values().maxCoeff()) < classes, Err::LabelOutOfRange,
            "rater label >= class count");
  }
  const Index voxels = head.shape().voxels();
  VoxelArray<std::uint8_t> out(voxels);
  std::vector<int> counts(classes);
  for (Index v = 0; v < voxels; ++v) {
    std::fill(counts.begin(), counts.end(), 0);
    for (const LabelMap& r : raters) ++counts[r.values()[v]];
    int best = 0;
    for (int c = 1; c < classes; ++c)
      if (counts[c] > counts[best]) best = c;
    out[v] = static_cast<std::uint8_t>(best);
  }
  return LabelMap(head.shape(), classes, std::move(out), head.spacing());
}

}  // namespace uqseg
