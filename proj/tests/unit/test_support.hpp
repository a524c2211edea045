#pragma once
// Shared fixtures: random case generation in both library and oracle form.

#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "uqseg/ensemble.hpp"
#include "uqseg/volume.hpp"

namespace testkit {

using namespace uqseg;

inline LabelMap label_map(const GridShape& g, int classes,
                          const std::vector<int>& values) {
  VoxelArray<std::uint8_t> arr(g.voxels());
  for (Index i = 0; i < g.voxels(); ++i)
    arr[i] = std::uint8_t(values[std::size_t(i)]);
  return LabelMap(g, classes, std::move(arr));
}

inline ProbMap prob_map(const GridShape& g, int classes,
                        const std::vector<std::vector<double>>& channels) {
  ChannelArray ch(g.voxels(), classes);
  for (int c = 0; c < classes; ++c)
    for (Index v = 0; v < g.voxels(); ++v)
      ch(v, c) = float(channels[std::size_t(c)][std::size_t(v)]);
  return ProbMap(g, classes, std::move(ch));
}

inline ScalarMap scalar_map(const GridShape& g,
                            const std::vector<double>& values) {
  Eigen::ArrayXd arr(g.voxels());
  for (Index i = 0; i < g.voxels(); ++i) arr[i] = values[std::size_t(i)];
  return ScalarMap(g, std::move(arr));
}

// Random case with blob-structured consensus (so boundary bands exist),
// rater masks as noisy copies and members biased towards the consensus.
// f32 quantization is applied to the member probabilities so the oracle and
// the library see identical inputs.
inline oracle::Case random_case(std::mt19937_64& rng, GridShape g, int classes,
                                int members, int raters) {
  oracle::Case cs;
  cs.grid = g;
  cs.classes = classes;
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const double cz = g.nz * (0.3 + 0.4 * unit(rng));
  const double cy = g.ny * (0.3 + 0.4 * unit(rng));
  const double cx = g.nx * (0.3 + 0.4 * unit(rng));
  const double radius = 0.25 * g.min_dim() * (0.8 + 0.8 * unit(rng));

  cs.consensus.resize(std::size_t(g.voxels()));
  for (Index z = 0; z < g.nz; ++z)
    for (Index y = 0; y < g.ny; ++y)
      for (Index x = 0; x < g.nx; ++x) {
        const double d = radius - std::sqrt((z - cz) * (z - cz) +
                                            (y - cy) * (y - cy) +
                                            (x - cx) * (x - cx));
        int label = 0;
        for (int c = 1; c < classes; ++c)
          if (d > (c - 1) * 1.2) label = c;
        // sprinkle label noise to exercise the metrics off the happy path
        if (unit(rng) < 0.05)
          label = int(unit(rng) * classes) % classes;
        cs.consensus[std::size_t(g.linear(z, y, x))] = label;
      }

  for (int n = 0; n < raters; ++n) {
    std::vector<int> r = cs.consensus;
    for (auto& v : r)
      if (unit(rng) < 0.12) v = int(unit(rng) * classes) % classes;
    cs.raters.push_back(std::move(r));
  }

  for (int m = 0; m < members; ++m) {
    std::vector<std::vector<double>> prob(
        std::size_t(classes), std::vector<double>(std::size_t(g.voxels())));
    for (Index v = 0; v < g.voxels(); ++v) {
      double total = 0.0;
      std::vector<double> raw(static_cast<std::size_t>(classes));
      for (int c = 0; c < classes; ++c) {
        raw[std::size_t(c)] =
            0.05 + unit(rng) +
            (cs.consensus[std::size_t(v)] == c ? 1.5 * unit(rng) : 0.0);
        total += raw[std::size_t(c)];
      }
      for (int c = 0; c < classes; ++c) {
        // quantize exactly as the library stores them
        prob[std::size_t(c)][std::size_t(v)] =
            double(float(raw[std::size_t(c)] / total));
      }
    }
    cs.members.push_back(std::move(prob));
  }
  return cs;
}

inline EnsembleBundle to_bundle(const oracle::Case& cs) {
  EnsembleBundle b;
  for (const auto& m : cs.members) b.members.push_back(prob_map(cs.grid, cs.classes, m));
  return b;
}

inline std::vector<LabelMap> to_labels(const oracle::Case& cs,
                                       const std::vector<std::vector<int>>& v) {
  std::vector<LabelMap> out;
  for (const auto& r : v) out.push_back(label_map(cs.grid, cs.classes, r));
  return out;
}

}  // namespace testkit
