#include "uqseg/simkit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "uqseg/parallel.hpp"
#include "uqseg/rng.hpp"
#include "uqseg/splits.hpp"

namespace uqseg {

namespace {

// Geometry constants (voxel units unless stated otherwise). The blob radius
// and shape-noise amplitude scale with the grid so the same spec works from
// toy 8^3 grids up.
constexpr double kRadiusFraction = 0.30;   // base radius / min grid dim
constexpr double kCenterJitter = 0.16;     // center jitter / grid dim
constexpr double kLobeOffset = 0.95;       // lobe center distance / R
constexpr double kRegionMargin = 4.0;      // concept region halo, voxels
constexpr double kProtoMargin = 0.20;      // logit saturation dist / min dim
constexpr double kRaterOffsetScale = 0.6;  // global threshold offset / sigma_rater
constexpr double kRaterFieldScale = 0.8;   // spatial rater noise / sigma_rater
constexpr double kGainBias = -0.80;        // unexposed members lean diffuse

struct GridCoords {
  Eigen::ArrayXd z, y, x;
};

GridCoords grid_coords(const GridShape& g) {
  GridCoords c;
  c.z.resize(g.voxels());
  c.y.resize(g.voxels());
  c.x.resize(g.voxels());
  Index v = 0;
  for (Index z = 0; z < g.nz; ++z)
    for (Index y = 0; y < g.ny; ++y)
      for (Index x = 0; x < g.nx; ++x, ++v) {
        c.z[v] = double(z);
        c.y[v] = double(y);
        c.x[v] = double(x);
      }
  return c;
}

// Sum of random cosine modes with unit RMS; wavelengths in [wl_lo, wl_hi].
Eigen::ArrayXd smooth_field(const GridCoords& coords, SeqRng& rng, int modes,
                            double wl_lo, double wl_hi) {
  Eigen::ArrayXd field = Eigen::ArrayXd::Zero(coords.z.size());
  for (int j = 0; j < modes; ++j) {
    double dz = rng.normal(), dy = rng.normal(), dx = rng.normal();
    const double norm = std::sqrt(dz * dz + dy * dy + dx * dx) + 1e-12;
    const double wl = wl_lo * std::pow(wl_hi / wl_lo, rng.unit());
    const double k = 2.0 * std::numbers::pi / wl;
    const double phase = 2.0 * std::numbers::pi * rng.unit();
    field += (k / norm * (dz * coords.z + dy * coords.y + dx * coords.x) +
              phase)
                 .cos();
  }
  field *= std::sqrt(2.0 / double(modes));
  return field;
}

std::string case_name(int i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "case_%03d", i);
  return buf;
}

std::uint8_t level_label(double value, const std::vector<double>& levels) {
  int label = 0;
  for (double level : levels)
    if (value > level) ++label;
  return std::uint8_t(label);
}

void check_spec(const PhantomSpec& spec) {
  check_grid(spec.grid);
  require(spec.classes >= 2 && spec.classes <= 8, Err::InvalidArgument,
          "phantom classes must be in [2, 8]");
  require(spec.n_cases >= 1, Err::InvalidArgument, "n_cases must be >= 1");
  require(spec.n_raters >= 1, Err::InvalidArgument, "n_raters must be >= 1");
  require(spec.sigma_rater >= 0.0, Err::InvalidArgument,
          "sigma_rater must be >= 0");
  require(spec.concept_count >= 0, Err::InvalidArgument,
          "concept_count must be >= 0");
  require(spec.ood_fraction >= 0.0 && spec.ood_fraction < 1.0,
          Err::InvalidArgument, "ood_fraction must be in [0, 1)");
  const double min_dim = double(spec.grid.min_dim());
  require(kRadiusFraction * min_dim * 0.75 >= 1.5, Err::DegenerateSpec,
          "object does not fit the grid; need min dimension >= 7");
}

int ood_concept_tag(const PhantomSpec& spec) {
  return spec.concept_count == 0 ? spec.n_cases : spec.concept_count;
}

}  // namespace

std::vector<PhantomCase> make_phantom_dataset(const PhantomSpec& spec) {
  check_spec(spec);
  const GridShape& g = spec.grid;
  const double min_dim = double(g.min_dim());
  const GridCoords coords = grid_coords(g);
  const int n_ood = int(std::llround(spec.ood_fraction * spec.n_cases));
  const int ood_tag = ood_concept_tag(spec);

  std::vector<PhantomCase> cases;
  cases.reserve(std::size_t(spec.n_cases));
  for (int i = 0; i < spec.n_cases; ++i) {
    const bool ood = i >= spec.n_cases - n_ood;
    SeqRng rng(spec.seed, mix_seed(fnv1a64("case"), std::uint64_t(i)));

    const double cz = double(g.nz) * (0.5 + kCenterJitter * (rng.unit() - 0.5));
    const double cy = double(g.ny) * (0.5 + kCenterJitter * (rng.unit() - 0.5));
    const double cx = double(g.nx) * (0.5 + kCenterJitter * (rng.unit() - 0.5));
    const double radius = kRadiusFraction * min_dim * (0.70 + 0.60 * rng.unit());
    const double shape_amp = radius * (0.08 + 0.25 * rng.unit());
    const int tag =
        ood ? ood_tag
            : (spec.concept_count == 0 ? i
                                       : int(rng.below(
                                             std::uint32_t(spec.concept_count))));

    SeqRng shape_rng(spec.seed, mix_seed(fnv1a64("shape-field"), std::uint64_t(i)));
    Eigen::ArrayXd field =
        radius -
        ((coords.z - cz).square() + (coords.y - cy).square() +
         (coords.x - cx).square())
            .sqrt() +
        shape_amp * smooth_field(coords, shape_rng, 6, min_dim / 2.0, min_dim);

    // concept lobe: geometry fixed by the concept tag, scaled by this case
    SeqRng concept_rng(spec.seed,
                       mix_seed(fnv1a64("concept"), std::uint64_t(tag)));
    double dz = concept_rng.normal(), dy = concept_rng.normal(),
           dx = concept_rng.normal();
    const double dn = std::sqrt(dz * dz + dy * dy + dx * dx) + 1e-12;
    const double lobe_radius = radius * (0.40 + 0.25 * concept_rng.unit());
    const double lz = cz + dz / dn * kLobeOffset * radius;
    const double ly = cy + dy / dn * kLobeOffset * radius;
    const double lx = cx + dx / dn * kLobeOffset * radius;
    const Eigen::ArrayXd lobe =
        lobe_radius - ((coords.z - lz).square() + (coords.y - ly).square() +
                       (coords.x - lx).square())
                          .sqrt();
    field = field.max(lobe);

    PhantomCase c{case_name(i),
                  case_name(i),
                  Volume<float>(g, field.cast<float>()),
                  Volume<float>(g, field.cast<float>()),
                  {},
                  {tag},
                  {},
                  {},
                  LabelMap(g, spec.classes,
                           VoxelArray<std::uint8_t>::Zero(g.voxels())),
                  ood};
    c.concept_regions.push_back(lobe > -kRegionMargin);

    c.class_levels.resize(std::size_t(spec.classes) - 1);
    for (int j = 0; j < spec.classes - 1; ++j)
      c.class_levels[std::size_t(j)] = double(j) * 0.35 * radius;

    for (int r = 0; r < spec.n_raters; ++r) {
      SeqRng rater_rng(
          spec.seed,
          mix_seed(fnv1a64("rater"), std::uint64_t(i), std::uint64_t(r)));
      const double offset = kRaterOffsetScale * spec.sigma_rater * rater_rng.normal();
      Eigen::ArrayXd observed = field + offset;
      if (spec.sigma_rater > 0.0) {
        observed += kRaterFieldScale * spec.sigma_rater *
                    smooth_field(coords, rater_rng, 6, min_dim / 2.0, min_dim);
      }
      VoxelArray<std::uint8_t> labels(g.voxels());
      for (Index v = 0; v < g.voxels(); ++v)
        labels[v] = level_label(observed[v], c.class_levels);
      c.raters.emplace_back(g, spec.classes, std::move(labels));
    }
    c.consensus = majority_consensus(c.raters, spec.classes);
    cases.push_back(std::move(c));
  }
  return cases;
}

MaskArray exposure_support(const SurrogateMember& member,
                           const PhantomCase& c) {
  MaskArray support = MaskArray::Constant(c.gt_field.shape().voxels(), false);
  for (std::size_t t = 0; t < c.concepts.size(); ++t) {
    if (std::binary_search(member.exposure.begin(), member.exposure.end(),
                           c.concepts[t]))
      continue;
    support = support || c.concept_regions[t];
  }
  return support;
}

ProbMap surrogate_predict(const SurrogateMember& member,
                          const PhantomCase& c) {
  require(member.temperature > 0.0, Err::InvalidArgument,
          "temperature must be positive");
  require(member.sigma_seed >= 0.0 && member.sigma_data >= 0.0,
          Err::InvalidArgument, "noise scales must be >= 0");
  const GridShape& g = c.gt_field.shape();
  const GridCoords coords = grid_coords(g);
  const double min_dim = double(g.min_dim());
  const int classes = c.consensus.classes();

  Eigen::ArrayXd field = c.gt_field.values().cast<double>();
  if (member.sigma_seed > 0.0) {
    SeqRng rng(member.seed,
               mix_seed(fnv1a64("seed-noise"), fnv1a64(c.id)));
    field += member.sigma_seed *
             smooth_field(coords, rng, 6, min_dim / 2.0, min_dim);
  }

  // prototype distances: class c peaks at the midpoint of its level band,
  // the outer bands saturate kProtoMargin*min_dim past the first/last level
  const double margin = kProtoMargin * min_dim;
  std::vector<double> prototypes(static_cast<std::size_t>(classes));
  prototypes.front() = c.class_levels.front() - margin;
  prototypes.back() = c.class_levels.back() + margin;
  for (int k = 1; k + 1 < classes; ++k)
    prototypes[std::size_t(k)] =
        0.5 * (c.class_levels[std::size_t(k - 1)] +
               c.class_levels[std::size_t(k)]);

  Eigen::ArrayXXd logits(g.voxels(), classes);
  for (int k = 0; k < classes; ++k)
    logits.col(k) = -(field - prototypes[std::size_t(k)]).abs() /
                    member.temperature;

  if (member.sigma_data > 0.0) {
    for (std::size_t t = 0; t < c.concepts.size(); ++t) {
      const int tag = c.concepts[t];
      if (std::binary_search(member.exposure.begin(), member.exposure.end(),
                             tag))
        continue;
      const MaskArray& region = c.concept_regions[t];
      for (int k = 0; k < classes; ++k) {
        SeqRng rng(member.seed,
                   mix_seed(fnv1a64("exposure-gain"), fnv1a64(c.id),
                            std::uint64_t(tag), std::uint64_t(k)));
        Eigen::ArrayXd gain =
            1.0 + member.sigma_data *
                      (smooth_field(coords, rng, 3, min_dim / 2.0,
                                    min_dim)
                           .tanh() +
                       kGainBias);
        gain = gain.max(0.05);
        logits.col(k) = region.select(logits.col(k) * gain, logits.col(k));
      }
    }
  }

  const Eigen::ArrayXd row_max = logits.rowwise().maxCoeff();
  Eigen::ArrayXXd probs = (logits.colwise() - row_max).exp();
  const Eigen::ArrayXd row_sum = probs.rowwise().sum();
  probs.colwise() /= row_sum;
  return ProbMap(g, classes, probs.cast<float>(), c.gt_field.spacing());
}

SurrogatePlans plan_surrogates(std::span<const PhantomCase> cases, int k,
                               int m, double sigma_seed, double sigma_data,
                               double temperature, std::uint64_t seed) {
  require(k >= 2, Err::InvalidArgument, "K must be >= 2");
  require(m >= 1, Err::InvalidArgument, "M must be >= 1");

  std::vector<TrainingItem> items;
  std::map<std::string, std::vector<int>> concepts_of_group;
  std::set<int> all_concepts;
  for (const PhantomCase& c : cases) {
    if (c.ood) continue;  // held-out shifts never enter training
    for (std::size_t r = 0; r < c.raters.size(); ++r)
      items.push_back({c.id + "::r" + std::to_string(r), c.group,
                       "r" + std::to_string(r)});
    auto& tags = concepts_of_group[c.group];
    tags.insert(tags.end(), c.concepts.begin(), c.concepts.end());
    all_concepts.insert(c.concepts.begin(), c.concepts.end());
  }
  require(!items.empty(), Err::EmptyInput, "no in-distribution cases");

  const FoldPlan folds =
      grouped_kfold(items, k, mix_seed(seed, fnv1a64("folds")));
  std::map<std::string, std::string> image_of;
  for (const TrainingItem& it : items) image_of[it.item_id] = it.image_id;

  SurrogatePlans plans;
  for (int f = 0; f < k; ++f) {
    std::set<std::string> val_groups;
    for (const std::string& id : folds.folds[std::size_t(f)].val)
      val_groups.insert(image_of.at(id));
    std::set<int> exposure;
    for (const auto& [group, tags] : concepts_of_group) {
      if (val_groups.count(group)) continue;
      exposure.insert(tags.begin(), tags.end());
    }
    SurrogateMember member;
    member.seed = mix_seed(seed, fnv1a64("cv-member"), std::uint64_t(f));
    member.exposure.assign(exposure.begin(), exposure.end());
    member.sigma_seed = sigma_seed;
    member.sigma_data = sigma_data;
    member.temperature = temperature;
    plans.cv.push_back(std::move(member));
  }

  const DEPlan de = de_plan(items, m, mix_seed(seed, fnv1a64("de-member")));
  for (const DEMemberSpec& spec : de.members) {
    SurrogateMember member;
    member.seed = spec.seed;
    member.exposure.assign(all_concepts.begin(), all_concepts.end());
    member.sigma_seed = sigma_seed;
    member.sigma_data = sigma_data;
    member.temperature = temperature;
    plans.de.push_back(std::move(member));
  }
  return plans;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  require(config.phantom.n_cases >= config.k, Err::TooFewGroups,
          "need at least K cases for the fold plan");
  const std::vector<PhantomCase> cases = make_phantom_dataset(config.phantom);
  const SurrogatePlans plans =
      plan_surrogates(cases, config.k, config.m, config.sigma_seed,
                      config.sigma_data, config.temperature,
                      config.phantom.seed);

  ExperimentResult result;
  result.cv.resize(cases.size());
  result.de.resize(cases.size());
  parallel_for(std::int64_t(cases.size()), config.threads, [&](std::int64_t i) {
    const PhantomCase& c = cases[std::size_t(i)];
    auto score = [&](const std::vector<SurrogateMember>& members) {
      CaseInput input{c.id, c.ood, {}, c.raters, c.consensus};
      input.members.reserve(members.size());
      for (const SurrogateMember& m : members)
        input.members.push_back(surrogate_predict(m, c));
      return evaluate_case(input, config.eval);
    };
    result.cv[std::size_t(i)] = score(plans.cv);
    result.de[std::size_t(i)] = score(plans.de);
  });
  return result;
}

}  // namespace uqseg
