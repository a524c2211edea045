#include "uqseg/splits.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "uqseg/errors.hpp"
#include "uqseg/rng.hpp"

namespace uqseg {

namespace {

void check_items(std::span<const TrainingItem> items) {
  require(!items.empty(), Err::EmptyInput, "no training items");
  std::set<std::pair<std::string, std::string>> pairs;
  std::set<std::string> ids;
  for (const TrainingItem& it : items) {
    require(!it.item_id.empty() && !it.image_id.empty(), Err::InvalidArgument,
            "item and image ids must be non-empty");
    require(pairs.emplace(it.image_id, it.rater_id).second,
            Err::InvalidArgument,
            "duplicate (image, rater) pair: " + it.image_id + "/" +
                it.rater_id);
    require(ids.insert(it.item_id).second, Err::InvalidArgument,
            "duplicate item id: " + it.item_id);
  }
}

}  // namespace

FoldPlan grouped_kfold(std::span<const TrainingItem> items, int k,
                       std::uint64_t seed) {
  require(k >= 2, Err::InvalidArgument, "K must be >= 2");
  check_items(items);

  std::set<std::string> image_set;
  for (const TrainingItem& it : items) image_set.insert(it.image_id);
  std::vector<std::string> images(image_set.begin(), image_set.end());
  require(int(images.size()) >= k, Err::TooFewGroups,
          "fewer distinct images than folds");

  // Fisher-Yates over the sorted image list keeps the plan independent of
  // the input item order.
  SeqRng rng(seed, fnv1a64("grouped-kfold"));
  for (std::size_t i = images.size() - 1; i > 0; --i) {
    const std::size_t j = rng.below(std::uint32_t(i + 1));
    std::swap(images[i], images[j]);
  }

  std::map<std::string, int> fold_of_image;
  for (std::size_t i = 0; i < images.size(); ++i)
    fold_of_image[images[i]] = int(i % std::size_t(k));

  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.folds.resize(std::size_t(k));
  for (const TrainingItem& it : items) {
    const int f = fold_of_image.at(it.image_id);
    for (int g = 0; g < k; ++g) {
      auto& fold = plan.folds[std::size_t(g)];
      (g == f ? fold.val : fold.train).push_back(it.item_id);
    }
  }
  for (Fold& fold : plan.folds) {
    std::sort(fold.train.begin(), fold.train.end());
    std::sort(fold.val.begin(), fold.val.end());
  }
  return plan;
}

DEPlan de_plan(std::span<const TrainingItem> items, int m,
               std::uint64_t base_seed) {
  require(m >= 1, Err::InvalidArgument, "M must be >= 1");
  check_items(items);
  std::vector<std::string> ids;
  ids.reserve(items.size());
  for (const TrainingItem& it : items) ids.push_back(it.item_id);
  std::sort(ids.begin(), ids.end());

  DEPlan plan;
  plan.members.resize(std::size_t(m));
  for (int i = 0; i < m; ++i) {
    plan.members[std::size_t(i)].seed = base_seed + std::uint64_t(i);
    plan.members[std::size_t(i)].items = ids;
  }
  return plan;
}

std::vector<LeakageViolation> audit_leakage(
    const FoldPlan& plan, std::span<const TrainingItem> items) {
  std::map<std::string, std::string> image_of;
  for (const TrainingItem& it : items) image_of[it.item_id] = it.image_id;

  std::vector<LeakageViolation> violations;
  std::map<std::string, int> val_appearances;

  for (std::size_t f = 0; f < plan.folds.size(); ++f) {
    const Fold& fold = plan.folds[f];
    std::set<std::string> train_images, val_images, flagged;
    for (const std::string& id : fold.train) {
      const auto it = image_of.find(id);
      if (it == image_of.end()) {
        violations.push_back({ViolationKind::UnknownItem, int(f), id});
        continue;
      }
      train_images.insert(it->second);
    }
    for (const std::string& id : fold.val) {
      ++val_appearances[id];
      const auto it = image_of.find(id);
      if (it == image_of.end()) {
        violations.push_back({ViolationKind::UnknownItem, int(f), id});
        continue;
      }
      val_images.insert(it->second);
    }
    for (const std::string& image : val_images) {
      if (train_images.count(image) && flagged.insert(image).second)
        violations.push_back({ViolationKind::TrainValOverlap, int(f), image});
    }
  }

  for (const TrainingItem& it : items) {
    const auto found = val_appearances.find(it.item_id);
    const int n = found == val_appearances.end() ? 0 : found->second;
    if (n == 0)
      violations.push_back({ViolationKind::MissingItem, -1, it.item_id});
    else if (n > 1)
      violations.push_back({ViolationKind::DuplicateItem, -1, it.item_id});
  }
  return violations;
}

}  // namespace uqseg
