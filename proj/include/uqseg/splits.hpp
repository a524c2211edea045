#pragma once
// Grouped K-fold split planning, deep-ensemble training plans and leakage
// auditing for multi-rater datasets where each (image, rater) pair is a
// separate training item.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace uqseg {

struct TrainingItem {
  std::string item_id;
  std::string image_id;  // group key: all raters of an image stay together
  std::string rater_id;
};

struct Fold {
  std::vector<std::string> train;
  std::vector<std::string> val;
};

struct FoldPlan {
  int k = 0;
  std::uint64_t seed = 0;
  std::vector<Fold> folds;
};

struct DEMemberSpec {
  std::uint64_t seed = 0;
  std::vector<std::string> items;  // always the full item set
};

struct DEPlan {
  std::vector<DEMemberSpec> members;
};

// Image ids are sorted, shuffled deterministically by seed and assigned
// round-robin to K folds; all items of an image land in the same val fold.
FoldPlan grouped_kfold(std::span<const TrainingItem> items, int k,
                       std::uint64_t seed);

// M member specs over the identical full item set, seeds base_seed + m.
DEPlan de_plan(std::span<const TrainingItem> items, int m,
               std::uint64_t base_seed);

enum class ViolationKind {
  TrainValOverlap,  // an image id straddles train and val of one fold
  MissingItem,      // an item appears in no val set
  DuplicateItem,    // an item appears in more than one val set
  UnknownItem,      // a plan id that is not in the item table
};

struct LeakageViolation {
  ViolationKind kind;
  int fold = -1;  // -1 when not tied to a single fold
  std::string id;
};

std::vector<LeakageViolation> audit_leakage(
    const FoldPlan& plan, std::span<const TrainingItem> items);

}  // namespace uqseg
