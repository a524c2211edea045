#pragma once
// Glue between the CLI and the library: phantom-spec JSON parsing, dataset
// materialization (UQV volumes + manifest), items CSV and split-plan JSON.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "uqseg/simkit.hpp"
#include "uqseg/splits.hpp"

namespace uqseg {

struct SimulateSpec {
  std::string name = "phantom";
  PhantomSpec phantom;
  int k = 5;
  int m = 5;
  double sigma_seed = 0.1;
  double sigma_data = 0.5;
  double temperature = 2.0;
};

SimulateSpec parse_simulate_spec(const std::filesystem::path& path);

// Writes per-case cv/de member probability maps, rater labels and the
// consensus as UQV volumes plus a manifest.json consumable by `evaluate`.
// Returns the manifest path.
std::filesystem::path simulate_to_dir(const SimulateSpec& spec,
                                      const std::filesystem::path& out_dir);

// items CSV: header item_id,image_id,rater_id
std::vector<TrainingItem> read_items_csv(const std::filesystem::path& path);

// fold plan serialized as a bare list of {train: [...], val: [...]}
std::string fold_plan_to_json(const FoldPlan& plan);
FoldPlan fold_plan_from_json(const std::filesystem::path& path, int* k = nullptr);

std::string de_plan_to_json(const DEPlan& plan);

// {"metric": +1|-1, ...} overrides for the OOD effect sign
std::map<std::string, int> read_ood_direction_file(
    const std::filesystem::path& path);

}  // namespace uqseg
