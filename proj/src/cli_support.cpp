#include "uqseg/cli_support.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "uqseg/manifest.hpp"
#include "uqseg/volume_io.hpp"

namespace uqseg {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

json parse_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), Err::IoError, "cannot open: " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    fail(Err::SchemaError,
         "invalid JSON in " + path.string() + ": " + e.what());
  }
}

template <typename T>
T get_or(const json& obj, const char* field, T fallback) {
  if (!obj.contains(field)) return fallback;
  return obj.at(field).get<T>();
}

}  // namespace

SimulateSpec parse_simulate_spec(const std::filesystem::path& path) {
  const json doc = parse_json_file(path);
  require(doc.is_object(), Err::SchemaError,
          "phantom spec must be a JSON object");
  SimulateSpec spec;
  spec.name = get_or<std::string>(doc, "name", "phantom");
  if (doc.contains("grid")) {
    const json& g = doc.at("grid");
    require(g.is_array() && g.size() == 3, Err::SchemaError,
            "\"grid\" must be [Z,Y,X]");
    spec.phantom.grid = {g[0].get<Index>(), g[1].get<Index>(),
                         g[2].get<Index>()};
  }
  spec.phantom.classes = get_or<int>(doc, "classes", spec.phantom.classes);
  spec.phantom.n_cases = get_or<int>(doc, "cases", spec.phantom.n_cases);
  spec.phantom.n_raters = get_or<int>(doc, "raters", spec.phantom.n_raters);
  spec.phantom.sigma_rater =
      get_or<double>(doc, "sigma_rater", spec.phantom.sigma_rater);
  spec.phantom.concept_count =
      get_or<int>(doc, "concept_count", spec.phantom.concept_count);
  spec.phantom.ood_fraction =
      get_or<double>(doc, "ood_fraction", spec.phantom.ood_fraction);
  spec.phantom.seed =
      get_or<std::uint64_t>(doc, "seed", spec.phantom.seed);
  if (doc.contains("ensembles")) {
    const json& e = doc.at("ensembles");
    spec.k = get_or<int>(e, "k", spec.k);
    spec.m = get_or<int>(e, "m", spec.m);
    spec.sigma_seed = get_or<double>(e, "sigma_seed", spec.sigma_seed);
    spec.sigma_data = get_or<double>(e, "sigma_data", spec.sigma_data);
    spec.temperature = get_or<double>(e, "temperature", spec.temperature);
  }
  return spec;
}

std::filesystem::path simulate_to_dir(const SimulateSpec& spec,
                                      const std::filesystem::path& out_dir) {
  const std::vector<PhantomCase> cases = make_phantom_dataset(spec.phantom);
  const SurrogatePlans plans =
      plan_surrogates(cases, spec.k, spec.m, spec.sigma_seed, spec.sigma_data,
                      spec.temperature, spec.phantom.seed);

  std::error_code ec;
  std::filesystem::create_directories(out_dir / "cases", ec);
  require(!ec, Err::IoError, "cannot create " + out_dir.string());

  ordered_json manifest;
  manifest["schema"] = kManifestSchema;
  manifest["dataset"] = spec.name;
  manifest["classes"] = spec.phantom.classes;
  ordered_json jcases = ordered_json::array();

  for (const PhantomCase& c : cases) {
    const std::filesystem::path rel = std::filesystem::path("cases") / c.id;
    std::filesystem::create_directories(out_dir / rel, ec);
    require(!ec, Err::IoError, "cannot create case directory for " + c.id);

    ordered_json jc;
    jc["id"] = c.id;
    jc["group"] = c.group;
    jc["ood"] = c.ood;

    ordered_json members;
    auto emit_members = [&](const char* kind,
                            const std::vector<SurrogateMember>& list) {
      ordered_json paths = ordered_json::array();
      for (std::size_t i = 0; i < list.size(); ++i) {
        const std::filesystem::path file =
            rel / (std::string(kind) + "_" + std::to_string(i) + ".uqv");
        store_volume(surrogate_predict(list[i], c), out_dir / file);
        paths.push_back(file.generic_string());
      }
      members[kind] = std::move(paths);
    };
    emit_members("cv", plans.cv);
    emit_members("de", plans.de);
    jc["members"] = std::move(members);

    ordered_json raters = ordered_json::array();
    for (std::size_t r = 0; r < c.raters.size(); ++r) {
      const std::filesystem::path file =
          rel / ("rater_" + std::to_string(r) + ".uqv");
      store_volume(c.raters[r], out_dir / file);
      raters.push_back(file.generic_string());
    }
    jc["raters"] = std::move(raters);

    const std::filesystem::path consensus_file = rel / "consensus.uqv";
    store_volume(c.consensus, out_dir / consensus_file);
    jc["consensus"] = consensus_file.generic_string();

    jcases.push_back(std::move(jc));
  }
  manifest["cases"] = std::move(jcases);

  const std::filesystem::path manifest_path = out_dir / "manifest.json";
  std::ofstream out(manifest_path, std::ios::binary | std::ios::trunc);
  require(out.good(), Err::IoError, "cannot write " + manifest_path.string());
  out << manifest.dump(2) << "\n";
  require(out.good(), Err::IoError, "write failed: " + manifest_path.string());
  return manifest_path;
}

std::vector<TrainingItem> read_items_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), Err::IoError, "cannot open: " + path.string());
  std::vector<TrainingItem> items;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string item_id, image_id, rater_id;
    std::getline(row, item_id, ',');
    std::getline(row, image_id, ',');
    std::getline(row, rater_id);
    if (header) {
      header = false;
      require(item_id == "item_id" && image_id == "image_id" &&
                  rater_id == "rater_id",
              Err::SchemaError,
              "items CSV must start with header item_id,image_id,rater_id");
      continue;
    }
    require(!item_id.empty() && !image_id.empty(), Err::SchemaError,
            "items CSV row missing item_id or image_id");
    items.push_back({item_id, image_id, rater_id});
  }
  require(!items.empty(), Err::SchemaError, "items CSV has no data rows");
  return items;
}

std::string fold_plan_to_json(const FoldPlan& plan) {
  ordered_json folds = ordered_json::array();
  for (const Fold& f : plan.folds) {
    ordered_json jf;
    jf["train"] = f.train;
    jf["val"] = f.val;
    folds.push_back(std::move(jf));
  }
  return folds.dump(2) + "\n";
}

FoldPlan fold_plan_from_json(const std::filesystem::path& path, int* k) {
  const json doc = parse_json_file(path);
  require(doc.is_array() && !doc.empty(), Err::SchemaError,
          "fold plan must be a non-empty array of {train, val}");
  FoldPlan plan;
  plan.k = int(doc.size());
  for (const json& jf : doc) {
    Fold fold;
    fold.train = jf.at("train").get<std::vector<std::string>>();
    fold.val = jf.at("val").get<std::vector<std::string>>();
    plan.folds.push_back(std::move(fold));
  }
  if (k != nullptr) *k = plan.k;
  return plan;
}

std::string de_plan_to_json(const DEPlan& plan) {
  ordered_json members = ordered_json::array();
  for (const DEMemberSpec& m : plan.members) {
    ordered_json jm;
    jm["seed"] = m.seed;
    jm["train"] = m.items;
    members.push_back(std::move(jm));
  }
  ordered_json doc;
  doc["members"] = std::move(members);
  return doc.dump(2) + "\n";
}

std::map<std::string, int> read_ood_direction_file(
    const std::filesystem::path& path) {
  const json doc = parse_json_file(path);
  require(doc.is_object(), Err::SchemaError,
          "direction file must map metric names to +1/-1");
  std::map<std::string, int> out;
  for (const auto& [metric, value] : doc.items()) {
    require(value.is_number_integer(), Err::SchemaError,
            "direction for \"" + metric + "\" must be +1 or -1");
    const int s = value.get<int>();
    require(s == 1 || s == -1, Err::SchemaError,
            "direction for \"" + metric + "\" must be +1 or -1");
    out[metric] = s;
  }
  return out;
}

}  // namespace uqseg
