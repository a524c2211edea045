#include "uqseg/manifest.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

#include "uqseg/volume_io.hpp"

namespace uqseg {

namespace {

using nlohmann::json;

json parse_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), Err::IoError, "cannot open manifest: " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    fail(Err::SchemaError,
         "invalid JSON in " + path.string() + ": " + e.what());
  }
}

const json& need(const json& obj, const char* field, const std::string& where) {
  require(obj.is_object() && obj.contains(field), Err::SchemaError,
          "missing field \"" + std::string(field) + "\" in " + where);
  return obj.at(field);
}

std::string need_string(const json& obj, const char* field,
                        const std::string& where) {
  const json& v = need(obj, field, where);
  require(v.is_string(), Err::SchemaError,
          "field \"" + std::string(field) + "\" must be a string in " + where);
  return v.get<std::string>();
}

}  // namespace

Manifest parse_manifest(const std::filesystem::path& path) {
  const json doc = parse_json_file(path);
  require(doc.is_object(), Err::SchemaError, "manifest must be a JSON object");
  if (doc.contains("schema")) {
    require(doc.at("schema").get<std::string>() == kManifestSchema,
            Err::SchemaError,
            std::string("unsupported manifest schema, expected ") +
                kManifestSchema);
  }

  Manifest m;
  m.root = path.parent_path();
  m.dataset = need_string(doc, "dataset", "manifest");
  const json& classes = need(doc, "classes", "manifest");
  require(classes.is_number_integer(), Err::SchemaError,
          "field \"classes\" must be an integer");
  m.classes = classes.get<int>();
  require(m.classes >= 2, Err::SchemaError, "\"classes\" must be >= 2");

  const json& cases = need(doc, "cases", "manifest");
  require(cases.is_array() && !cases.empty(), Err::SchemaError,
          "\"cases\" must be a non-empty array");

  std::set<std::string> ids;
  std::map<std::string, std::size_t> member_counts;
  for (const json& jc : cases) {
    ManifestCase c;
    c.id = need_string(jc, "id", "case");
    require(ids.insert(c.id).second, Err::SchemaError,
            "duplicate case id: " + c.id);
    c.group = jc.contains("group") ? jc.at("group").get<std::string>() : c.id;
    c.ood = jc.contains("ood") ? jc.at("ood").get<bool>() : false;

    const json& members = need(jc, "members", "case " + c.id);
    require(members.is_object() && !members.empty(), Err::SchemaError,
            "\"members\" must map ensemble kinds to path arrays in case " +
                c.id);
    for (const auto& [kind, paths] : members.items()) {
      require(paths.is_array() && !paths.empty(), Err::SchemaError,
              "member list for kind \"" + kind + "\" must be non-empty in case " +
                  c.id);
      for (const json& p : paths)
        c.members[kind].push_back(m.root / p.get<std::string>());
    }

    const json& raters = need(jc, "raters", "case " + c.id);
    require(raters.is_array() && !raters.empty(), Err::SchemaError,
            "\"raters\" must be a non-empty array in case " + c.id);
    for (const json& p : raters)
      c.raters.push_back(m.root / p.get<std::string>());

    const std::string consensus =
        need_string(jc, "consensus", "case " + c.id);
    if (consensus != "majority") c.consensus = m.root / consensus;

    m.cases.push_back(std::move(c));
  }

  // uniform member counts per kind, same kinds in every case
  const auto& head = m.cases.front();
  for (const auto& [kind, paths] : head.members)
    member_counts[kind] = paths.size();
  for (const ManifestCase& c : m.cases) {
    require(c.members.size() == member_counts.size(), Err::SchemaError,
            "case " + c.id + " lists a different set of ensemble kinds");
    for (const auto& [kind, paths] : c.members) {
      const auto it = member_counts.find(kind);
      require(it != member_counts.end() && it->second == paths.size(),
              Err::SchemaError,
              "member count for kind \"" + kind +
                  "\" is not uniform (case " + c.id + ")");
    }
  }
  for (const auto& [kind, count] : member_counts) m.kinds.push_back(kind);

  // existence check up front so failures name the offending case
  for (const ManifestCase& c : m.cases) {
    auto check_path = [&](const std::filesystem::path& p) {
      require(std::filesystem::exists(uqv_binary_path(p)) &&
                  std::filesystem::exists(uqv_sidecar_path(p)),
              Err::DanglingPath,
              "case " + c.id + " references missing volume " + p.string());
    };
    for (const auto& [kind, paths] : c.members)
      for (const auto& p : paths) check_path(p);
    for (const auto& p : c.raters) check_path(p);
    if (c.consensus) check_path(*c.consensus);
  }
  return m;
}

CaseInput load_case(const Manifest& manifest, const ManifestCase& c,
                    const std::string& kind) {
  const auto it = c.members.find(kind);
  require(it != c.members.end(), Err::SchemaError,
          "case " + c.id + " has no ensemble kind \"" + kind + "\"");

  CaseInput input{c.id, c.ood, {}, {}, LabelMap({1, 1, 1}, 2,
                                                VoxelArray<std::uint8_t>::Zero(1))};
  std::optional<GridShape> grid;
  auto check_grid_consistency = [&](const GridShape& g,
                                    const std::string& what) {
    if (!grid) {
      grid = g;
    } else {
      require(*grid == g, Err::ShapeInconsistency,
              "case " + c.id + ": " + what + " has a different grid");
    }
  };

  for (const auto& p : it->second) {
    ProbMap pm = load_prob_map(p);
    require(pm.classes() == manifest.classes, Err::ShapeInconsistency,
            "case " + c.id + ": member classes != manifest classes");
    check_grid_consistency(pm.shape(), "member " + p.string());
    input.members.push_back(std::move(pm));
  }
  for (const auto& p : c.raters) {
    LabelMap lm = load_label_map(p);
    require(lm.classes() == manifest.classes, Err::ShapeInconsistency,
            "case " + c.id + ": rater classes != manifest classes");
    check_grid_consistency(lm.shape(), "rater " + p.string());
    input.raters.push_back(std::move(lm));
  }
  if (c.consensus) {
    LabelMap lm = load_label_map(*c.consensus);
    require(lm.classes() == manifest.classes, Err::ShapeInconsistency,
            "case " + c.id + ": consensus classes != manifest classes");
    check_grid_consistency(lm.shape(), "consensus");
    input.consensus = std::move(lm);
  } else {
    input.consensus = majority_consensus(input.raters, manifest.classes);
  }
  return input;
}

}  // namespace uqseg
