#pragma once
// Dataset manifest: the JSON index that ties per-case member probability
// maps, rater label maps and the consensus together. Paths are resolved
// relative to the manifest file; volumes are loaded lazily per case.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "uqseg/evaluate.hpp"

namespace uqseg {

inline constexpr const char* kManifestSchema = "uqseg-manifest-v1";

struct ManifestCase {
  std::string id;
  std::string group;
  bool ood = false;
  // ensemble kind ("cv"/"de") -> member probability map paths
  std::map<std::string, std::vector<std::filesystem::path>> members;
  std::vector<std::filesystem::path> raters;
  // empty -> majority vote over the raters
  std::optional<std::filesystem::path> consensus;
};

struct Manifest {
  std::string dataset;
  int classes = 0;
  std::vector<ManifestCase> cases;
  std::filesystem::path root;
  std::vector<std::string> kinds;  // ensemble kinds present, sorted
};

Manifest parse_manifest(const std::filesystem::path& path);

// Loads one case for one ensemble kind; shape/class consistency against the
// manifest is checked here (lazily), not at parse time.
CaseInput load_case(const Manifest& manifest, const ManifestCase& c,
                    const std::string& kind);

}  // namespace uqseg
