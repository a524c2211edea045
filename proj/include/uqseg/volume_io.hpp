#pragma once
// UQV on-disk volume format: a raw little-endian binary payload plus a JSON
// sidecar (<file>.json) describing shape, dtype, byte order and semantics.
//
// Sidecar fields: shape [Z,Y,X], dtype "f32"|"u8", order "C",
// endianness "little", kind "label"|"prob", classes, spacing [z,y,x].
// Label payloads are u8 with Z*Y*X values; prob payloads are f32 with
// classes*Z*Y*X values, class plane first (row-major (C,Z,Y,X)).
// Round-trips are bit-exact.

#include <filesystem>
#include <variant>

#include "uqseg/volume.hpp"

namespace uqseg {

enum class VolumeKind { Label, Prob };

// Container-level view of a stored volume. The container permits classes=1
// prob payloads (plain scalar fields); ProbMap semantics (C >= 2, sums ~ 1)
// are enforced only when converting.
struct RawVolume {
  GridShape shape;
  Spacing spacing;
  VolumeKind kind = VolumeKind::Prob;
  int classes = 1;
  std::variant<VoxelArray<float>, VoxelArray<std::uint8_t>> payload;
};

std::filesystem::path uqv_binary_path(const std::filesystem::path& path);
std::filesystem::path uqv_sidecar_path(const std::filesystem::path& path);

void store_volume(const RawVolume& v, const std::filesystem::path& path);
void store_volume(const LabelMap& v, const std::filesystem::path& path);
void store_volume(const ProbMap& v, const std::filesystem::path& path);

RawVolume load_volume(const std::filesystem::path& path);
LabelMap load_label_map(const std::filesystem::path& path);
ProbMap load_prob_map(const std::filesystem::path& path);

}  // namespace uqseg
