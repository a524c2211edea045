#include "uqseg/volume_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

namespace uqseg {

static_assert(std::endian::native == std::endian::little,
              "UQV I/O assumes a little-endian host");

namespace {

using nlohmann::ordered_json;

const char* kind_name(VolumeKind k) {
  return k == VolumeKind::Label ? "label" : "prob";
}

void write_bytes(const std::filesystem::path& path, const char* data,
                 std::size_t size) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.good(), Err::IoError, "cannot open for writing: " + path.string());
  out.write(data, static_cast<std::streamsize>(size));
  require(out.good(), Err::IoError, "write failed: " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), Err::IoError, "cannot open: " + path.string());
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

}  // namespace

std::filesystem::path uqv_binary_path(const std::filesystem::path& path) {
  if (path.extension() == ".uqv") return path;
  std::filesystem::path p = path;
  p += ".uqv";
  return p;
}

std::filesystem::path uqv_sidecar_path(const std::filesystem::path& path) {
  std::filesystem::path p = uqv_binary_path(path);
  p += ".json";
  return p;
}

void store_volume(const RawVolume& v, const std::filesystem::path& path) {
  check_grid(v.shape);
  check_spacing(v.spacing);
  require(v.classes >= 1, Err::ShapeViolation, "classes must be >= 1");
  const Index expected = v.kind == VolumeKind::Prob
                             ? v.shape.voxels() * v.classes
                             : v.shape.voxels();

  ordered_json side;
  side["shape"] = {v.shape.nz, v.shape.ny, v.shape.nx};
  const char* data = nullptr;
  std::size_t bytes = 0;
  if (std::holds_alternative<VoxelArray<float>>(v.payload)) {
    const auto& arr = std::get<VoxelArray<float>>(v.payload);
    require(arr.size() == expected, Err::HeaderMismatch,
            "payload length does not match shape/classes");
    side["dtype"] = "f32";
    data = reinterpret_cast<const char*>(arr.data());
    bytes = std::size_t(arr.size()) * sizeof(float);
  } else {
    const auto& arr = std::get<VoxelArray<std::uint8_t>>(v.payload);
    require(arr.size() == expected, Err::HeaderMismatch,
            "payload length does not match shape/classes");
    require(v.kind == VolumeKind::Label, Err::UnsupportedDtype,
            "u8 payloads are stored as label volumes");
    side["dtype"] = "u8";
    data = reinterpret_cast<const char*>(arr.data());
    bytes = std::size_t(arr.size());
  }
  require(v.kind != VolumeKind::Label ||
              std::holds_alternative<VoxelArray<std::uint8_t>>(v.payload),
          Err::UnsupportedDtype, "label volumes are stored as u8");
  side["order"] = "C";
  side["endianness"] = "little";
  side["kind"] = kind_name(v.kind);
  side["classes"] = v.classes;
  side["spacing"] = {v.spacing.z, v.spacing.y, v.spacing.x};

  write_bytes(uqv_binary_path(path), data, bytes);
  const std::string text = side.dump(2) + "\n";
  write_bytes(uqv_sidecar_path(path), text.data(), text.size());
}

void store_volume(const LabelMap& v, const std::filesystem::path& path) {
  RawVolume raw{v.shape(), v.spacing(), VolumeKind::Label, v.classes(),
                v.values()};
  store_volume(raw, path);
}

void store_volume(const ProbMap& v, const std::filesystem::path& path) {
  // column-major (voxels x classes) memory is exactly row-major (C,Z,Y,X)
  VoxelArray<float> flat =
      Eigen::Map<const VoxelArray<float>>(v.channels().data(),
                                          v.channels().size());
  RawVolume raw{v.shape(), v.spacing(), VolumeKind::Prob, v.classes(),
                std::move(flat)};
  store_volume(raw, path);
}

RawVolume load_volume(const std::filesystem::path& path) {
  const auto bin_path = uqv_binary_path(path);
  const auto side_path = uqv_sidecar_path(path);

  ordered_json side;
  try {
    side = ordered_json::parse(read_text(side_path));
  } catch (const nlohmann::json::parse_error& e) {
    fail(Err::SchemaError,
         "invalid sidecar JSON " + side_path.string() + ": " + e.what());
  }

  auto need = [&](const char* field) -> const ordered_json& {
    require(side.contains(field), Err::SchemaError,
            std::string("sidecar missing field \"") + field + "\": " +
                side_path.string());
    return side.at(field);
  };

  RawVolume v;
  const auto& shape = need("shape");
  require(shape.is_array() && shape.size() == 3, Err::SchemaError,
          "sidecar \"shape\" must be [Z,Y,X]");
  v.shape = {shape[0].get<Index>(), shape[1].get<Index>(),
             shape[2].get<Index>()};
  check_grid(v.shape);

  const std::string dtype = need("dtype").get<std::string>();
  require(dtype == "f32" || dtype == "u8", Err::UnsupportedDtype,
          "unsupported dtype \"" + dtype + "\"");
  require(need("order").get<std::string>() == "C", Err::UnsupportedDtype,
          "only row-major (\"C\") payloads are supported");
  require(need("endianness").get<std::string>() == "little",
          Err::UnsupportedDtype, "only little-endian payloads are supported");

  const std::string kind = need("kind").get<std::string>();
  require(kind == "label" || kind == "prob", Err::SchemaError,
          "unknown volume kind \"" + kind + "\"");
  v.kind = kind == "label" ? VolumeKind::Label : VolumeKind::Prob;
  require((v.kind == VolumeKind::Label) == (dtype == "u8"),
          Err::UnsupportedDtype,
          "dtype/kind pairing must be label/u8 or prob/f32");

  v.classes = need("classes").get<int>();
  require(v.classes >= 1, Err::SchemaError, "classes must be >= 1");
  if (side.contains("spacing")) {
    const auto& sp = side.at("spacing");
    require(sp.is_array() && sp.size() == 3, Err::SchemaError,
            "sidecar \"spacing\" must be [z,y,x]");
    v.spacing = {sp[0].get<double>(), sp[1].get<double>(), sp[2].get<double>()};
    check_spacing(v.spacing);
  }

  const std::string blob = read_text(bin_path);
  const Index values = v.kind == VolumeKind::Prob
                           ? v.shape.voxels() * v.classes
                           : v.shape.voxels();
  const std::size_t expected_bytes =
      std::size_t(values) * (dtype == "f32" ? sizeof(float) : 1);
  require(blob.size() == expected_bytes, Err::HeaderMismatch,
          "binary payload size does not match sidecar for " +
              bin_path.string());

  if (dtype == "f32") {
    VoxelArray<float> arr(values);
    std::memcpy(arr.data(), blob.data(), expected_bytes);
    v.payload = std::move(arr);
  } else {
    VoxelArray<std::uint8_t> arr(values);
    std::memcpy(arr.data(), blob.data(), expected_bytes);
    v.payload = std::move(arr);
  }
  return v;
}

LabelMap load_label_map(const std::filesystem::path& path) {
  RawVolume v = load_volume(path);
  require(v.kind == VolumeKind::Label, Err::UnsupportedDtype,
          "expected a label volume: " + path.string());
  return LabelMap(v.shape, v.classes,
                  std::get<VoxelArray<std::uint8_t>>(std::move(v.payload)),
                  v.spacing);
}

ProbMap load_prob_map(const std::filesystem::path& path) {
  RawVolume v = load_volume(path);
  require(v.kind == VolumeKind::Prob, Err::UnsupportedDtype,
          "expected a probability volume: " + path.string());
  const auto& flat = std::get<VoxelArray<float>>(v.payload);
  ChannelArray ch(v.shape.voxels(), v.classes);
  std::memcpy(ch.data(), flat.data(), std::size_t(flat.size()) * sizeof(float));
  return ProbMap(v.shape, v.classes, std::move(ch), v.spacing);
}

}  // namespace uqseg
