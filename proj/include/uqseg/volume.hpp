#pragma once
// Dense voxel containers. Payloads are flat Eigen arrays over row-major
// (Z,Y,X) voxel order. Probability maps keep the class axis leading: each
// class plane is one contiguous column of a column-major (voxels x classes)
// array, which serializes directly as a (C,Z,Y,X) row-major block.
// All containers are immutable after construction and safe to share across
// threads.

#include <Eigen/Core>

#include <cstdint>
#include <utility>

#include "uqseg/errors.hpp"

namespace uqseg {

using Index = Eigen::Index;

template <typename Scalar>
using VoxelArray = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

using MaskArray = Eigen::Array<bool, Eigen::Dynamic, 1>;

// voxels x classes, column-major so each class plane is contiguous
using ChannelArray = Eigen::Array<float, Eigen::Dynamic, Eigen::Dynamic>;

struct GridShape {
  Index nz = 0, ny = 0, nx = 0;

  Index voxels() const { return nz * ny * nx; }
  Index linear(Index z, Index y, Index x) const {
    return (z * ny + y) * nx + x;
  }
  Index min_dim() const { return nz < ny ? (nz < nx ? nz : nx) : (ny < nx ? ny : nx); }
  bool operator==(const GridShape&) const = default;
};

struct Spacing {
  double z = 1.0, y = 1.0, x = 1.0;
  bool operator==(const Spacing&) const = default;
};

inline void check_grid(const GridShape& s) {
  require(s.nz >= 1 && s.ny >= 1 && s.nx >= 1, Err::ShapeViolation,
          "grid dimensions must all be >= 1");
}

inline void check_spacing(const Spacing& s) {
  require(s.z > 0.0 && s.y > 0.0 && s.x > 0.0, Err::ShapeViolation,
          "voxel spacing must be positive");
}

template <typename Scalar>
class Volume {
 public:
  Volume(GridShape shape, VoxelArray<Scalar> values, Spacing spacing = {})
      : shape_(shape), spacing_(spacing), values_(std::move(values)) {
    check_grid(shape_);
    check_spacing(spacing_);
    require(values_.size() == shape_.voxels(), Err::ShapeViolation,
            "payload length does not equal Z*Y*X");
  }

  static Volume constant(GridShape shape, Scalar v, Spacing spacing = {}) {
    check_grid(shape);
    return Volume(shape, VoxelArray<Scalar>::Constant(shape.voxels(), v),
                  spacing);
  }

  const GridShape& shape() const { return shape_; }
  const Spacing& spacing() const { return spacing_; }
  const VoxelArray<Scalar>& values() const { return values_; }
  Scalar operator()(Index z, Index y, Index x) const {
    return values_[shape_.linear(z, y, x)];
  }

 private:
  GridShape shape_;
  Spacing spacing_;
  VoxelArray<Scalar> values_;
};

using ScalarMap = Volume<double>;

class LabelMap {
 public:
  LabelMap(GridShape shape, int classes, VoxelArray<std::uint8_t> values,
           Spacing spacing = {})
      : vol_(shape, std::move(values), spacing), classes_(classes) {
    require(classes_ >= 2, Err::ShapeViolation,
            "label map needs at least 2 classes");
    require(classes_ <= 256, Err::ShapeViolation,
            "label map limited to 256 classes (u8 payload)");
    require(int(vol_.values().maxCoeff()) < classes_, Err::LabelOutOfRange,
            "voxel label >= number of classes");
  }

  const GridShape& shape() const { return vol_.shape(); }
  const Spacing& spacing() const { return vol_.spacing(); }
  const VoxelArray<std::uint8_t>& values() const { return vol_.values(); }
  int classes() const { return classes_; }
  std::uint8_t operator()(Index z, Index y, Index x) const {
    return vol_(z, y, x);
  }

 private:
  Volume<std::uint8_t> vol_;
  int classes_;
};

class ProbMap {
 public:
  ProbMap(GridShape shape, int classes, ChannelArray channels,
          Spacing spacing = {})
      : shape_(shape),
        spacing_(spacing),
        classes_(classes),
        channels_(std::move(channels)) {
    check_grid(shape_);
    check_spacing(spacing_);
    require(classes_ >= 2, Err::ShapeViolation,
            "probability map needs at least 2 classes");
    require(channels_.rows() == shape_.voxels() &&
                channels_.cols() == classes_,
            Err::ShapeViolation,
            "channel payload does not match (C,Z,Y,X)");
  }

  const GridShape& shape() const { return shape_; }
  const Spacing& spacing() const { return spacing_; }
  int classes() const { return classes_; }
  const ChannelArray& channels() const { return channels_; }

 private:
  GridShape shape_;
  Spacing spacing_;
  int classes_;
  ChannelArray channels_;
};

// Stored softmax maps are f32; sums drift by rounding, hence the tolerance.
inline constexpr double kProbSumTol = 1e-4;

inline const ProbMap& validate_prob_map(const ProbMap& p) {
  const ChannelArray& ch = p.channels();
  require((ch >= 0.0f).all() && (ch <= 1.0f).all(), Err::RangeViolation,
          "probability value outside [0,1]");
  const Eigen::ArrayXd sums = ch.cast<double>().rowwise().sum();
  require(((sums - 1.0).abs() <= kProbSumTol).all(), Err::SumViolation,
          "per-voxel class probabilities do not sum to 1 within tolerance");
  return p;
}

inline ProbMap one_hot(const LabelMap& y, int classes) {
  require(classes >= 2, Err::ShapeViolation, "one_hot needs classes >= 2");
  require(int(y.values().maxCoeff()) < classes, Err::LabelOutOfRange,
          "label value >= requested class count");
  ChannelArray ch = ChannelArray::Zero(y.shape().voxels(), classes);
  const auto& v = y.values();
  for (Index i = 0; i < v.size(); ++i) ch(i, v[i]) = 1.0f;
  return ProbMap(y.shape(), classes, std::move(ch), y.spacing());
}

}  // namespace uqseg
