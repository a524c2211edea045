#pragma once
// Typed errors shared across the toolkit. Every code belongs to one of three
// categories that map onto the CLI exit codes: validation (2), computation (3)
// and I/O (4).

#include <stdexcept>
#include <string>

namespace uqseg {

enum class Err {
  // validation
  ShapeViolation,
  SumViolation,
  RangeViolation,
  LabelOutOfRange,
  HeaderMismatch,
  UnsupportedDtype,
  EmptyEnsemble,
  ShapeMismatch,
  TooFewRaters,
  SingleMember,
  TooFewVoxels,
  EmptyInput,
  TooFewCases,
  MisalignedCases,
  TooFewGroups,
  SchemaError,
  ShapeInconsistency,
  UnknownMetric,
  DegenerateSpec,
  InvalidArgument,
  // computation
  NoVoxels,
  EmptyBand,
  // I/O
  IoError,
  DanglingPath,
};

enum class ErrCategory { Validation, Computation, Io };

constexpr ErrCategory err_category(Err e) {
  switch (e) {
    case Err::NoVoxels:
    case Err::EmptyBand:
      return ErrCategory::Computation;
    case Err::IoError:
    case Err::DanglingPath:
      return ErrCategory::Io;
    default:
      return ErrCategory::Validation;
  }
}

constexpr int exit_code(ErrCategory c) {
  switch (c) {
    case ErrCategory::Validation: return 2;
    case ErrCategory::Computation: return 3;
    case ErrCategory::Io: return 4;
  }
  return 3;
}

constexpr const char* err_name(Err e) {
  switch (e) {
    case Err::ShapeViolation: return "ShapeViolation";
    case Err::SumViolation: return "SumViolation";
    case Err::RangeViolation: return "RangeViolation";
    case Err::LabelOutOfRange: return "LabelOutOfRange";
    case Err::HeaderMismatch: return "HeaderMismatch";
    case Err::UnsupportedDtype: return "UnsupportedDtype";
    case Err::EmptyEnsemble: return "EmptyEnsemble";
    case Err::ShapeMismatch: return "ShapeMismatch";
    case Err::TooFewRaters: return "TooFewRaters";
    case Err::SingleMember: return "SingleMember";
    case Err::TooFewVoxels: return "TooFewVoxels";
    case Err::EmptyInput: return "EmptyInput";
    case Err::TooFewCases: return "TooFewCases";
    case Err::MisalignedCases: return "MisalignedCases";
    case Err::TooFewGroups: return "TooFewGroups";
    case Err::SchemaError: return "SchemaError";
    case Err::ShapeInconsistency: return "ShapeInconsistency";
    case Err::UnknownMetric: return "UnknownMetric";
    case Err::DegenerateSpec: return "DegenerateSpec";
    case Err::InvalidArgument: return "InvalidArgument";
    case Err::NoVoxels: return "NoVoxels";
    case Err::EmptyBand: return "EmptyBand";
    case Err::IoError: return "IoError";
    case Err::DanglingPath: return "DanglingPath";
  }
  return "UnknownError";
}

class UqError : public std::runtime_error {
 public:
  UqError(Err code, const std::string& what)
      : std::runtime_error(std::string(err_name(code)) + ": " + what),
        code_(code) {}

  Err code() const { return code_; }
  ErrCategory category() const { return err_category(code_); }

 private:
  Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& what) {
  throw UqError(code, what);
}

inline void require(bool ok, Err code, const std::string& what) {
  if (!ok) fail(code, what);
}

}  // namespace uqseg
