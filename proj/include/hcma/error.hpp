#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hcma {

enum class ErrorKind {
  InvalidArgument,
  OutsideDisk,
  IncompatibleAnchor,
  DimensionMismatch,
  DegenerateA,
  NoContraction,
  MaxIterations,
  NoConvergence,
  FoliationDegenerate,
  LeftChart,
  InversionFailed,
  SingularXBlock,
  NotConvex,
  NotSameForm,
  GridTooCoarse,
  GridNotGeometric,
  ParseError,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a kind so callers can map it
/// to an exit code or a retry policy without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::OutsideDisk: return "OutsideDisk";
    case ErrorKind::IncompatibleAnchor: return "IncompatibleAnchor";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::DegenerateA: return "DegenerateA";
    case ErrorKind::NoContraction: return "NoContraction";
    case ErrorKind::MaxIterations: return "MaxIterations";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::FoliationDegenerate: return "FoliationDegenerate";
    case ErrorKind::LeftChart: return "LeftChart";
    case ErrorKind::InversionFailed: return "InversionFailed";
    case ErrorKind::SingularXBlock: return "SingularXBlock";
    case ErrorKind::NotConvex: return "NotConvex";
    case ErrorKind::NotSameForm: return "NotSameForm";
    case ErrorKind::GridTooCoarse: return "GridTooCoarse";
    case ErrorKind::GridNotGeometric: return "GridNotGeometric";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace hcma
