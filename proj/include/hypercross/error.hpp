#pragma once

#include <stdexcept>
#include <string>

namespace hypercross {

enum class ErrorKind {
  InvalidArgument,
  ZeroWeight,
  Divergent,
  HypothesisViolated,
  TailBoundInconclusive,
  NoFinitePrefix,
  MarginViolated,
  CapExceeded,
  Overflow,
  DimensionOutOfRange,
  NonConvergence,
  QuadratureDegree,
  NotElliptic,
  Parse,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ZeroWeight: return "ZeroWeight";
    case ErrorKind::Divergent: return "Divergent";
    case ErrorKind::HypothesisViolated: return "HypothesisViolated";
    case ErrorKind::TailBoundInconclusive: return "TailBoundInconclusive";
    case ErrorKind::NoFinitePrefix: return "NoFinitePrefix";
    case ErrorKind::MarginViolated: return "MarginViolated";
    case ErrorKind::CapExceeded: return "CapExceeded";
    case ErrorKind::Overflow: return "Overflow";
    case ErrorKind::DimensionOutOfRange: return "DimensionOutOfRange";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::QuadratureDegree: return "QuadratureDegree";
    case ErrorKind::NotElliptic: return "NotElliptic";
    case ErrorKind::Parse: return "Parse";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-checkable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(ErrorKind::InvalidArgument, what);
}

}  // namespace hypercross
