#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ialm {

enum class ErrorKind {
  DimensionMismatch,
  NotSPD,
  NotSymmetric,
  NonFinite,
  NoConvergence,
  Singular,
  NegativeQuadraticForm,
  SingularBlock,
  Breakdown,
  RankDeficient,
  TooManyBlocks,
  TooLarge,
  InvalidArgument,
  Parse,
  Index,
  Io,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotSPD: return "NotSPD";
    case ErrorKind::NotSymmetric: return "NotSymmetric";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::Singular: return "Singular";
    case ErrorKind::NegativeQuadraticForm: return "NegativeQuadraticForm";
    case ErrorKind::SingularBlock: return "SingularBlock";
    case ErrorKind::Breakdown: return "Breakdown";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::TooManyBlocks: return "TooManyBlocks";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::Index: return "IndexError";
    case ErrorKind::Io: return "IoError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) throw Error(kind, what);
}

}  // namespace ialm
