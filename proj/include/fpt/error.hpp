#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fpt {

enum class Errc {
  CycleDetected,
  Disconnected,
  DuplicateEdge,
  UnknownRoot,
  UnknownVertex,
  NoBranchingPoint,
  SizeOutOfRange,
  NotNormalized,
  NegativeWeight,
  DuplicateKey,
  ZeroMean,
  InvalidRate,
  InsufficientDepth,
  AllExtinct,
  HypothesisNotMet,
  VertexCapExceeded,
  InvalidInput,
};

constexpr std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::CycleDetected: return "CycleDetected";
    case Errc::Disconnected: return "Disconnected";
    case Errc::DuplicateEdge: return "DuplicateEdge";
    case Errc::UnknownRoot: return "UnknownRoot";
    case Errc::UnknownVertex: return "UnknownVertex";
    case Errc::NoBranchingPoint: return "NoBranchingPoint";
    case Errc::SizeOutOfRange: return "SizeOutOfRange";
    case Errc::NotNormalized: return "NotNormalized";
    case Errc::NegativeWeight: return "NegativeWeight";
    case Errc::DuplicateKey: return "DuplicateKey";
    case Errc::ZeroMean: return "ZeroMean";
    case Errc::InvalidRate: return "InvalidRate";
    case Errc::InsufficientDepth: return "InsufficientDepth";
    case Errc::AllExtinct: return "AllExtinct";
    case Errc::HypothesisNotMet: return "HypothesisNotMet";
    case Errc::VertexCapExceeded: return "VertexCapExceeded";
    case Errc::InvalidInput: return "InvalidInput";
  }
  return "Unknown";
}

/// Exception carrying a machine-checkable error code.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace fpt
