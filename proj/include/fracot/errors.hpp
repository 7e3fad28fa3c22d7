#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fracot {

enum class Errc {
  NonConformingSpacing,
  EmptyRegion,
  RegionOverlapViolation,
  UnknownRegion,
  QuadratureFailure,
  NonPositiveGamma,
  InsufficientPadding,
  CoercivityLost,
  SolverDiverged,
  EigenFailure,
  SupportViolation,
  HypothesisViolation,
  UnresolvableScale,
  OutsideMeasurementSet,
  ExponentOutOfRange,
  GeometryViolation,
  NegativeSolution,
  InvalidArgument,
  ConfigError,
};

std::string_view errc_name(Errc code);

// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] void fail(Errc code, const std::string& what);

inline void require(bool ok, Errc code, const std::string& what) {
  if (!ok) fail(code, what);
}

}  // namespace fracot
