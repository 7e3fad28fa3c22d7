#include "fracot/errors.hpp"

namespace fracot {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::NonConformingSpacing: return "NonConformingSpacing";
    case Errc::EmptyRegion: return "EmptyRegion";
    case Errc::RegionOverlapViolation: return "RegionOverlapViolation";
    case Errc::UnknownRegion: return "UnknownRegion";
    case Errc::QuadratureFailure: return "QuadratureFailure";
    case Errc::NonPositiveGamma: return "NonPositiveGamma";
    case Errc::InsufficientPadding: return "InsufficientPadding";
    case Errc::CoercivityLost: return "CoercivityLost";
    case Errc::SolverDiverged: return "SolverDiverged";
    case Errc::EigenFailure: return "EigenFailure";
    case Errc::SupportViolation: return "SupportViolation";
    case Errc::HypothesisViolation: return "HypothesisViolation";
    case Errc::UnresolvableScale: return "UnresolvableScale";
    case Errc::OutsideMeasurementSet: return "OutsideMeasurementSet";
    case Errc::ExponentOutOfRange: return "ExponentOutOfRange";
    case Errc::GeometryViolation: return "GeometryViolation";
    case Errc::NegativeSolution: return "NegativeSolution";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace fracot
