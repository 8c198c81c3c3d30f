#ifndef BENSTAT_ERRORS_HPP
#define BENSTAT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace benstat {

enum class Errc {
  NonPositiveField,
  BadTemperatureOrder,
  GammaTooSmall,
  EpsilonTooLarge,
  StripUnderresolved,
  ResolutionTooLow,
  SkewSymmetryViolation,
  QuadratureFailure,
  DimensionMismatch,
  SolverFailure,
  NonFiniteState,
  EmptyCover,
  UnboundedF,
  UncoveredAtoms,
  TimeOffGrid,
  BadModeCount,
  ConfigError,
  IoError,
};

const char* errc_name(Errc c);

// Single exception type carrying a machine-checkable code; all library
// errors go through this so tests and the CLI can dispatch on `code`.
class Error : public std::runtime_error {
 public:
  Error(Errc c, const std::string& what)
      : std::runtime_error(std::string(errc_name(c)) + ": " + what), code(c) {}
  Errc code;
};

[[noreturn]] inline void fail(Errc c, const std::string& what) { throw Error(c, what); }

inline void require(bool ok, Errc c, const std::string& what) {
  if (!ok) fail(c, what);
}

}  // namespace benstat

#endif
