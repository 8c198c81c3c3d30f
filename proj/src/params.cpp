#include "benstat/params.hpp"

#include <algorithm>
#include <cmath>

#include "benstat/errors.hpp"

namespace benstat {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::NonPositiveField: return "NonPositiveField";
    case Errc::BadTemperatureOrder: return "BadTemperatureOrder";
    case Errc::GammaTooSmall: return "GammaTooSmall";
    case Errc::EpsilonTooLarge: return "EpsilonTooLarge";
    case Errc::StripUnderresolved: return "StripUnderresolved";
    case Errc::ResolutionTooLow: return "ResolutionTooLow";
    case Errc::SkewSymmetryViolation: return "SkewSymmetryViolation";
    case Errc::QuadratureFailure: return "QuadratureFailure";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::SolverFailure: return "SolverFailure";
    case Errc::NonFiniteState: return "NonFiniteState";
    case Errc::EmptyCover: return "EmptyCover";
    case Errc::UnboundedF: return "UnboundedF";
    case Errc::UncoveredAtoms: return "UncoveredAtoms";
    case Errc::TimeOffGrid: return "TimeOffGrid";
    case Errc::BadModeCount: return "BadModeCount";
    case Errc::ConfigError: return "ConfigError";
    case Errc::IoError: return "IoError";
  }
  return "UnknownError";
}

double gamma_lower_bound(const Parameters& p, double lambda0) {
  const double ga = p.g * p.alpha;
  return 4.0 * ga * ga / (p.nu * p.kappa * lambda0 * lambda0);
}

double epsilon_sq_upper_bound(const Parameters& p, double lambda0) {
  const double ga = p.g * p.alpha;
  const double gap = p.temp_gap();
  const double inner = p.kappa / 4.0 - ga * ga / (p.gamma * p.nu * lambda0 * lambda0);
  return p.nu / (p.gamma * gap * gap) * inner;
}

ValidatedParameters validate_parameters(const Parameters& p, double lambda0) {
  auto positive = [](double v, const char* name) {
    require(std::isfinite(v) && v > 0.0, Errc::NonPositiveField, name);
  };
  positive(p.nu, "nu");
  positive(p.kappa, "kappa");
  positive(p.g, "g");
  positive(p.alpha, "alpha");
  positive(p.h, "h");
  positive(p.L1, "L1");
  positive(p.L2, "L2");
  positive(p.gamma, "gamma");
  positive(p.epsilon, "epsilon");
  positive(lambda0, "lambda0");
  require(p.T1 < p.T0, Errc::BadTemperatureOrder, "T1 must be strictly below T0");
  require(p.epsilon < p.h, Errc::EpsilonTooLarge, "epsilon must be below the layer height");

  const double gmin = gamma_lower_bound(p, lambda0);
  require(p.gamma > gmin, Errc::GammaTooSmall,
          "gamma=" + std::to_string(p.gamma) + " must exceed " + std::to_string(gmin));

  const double e2max = epsilon_sq_upper_bound(p, lambda0);
  require(e2max > 0.0, Errc::GammaTooSmall, "epsilon bound is vacuous; increase gamma");
  require(p.epsilon * p.epsilon < e2max, Errc::EpsilonTooLarge,
          "epsilon^2=" + std::to_string(p.epsilon * p.epsilon) + " must be below " +
              std::to_string(e2max));

  return ValidatedParameters(p, lambda0);
}

DerivedConstants derived_constants(const ValidatedParameters& p, double lambda1, double lambda2) {
  require(lambda1 > 0.0 && lambda2 > 0.0, Errc::NonPositiveField, "stiffness eigenvalues");
  DerivedConstants d;
  d.eta = std::min(p.nu(), p.kappa());
  d.lambda1 = lambda1;
  d.lambda2 = lambda2;
  d.lambda0 = std::min(lambda1, lambda2);
  const double gap2 = p.temp_gap() * p.temp_gap();
  d.R0 = 2.0 * p.kappa() * p.gamma() * p.L1() * p.L2() * gap2 /
         (d.eta * d.lambda0 * p.epsilon());
  d.Kb = 0.5 * d.eta * d.lambda0 * d.R0;
  return d;
}

NormProposal propose_gamma_epsilon(const Parameters& p0, double lambda0) {
  require(lambda0 > 0.0, Errc::NonPositiveField, "lambda0");
  Parameters p = p0;
  p.gamma = 2.0 * gamma_lower_bound(p, lambda0);
  const double e2max = epsilon_sq_upper_bound(p, lambda0);
  require(e2max > 0.0, Errc::EpsilonTooLarge, "no admissible epsilon for the proposed gamma");
  const double emax = std::min(p.h, std::sqrt(e2max));
  return NormProposal{p.gamma, 0.5 * emax};
}

}  // namespace benstat
