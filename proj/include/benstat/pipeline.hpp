#ifndef BENSTAT_PIPELINE_HPP
#define BENSTAT_PIPELINE_HPP

#include <cstdint>
#include <optional>
#include <string>

#include "benstat/config.hpp"
#include "benstat/ensemble.hpp"
#include "benstat/grid.hpp"
#include "benstat/measure.hpp"
#include "benstat/operators.hpp"

namespace benstat {

// Everything the simulation stages share. Built in dependency order: the
// admissibility constraints need the smallest discrete stiffness eigenvalue,
// which needs the bases, so validation runs twice: a bootstrap pass with the
// analytic temperature eigenvalue (an upper bound for lambda0, hence a weaker
// check that cannot reject an admissible config) and a final pass with the
// discrete lambda0.
struct System {
  RunConfig cfg;
  Grid grid;
  VelBasis vel;
  TempBasis temp;
  OperatorSet ops;
  std::optional<ValidatedParameters> vp;
  DerivedConstants consts;
  std::uint64_t hash = 0;

  const ValidatedParameters& params() const { return *vp; }
};

System build_system(const RunConfig& cfg, Exec exec = Exec::OpenMP);

// Cached variant: reuses <dir>/cache_bases.bsc and <dir>/cache_operators.bsc
// when their config hash matches, rebuilding (and rewriting) otherwise.
System build_system_cached(const RunConfig& cfg, const std::string& dir,
                           Exec exec = Exec::OpenMP);

// Initial measure per the [ensemble] section (dirac, gaussian-empirical, or
// file), before any constructive approximation.
DiscreteMeasure initial_measure(const RunConfig& cfg, const System& sys);

// Measure actually lifted: the constructive approximation of the initial
// measure with f = |.|_H^2 at the configured depth (identity at depth 0).
DiscreteMeasure prepared_measure(const RunConfig& cfg, const System& sys,
                                 const DiscreteMeasure& mu_ref);

}  // namespace benstat

#endif
