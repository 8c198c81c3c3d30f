#ifndef BENSTAT_ENSEMBLE_HPP
#define BENSTAT_ENSEMBLE_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "benstat/integrator.hpp"
#include "benstat/measure.hpp"
#include "benstat/operators.hpp"
#include "benstat/params.hpp"

namespace benstat {

// Weighted finite set of trajectories on a shared time grid: the finite
// stand-in for a measure on path space. Immutable after lift.
struct TrajectoryEnsemble {
  Eigen::VectorXd weights;
  std::vector<Trajectory> trajs;
  std::string provenance;        // initial-measure id
  std::uint64_t config_hash = 0;

  int size() const { return static_cast<int>(trajs.size()); }
  double t0() const { return trajs.front().t0; }
  double dt() const { return trajs.front().dt; }
  int steps() const { return trajs.front().steps(); }
};

// One trajectory per atom of mu0, weights copied; evaluating the ensemble at
// t0 reproduces mu0 exactly. Trajectories run in parallel under OpenMP;
// integrator errors are rethrown tagged with the atom index.
TrajectoryEnsemble lift_measure(const DiscreteMeasure& mu0, const OperatorSet& ops,
                                const ValidatedParameters& p, double horizon, double dt,
                                StepScheme scheme = StepScheme::Cnab2,
                                Exec exec = Exec::OpenMP);

// Distribution of z(t) under the ensemble (the discrete pushforward).
DiscreteMeasure pushforward_at(const TrajectoryEnsemble& ens, double t);

// Time-averaged squared H norm: V(t,z) = (t-t0)^{-1} int_{t0}^t |z|_H^2 ds by
// the trajectory's trapezoid rule; V(t0,z) = |z(t0)|_H^2.
double v_functional(const Trajectory& traj, double t);

// Same with the state truncated to the k lowest modes of each component;
// nondecreasing in k and equal to v_functional at full k.
double galerkin_v(const Trajectory& traj, double t, int k, double gamma);

// Dimensionless error constants measured on the linear (advection and
// background disabled) configuration against its closed-form solution; every
// dt^2 tolerance below is 10 * c * dt^2 at the matching scale.
struct Calibration {
  double c_energy = 1.0;  // worst energy-identity defect / (dt^2 * energy scale)
  double c_resid = 1.0;   // weak residual / (dt^2 * max |F|_H)
  double dt = 0.0;
};
Calibration calibrate_tolerances(const OperatorSet& ops, const ValidatedParameters& p,
                                 const DerivedConstants& consts, double dt);

// Discrete analogues of the trajectory-space hypotheses:
//  - right continuity at t0 of every trajectory, measured on shrinking dyadic
//    windows against the trajectory's own velocity bound;
//  - the V-drift line: sup_i (V(t,z_i) - V(t0,z_i)) <= Kb (t-t0) + tol(dt);
//  - the bounded-ensemble envelope from the exponential a-priori bound.
struct HConditionsReport {
  double worst_rc_ratio = 0.0;  // windowed |z-z0|_H^2 over its measured bound
  bool rc_pass = true;
  double kb_slack = 0.0;        // min over t of (Kb line + tol - sup drift)/scale
  bool kb_pass = true;
  double envelope_excess = 0.0; // max over (i,t) of (h2 - bound)/bound
  bool envelope_pass = true;
  double tol_dt = 0.0;
};
HConditionsReport check_h_conditions(const TrajectoryEnsemble& ens,
                                     const DerivedConstants& consts,
                                     const ValidatedParameters& p, const OperatorSet& ops,
                                     const Calibration& cal);

// Full verification of the finite statistical solution.
struct CarrierCheck {
  int atom = -1;
  double weak_resid = 0.0;
  double resid_tol = 0.0;
  bool energy_pass = true;
  bool pass = true;
};

struct StatSolutionReport {
  double init_atom_error = 0.0;   // max_i |z_i(t0) - x_i|_H, expected exactly 0
  double init_suite_error = 0.0;  // suite distance of the t0 pushforward vs mu0
  std::vector<CarrierCheck> carrier;
  bool carrier_all_pass = true;
  double mean_energy_slack = 0.0;  // min over t of (mean envelope - mean h2)/scale
  bool mean_energy_pass = true;
  double tightness_radius_all = 0.0;
  double tightness_bound = 0.0;
  bool tightness_pass = true;
  HConditionsReport h;
  Calibration cal;
  std::uint64_t suite_seed = 0;

  bool all_pass() const {
    return init_atom_error == 0.0 && carrier_all_pass && mean_energy_pass &&
           tightness_pass && h.rc_pass && h.kb_pass && h.envelope_pass;
  }
};

StatSolutionReport verify_statistical_solution(const TrajectoryEnsemble& ens,
                                               const DiscreteMeasure& mu0,
                                               const DerivedConstants& consts,
                                               const ValidatedParameters& p,
                                               const OperatorSet& ops,
                                               const TestFunctionalSuite& suite);

}  // namespace benstat

#endif
