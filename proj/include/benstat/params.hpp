#ifndef BENSTAT_PARAMS_HPP
#define BENSTAT_PARAMS_HPP

#include <string>

namespace benstat {

// Physical and norm parameters of the Benard layer. The fluid occupies
// (0,L1)x(0,L2)x(0,h), heated to T0 at the bottom and cooled to T1 < T0 at the
// top. gamma weights the temperature component of the phase-space norms;
// epsilon is the thickness of the background-temperature boundary strip
// [h-epsilon, h].
struct Parameters {
  double nu = 1.0;       // kinematic viscosity [m^2/s]
  double kappa = 1.0;    // thermometric conductivity [m^2/s]
  double g = 1.0;        // gravity [m/s^2]
  double alpha = 1.0;    // volume-expansion coefficient [1/K]
  double T0 = 1.0;       // bottom temperature [K]
  double T1 = 0.0;       // top temperature [K], T1 < T0
  double h = 1.0;        // layer height [m]
  double L1 = 1.0;       // horizontal period, x1 [m]
  double L2 = 1.0;       // horizontal period, x2 [m]
  double gamma = 0.0;    // temperature-norm weight
  double epsilon = 0.0;  // background-profile strip thickness, 0 < epsilon < h

  double temp_gap() const { return T0 - T1; }
};

// Parameters that passed validate_parameters. Admissibility is tied to the
// smallest discrete stiffness eigenvalue used during validation, so the value
// is kept alongside the fields. Immutable; safe to share across threads.
class ValidatedParameters {
 public:
  const Parameters& get() const { return p_; }
  double lambda0() const { return lambda0_; }

  double nu() const { return p_.nu; }
  double kappa() const { return p_.kappa; }
  double g() const { return p_.g; }
  double alpha() const { return p_.alpha; }
  double T0() const { return p_.T0; }
  double T1() const { return p_.T1; }
  double h() const { return p_.h; }
  double L1() const { return p_.L1; }
  double L2() const { return p_.L2; }
  double gamma() const { return p_.gamma; }
  double epsilon() const { return p_.epsilon; }
  double temp_gap() const { return p_.temp_gap(); }

 private:
  friend ValidatedParameters validate_parameters(const Parameters&, double);
  ValidatedParameters(const Parameters& p, double lambda0) : p_(p), lambda0_(lambda0) {}
  Parameters p_;
  double lambda0_;
};

// Constants derived from validated parameters and the smallest stiffness
// eigenvalues of the two component operators.
struct DerivedConstants {
  double eta = 0.0;      // min(nu, kappa)
  double lambda1 = 0.0;  // smallest velocity stiffness eigenvalue
  double lambda2 = 0.0;  // smallest temperature stiffness eigenvalue
  double lambda0 = 0.0;  // min(lambda1, lambda2)
  double R0 = 0.0;       // absorbing level for |z|_H^2
  double Kb = 0.0;       // linear growth constant for sup_z (V(t,z)-V(t0,z))
};

// Strict lower bound on gamma: 4 (g alpha)^2 / (nu kappa lambda0^2).
double gamma_lower_bound(const Parameters& p, double lambda0);

// Strict upper bound on epsilon^2 given gamma:
//   (nu / (gamma (T0-T1)^2)) * (kappa/4 - (g alpha)^2 / (gamma nu lambda0^2)).
// Negative or zero when gamma itself is inadmissible.
double epsilon_sq_upper_bound(const Parameters& p, double lambda0);

// Checks positivity, T1 < T0, epsilon < h, and the two admissibility bounds
// above (both strict). lambda0 comes from the discrete bases.
ValidatedParameters validate_parameters(const Parameters& p, double lambda0);

// eta = min(nu,kappa); lambda0 = min(lambda1,lambda2);
// R0 = 2 kappa gamma L1 L2 (T1-T0)^2 / (eta lambda0 epsilon);
// Kb = (eta lambda0 / 2) R0.
DerivedConstants derived_constants(const ValidatedParameters& p, double lambda1, double lambda2);

// Proposes gamma = 2x its lower bound and epsilon = midpoint of the admissible
// range (0, min(h, sqrt(upper bound))). The paper leaves both free, so this is
// a convenience only; the proposal always validates.
struct NormProposal {
  double gamma;
  double epsilon;
};
NormProposal propose_gamma_epsilon(const Parameters& p, double lambda0);

}  // namespace benstat

#endif
