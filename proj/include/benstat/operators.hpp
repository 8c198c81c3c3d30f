#ifndef BENSTAT_OPERATORS_HPP
#define BENSTAT_OPERATORS_HPP

#include <Eigen/Dense>
#include <vector>

#include "benstat/basis.hpp"
#include "benstat/grid.hpp"
#include "benstat/kernels.hpp"
#include "benstat/params.hpp"
#include "benstat/phase.hpp"

namespace benstat {

// Finite-dimensional realization of dz/dt + Az + B(z,z) + Rz = 0 in the
// L2-orthonormal bases. Sign conventions, with a/b the velocity/temperature
// coefficients:
//   da_i/dt = -nu (S1 a)_i - sum_{j,k} Tuu(j,k,i) a_j a_k + g alpha (C b)_i + f_const_i
//   db_k/dt = -kappa (S2 b)_k - sum_{j,m} Tut(j,m,k) a_j b_m + (D^T a)_k + g_bg_k
// The advection tensors are stored in explicitly skew-symmetrized form (skew
// in the last two indices), which makes the quadratic terms exactly energy
// neutral; the pre-symmetrization asymmetry is kept as a resolution
// diagnostic. The background Laplacian enters only weakly: g_bg integrates
// grad T_b against test-function gradients over the strip, never a pointwise
// Laplacian of the piecewise-linear profile.
struct OperatorSet {
  Eigen::MatrixXd S1;       // velocity stiffness, dense SPD
  Eigen::VectorXd S2;       // temperature stiffness eigenvalues (diagonal)
  Tensor3 Tuu;              // ((phi_i . grad) phi_j, phi_k)_1, skew in (j,k)
  Tensor3 Tut;              // ((phi_i . grad) th_j, th_k)_2, skew in (j,k)
  Eigen::MatrixXd C;        // (th_j e3, phi_i)_1
  Eigen::VectorXd f_const;  // (g alpha (T_b + T0 - T1) e3, phi_i)_1
  Eigen::MatrixXd D;        // -((T1-T0)/eps) int_strip phi_i^(3) th_k
  Eigen::VectorXd g_bg;     // -kappa ((T1-T0)/eps) int_strip d th_k / dx3

  double gamma = 0.0;
  double raw_skew_uu = 0.0;  // worst |q(i,j,k)+q(i,k,j)| / scale before symmetrization
  double raw_skew_ut = 0.0;

  int n_u() const { return static_cast<int>(S1.rows()); }
  int n_t() const { return static_cast<int>(S2.size()); }
};

// Quadrature assembly of every operator on the grid shared by the two bases.
// skew_tol bounds the tolerated relative raw asymmetry of the advection
// tensors; larger values indicate an under-resolved grid.
OperatorSet assemble_operators(const VelBasis& vel, const TempBasis& temp, const Grid& grid,
                               const ValidatedParameters& p, Exec exec = Exec::OpenMP,
                               double skew_tol = 1e-2);

// Time derivative of the Galerkin system at state z.
PhaseVector rhs(const OperatorSet& ops, const ValidatedParameters& p, const PhaseVector& z,
                Exec exec = Exec::Serial);

// Explicit (advection + coupling + forcing) part only; the stiffness part is
// handled implicitly by the integrator.
PhaseVector explicit_rhs(const OperatorSet& ops, const ValidatedParameters& p,
                         const PhaseVector& z, Exec exec = Exec::Serial);

struct Trajectory;  // defined in integrator.hpp

// Time-integrated distributional residual of a sampled trajectory: for every
// basis direction and a fixed family of smooth compactly supported time
// windows, |int (-z phi' + F(z) phi) dt| by the trajectory's own trapezoid
// rule, with F = Az + B(z,z) + Rz. The window quadrature is accumulated in
// symmetric pairs about the window center so an exact equilibrium yields an
// exactly zero residual.
struct WeakResidual {
  Eigen::VectorXd per_mode;  // velocity modes first, then temperature
  double max = 0.0;
};
WeakResidual weak_residual(const Trajectory& traj, const OperatorSet& ops,
                           const ValidatedParameters& p);

}  // namespace benstat

#endif
