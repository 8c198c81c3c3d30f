#ifndef BENSTAT_BASIS_HPP
#define BENSTAT_BASIS_HPP

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "benstat/grid.hpp"
#include "benstat/params.hpp"

namespace benstat {

enum class Parity { Cos, Sin };

// Real horizontal family chi(x) = cos/sin(2pi k1 x1/L1 + 2pi k2 x2/L2) with
// wavevectors restricted to the half space (k1>0) or (k1==0, k2>=0), so that
// each plane wave appears exactly once; the (0,0) sine is excluded. The table
// caches node values and the closed differentiation rules
//   d/dx1 cos = -alpha sin,  d/dx1 sin = +alpha cos   (alpha = 2pi k1/L1)
// and similarly for x2.
class HorizontalTable {
 public:
  HorizontalTable(const Grid& grid, int Kh);

  struct Func {
    int k1, k2;
    Parity par;
    double alpha, beta;  // 2pi k1/L1, 2pi k2/L2
    int partner;         // id of the opposite-parity function, -1 for (0,0)
  };

  int size() const { return static_cast<int>(funcs_.size()); }
  int kh() const { return Kh_; }
  const Func& func(int id) const { return funcs_[id]; }
  int find(int k1, int k2, Parity par) const;

  // Values on the horizontal nodes, indexed by hidx = i1*n2 + i2.
  const Eigen::VectorXd& values(int id) const { return values_[id]; }

  // d chi_id / dx_dir = factor * chi_partner (dir is 1 or 2); partner may be -1.
  double dfactor(int id, int dir) const {
    const Func& f = funcs_[id];
    const double a = (dir == 1) ? f.alpha : f.beta;
    return f.par == Parity::Cos ? -a : a;
  }

  // Exact L2(horizontal) inner product of two family members.
  double pair_integral(int id_a, int id_b, double L1, double L2) const;

 private:
  int Kh_;
  std::vector<Func> funcs_;
  std::vector<Eigen::VectorXd> values_;
};

// One separable component p(z) * chi(x1,x2); hfunc = -1 marks an identically
// zero component. Profiles live on the grid's vertical nodes.
struct SepComp {
  int hfunc = -1;
  Eigen::VectorXd profile;

  bool zero() const { return hfunc < 0; }
};

// ---------------------------------------------------------------------------
// Temperature basis: analytic eigenfunctions of the Dirichlet/periodic
// Laplacian, chi(x1,x2) * sin(m pi x3 / h), L2-normalized.
// ---------------------------------------------------------------------------

struct TempMode {
  int k1, k2;
  Parity par;
  int m;
  double eigenvalue;  // (2pi k1/L1)^2 + (2pi k2/L2)^2 + (m pi/h)^2
  double norm_c;      // L2 normalization constant
};

struct TempBasis {
  std::vector<TempMode> modes;  // sorted by eigenvalue ascending
  double L1 = 0, L2 = 0, h = 0;
  int Kh = 0, Mv = 0;

  int size() const { return static_cast<int>(modes.size()); }
  double lambda2() const { return modes.front().eigenvalue; }
  Eigen::VectorXd eigenvalues() const;

  // Vertical profile and its exact derivative sampled on nodes z.
  Eigen::VectorXd profile(int i, const Eigen::VectorXd& z) const;
  Eigen::VectorXd dprofile(int i, const Eigen::VectorXd& z) const;
};

// Total mode count is Mv*(2Kh+1)^2: the ((2Kh+1)^2-1)/2 half-space wavevectors
// contribute cos+sin pairs and (0,0) contributes the cos only, each with Mv
// vertical indices.
long temp_mode_count(int Kh, int Mv);

TempBasis build_temperature_basis(const ValidatedParameters& p, int Kh, int Mv);

// ---------------------------------------------------------------------------
// Velocity basis: divergence-free, no-slip fields assembled from 1D
// finite-difference eigenproblems per horizontal wavevector.
//   k=(0,0)  shear modes (psi(z), 0, 0), (0, psi(z), 0), psi Dirichlet;
//   k!=0    toroidal  psi(z) * (k-perp/|k|) * chi,      u3 = 0;
//            poloidal  u3 = phi(z) chi, u_h = -+ (Dz phi / |k|^2) (alpha,beta) chi*,
// with phi clamped (value and one-sided derivative zero at both walls), which
// makes the on-grid divergence and the wall values vanish identically.
// ---------------------------------------------------------------------------

enum class VelModeType { Shear, Toroidal, Poloidal };

struct VelMode {
  VelModeType type;
  int k1 = 0, k2 = 0;
  Parity par = Parity::Cos;  // horizontal phase of u_h (shear/toroidal) or u3 (poloidal)
  int pol = 0;               // shear polarization: 0 -> u1, 1 -> u2
  int branch = 0;            // eigenvalue index within the 1D family
  double rayleigh = 0.0;     // 1D eigenproblem eigenvalue
  std::array<SepComp, 3> comp;
};

struct VelBasis {
  std::vector<VelMode> modes;
  Eigen::MatrixXd S1;    // grid-quadrature stiffness ((phi_i, phi_j))_1
  Eigen::MatrixXd gram;  // grid-quadrature L2 Gram matrix
  double lambda1 = 0.0;  // smallest eigenvalue of S1
  int Kh = 0;
  Eigen::VectorXd z;     // vertical nodes the profiles live on
  Eigen::MatrixXd Dz;    // first-derivative matrix used for all profiles
  double div_residual = 0.0;       // worst relative on-grid divergence
  double boundary_residual = 0.0;  // worst relative wall value

  int size() const { return static_cast<int>(modes.size()); }
};

// First-derivative matrix on the (possibly nonuniform) node set: 3-point
// central stencils inside, one-sided 3-point at the ends; exact on quadratics.
Eigen::MatrixXd derivative_matrix(const Eigen::VectorXd& z);
Eigen::MatrixXd second_derivative_matrix(const Eigen::VectorXd& z);

VelBasis build_velocity_basis(const ValidatedParameters& p, const Grid& grid, int Kh,
                              int n_modes);

// ---------------------------------------------------------------------------
// Evaluation helpers shared by the operator assembly and the tests.
// ---------------------------------------------------------------------------

// Dense values of p(z)*chi on the flattened grid (vertical fastest).
Eigen::VectorXd evaluate_sep(const SepComp& c, const HorizontalTable& table, const Grid& grid);

// Analytic-in-horizontal derivative of a separable component. dir=1,2 use the
// table's differentiation rule; dir=3 applies Dz to the profile.
SepComp differentiate_sep(const SepComp& c, int dir, const HorizontalTable& table,
                          const Eigen::MatrixXd& Dz);

// Temperature mode as a separable component (and its vertical derivative).
SepComp temp_sep(const TempBasis& basis, int i, const HorizontalTable& table,
                 const Eigen::VectorXd& z);

// Upper bound for max_grid |sum_c d(comp_c)/dx_c| of a velocity mode, grouped
// per horizontal function so exact cancellations are visible.
double divergence_residual(const VelMode& m, const HorizontalTable& table,
                           const Eigen::MatrixXd& Dz);

double boundary_residual(const VelMode& m);

}  // namespace benstat

#endif
