#ifndef BENSTAT_GRID_HPP
#define BENSTAT_GRID_HPP

#include <Eigen/Dense>

#include "benstat/params.hpp"

namespace benstat {

enum class VerticalLayout { Uniform, StripRefined };

// Quadrature grid on (0,L1)x(0,L2)x(0,h): uniform periodic nodes horizontally
// (rectangle rule, exact for trigonometric products below the aliasing limit)
// and trapezoid nodes vertically. The vertical layout is uniform by default;
// StripRefined places extra uniform nodes inside [h-eps, h] with the strip
// boundary as a shared node.
//
// Flattened index convention: idx = (i1*n2 + i2)*nz + j, vertical fastest.
class Grid {
 public:
  int n1 = 0;  // horizontal nodes along x1
  int n2 = 0;  // horizontal nodes along x2
  int nz = 0;  // vertical node count (intervals + 1)
  double L1 = 0.0, L2 = 0.0, h = 0.0;
  double wx = 0.0, wy = 0.0;  // horizontal weights (L1/n1, L2/n2)
  Eigen::VectorXd z;          // vertical nodes, ascending, z[0]=0, z[nz-1]=h
  Eigen::VectorXd wz;         // vertical quadrature weights (trapezoid)

  long npoints() const { return static_cast<long>(n1) * n2 * nz; }
  long flat(int i1, int i2, int j) const {
    return (static_cast<long>(i1) * n2 + i2) * nz + j;
  }
  double x1(int i1) const { return L1 * i1 / n1; }
  double x2(int i2) const { return L2 * i2 / n2; }

  // Weight of the flattened point (separable: wx*wy*wz[j]).
  double w3(long idx) const { return wx * wy * wz(idx % nz); }

  int vertical_intervals() const { return nz - 1; }
  int nodes_in_strip(double eps) const;

  // Vertical weights v such that sum_j v[j] f(z_j) equals the exact integral
  // of the piecewise-linear interpolant of f over [a,b] in [0,h]. Used for
  // strip integrals and the kinked background profile.
  Eigen::VectorXd clipped_vertical_weights(double a, double b) const;

  double total_volume() const { return wx * n1 * wy * n2 * wz.sum(); }
};

// Builds the grid and enforces the resolution preconditions: N1,N2 >= 4 and
// even, N3 >= 16, at least `strip_min` nodes inside [h-epsilon, h], and total
// volume exact to 1e-12 relative.
Grid quadrature_grid(const ValidatedParameters& p, int N1, int N2, int N3,
                     VerticalLayout layout = VerticalLayout::Uniform, int strip_min = 8);

}  // namespace benstat

#endif
