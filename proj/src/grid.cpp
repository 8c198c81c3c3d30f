#include "benstat/grid.hpp"

#include <cmath>

#include "benstat/errors.hpp"

namespace benstat {

int Grid::nodes_in_strip(double eps) const {
  int count = 0;
  for (int j = 0; j < nz; ++j)
    if (z(j) >= h - eps - 1e-14 * h) ++count;
  return count;
}

Eigen::VectorXd Grid::clipped_vertical_weights(double a, double b) const {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(nz);
  for (int j = 0; j + 1 < nz; ++j) {
    const double zl = z(j), zr = z(j + 1);
    const double c = std::max(a, zl), d = std::min(b, zr);
    if (d <= c) continue;
    const double dz = zr - zl;
    const double tc = (c - zl) / dz, td = (d - zl) / dz;
    // Trapezoid of the linear interpolant on [c,d], distributed onto the
    // two cell endpoints; exact for linear integrands.
    const double half = 0.5 * (d - c);
    w(j) += half * ((1.0 - tc) + (1.0 - td));
    w(j + 1) += half * (tc + td);
  }
  return w;
}

namespace {

Eigen::VectorXd trapezoid_weights(const Eigen::VectorXd& z) {
  const int n = static_cast<int>(z.size());
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  for (int j = 0; j + 1 < n; ++j) {
    const double half = 0.5 * (z(j + 1) - z(j));
    w(j) += half;
    w(j + 1) += half;
  }
  return w;
}

}  // namespace

Grid quadrature_grid(const ValidatedParameters& p, int N1, int N2, int N3,
                     VerticalLayout layout, int strip_min) {
  require(N1 >= 4 && N1 % 2 == 0, Errc::QuadratureFailure, "N1 must be even and >= 4");
  require(N2 >= 4 && N2 % 2 == 0, Errc::QuadratureFailure, "N2 must be even and >= 4");
  require(N3 >= 16, Errc::QuadratureFailure, "N3 must be >= 16");

  Grid g;
  g.n1 = N1;
  g.n2 = N2;
  g.L1 = p.L1();
  g.L2 = p.L2();
  g.h = p.h();
  g.wx = p.L1() / N1;
  g.wy = p.L2() / N2;

  if (layout == VerticalLayout::Uniform) {
    g.nz = N3 + 1;
    g.z.resize(g.nz);
    for (int j = 0; j <= N3; ++j) g.z(j) = p.h() * j / N3;
  } else {
    // Same total interval budget: coarse part on [0, h-eps], then at least
    // strip_min uniform intervals on [h-eps, h].
    const double eps = p.epsilon();
    const int fine = std::max(strip_min, N3 / 4);
    const int coarse = std::max(8, N3 - fine);
    g.nz = coarse + fine + 1;
    g.z.resize(g.nz);
    for (int j = 0; j <= coarse; ++j) g.z(j) = (p.h() - eps) * j / coarse;
    for (int j = 1; j <= fine; ++j) g.z(coarse + j) = (p.h() - eps) + eps * j / fine;
  }
  g.z(g.nz - 1) = p.h();
  g.wz = trapezoid_weights(g.z);

  require(g.nodes_in_strip(p.epsilon()) >= strip_min, Errc::StripUnderresolved,
          "fewer than " + std::to_string(strip_min) + " vertical nodes in [h-eps, h]");

  const double vol = p.L1() * p.L2() * p.h();
  require(std::abs(g.total_volume() - vol) <= 1e-12 * vol, Errc::QuadratureFailure,
          "quadrature volume defect");
  return g;
}

}  // namespace benstat
