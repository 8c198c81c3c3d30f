#ifndef BENSTAT_PHASE_HPP
#define BENSTAT_PHASE_HPP

#include <Eigen/Dense>
#include <cmath>

namespace benstat {

// Galerkin coefficients of a phase-space point z = (u, theta). The bases are
// orthonormal in the component L^2 spaces, so the H norm carries the gamma
// weight explicitly: |z|_H^2 = |a|^2 + gamma |b|^2.
struct PhaseVector {
  Eigen::VectorXd a;  // velocity coefficients
  Eigen::VectorXd b;  // temperature coefficients

  PhaseVector() = default;
  PhaseVector(Eigen::VectorXd av, Eigen::VectorXd bv) : a(std::move(av)), b(std::move(bv)) {}

  static PhaseVector zero(int nu_modes, int nt_modes) {
    return PhaseVector(Eigen::VectorXd::Zero(nu_modes), Eigen::VectorXd::Zero(nt_modes));
  }

  bool same_shape(const PhaseVector& o) const {
    return a.size() == o.a.size() && b.size() == o.b.size();
  }
  bool finite() const { return a.allFinite() && b.allFinite(); }

  PhaseVector operator+(const PhaseVector& o) const { return {a + o.a, b + o.b}; }
  PhaseVector operator-(const PhaseVector& o) const { return {a - o.a, b - o.b}; }
  PhaseVector operator*(double s) const { return {s * a, s * b}; }
};

inline double h_inner(const PhaseVector& x, const PhaseVector& y, double gamma) {
  return x.a.dot(y.a) + gamma * x.b.dot(y.b);
}

inline double h_norm_sq(const PhaseVector& z, double gamma) { return h_inner(z, z, gamma); }

inline double h_norm(const PhaseVector& z, double gamma) {
  return std::sqrt(h_norm_sq(z, gamma));
}

// ||z||_V^2 = a^T S1 a + gamma b^T S2 b with S2 diagonal.
inline double v_norm_sq(const PhaseVector& z, const Eigen::MatrixXd& S1,
                        const Eigen::VectorXd& S2diag, double gamma) {
  return z.a.dot(S1 * z.a) + gamma * z.b.dot(S2diag.cwiseProduct(z.b));
}

}  // namespace benstat

#endif
