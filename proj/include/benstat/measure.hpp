#ifndef BENSTAT_MEASURE_HPP
#define BENSTAT_MEASURE_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "benstat/phase.hpp"

namespace benstat {

// Convex combination of Diracs on phase space. Weights are kept exactly as
// constructed; validate() enforces positivity and unit total mass (1e-12).
struct Atom {
  double w = 0.0;
  PhaseVector z;
};

struct DiscreteMeasure {
  std::vector<Atom> atoms;

  int size() const { return static_cast<int>(atoms.size()); }
  void validate() const;
  double total_weight() const;
};

using Functional = std::function<double(const PhaseVector&)>;

// Weighted sum of f over the atoms, accumulated in atom order.
double moment(const DiscreteMeasure& m, const Functional& f);

// Fixed suite of bounded continuous cylinder functionals
//   phi_j(z) = tanh(<z, w_j>_H + c_j),  |phi_j| <= 1,
// with unit-H directions and offsets drawn deterministically from the seed.
// Serves as the finite stand-in for weak-star convergence testing.
class TestFunctionalSuite {
 public:
  static TestFunctionalSuite make(std::uint64_t seed, int n_u, int n_t, double gamma,
                                  int count = 32);

  int size() const { return static_cast<int>(dirs_.size()); }
  double eval(int j, const PhaseVector& z) const;
  double lipschitz() const { return 1.0; }
  std::uint64_t seed() const { return seed_; }
  double gamma() const { return gamma_; }

 private:
  std::vector<PhaseVector> dirs_;
  Eigen::VectorXd offsets_;
  double gamma_ = 1.0;
  std::uint64_t seed_ = 0;
};

// max_j |mu(phi_j) - nu(phi_j)| over the suite.
double suite_distance(const TestFunctionalSuite& suite, const DiscreteMeasure& mu,
                      const DiscreteMeasure& nu);

// Dyadic partition in the coordinates of the top principal directions of the
// reference measure (at most d_cell of them), nested across depths.
struct PartitionSpec {
  int depth = 2;    // 2^depth bins per retained coordinate
  int d_cell = -1;  // -1 chooses min(6, phase dimension)
};

// Constructive approximation: one atom per nonempty partition cell, cell mass
// as weight, representative chosen among the cell's support points with
// f(x) <= cell-conditional mean of f (lowest index on ties), so that
// integral-of-f never increases. Under dyadic refinement the output converges
// to mu_ref against every bounded continuous functional.
DiscreteMeasure choquet_approximate(const DiscreteMeasure& mu_ref, double K_radius,
                                    const PartitionSpec& cells, const Functional& f,
                                    double gamma);

// Splits mu0 over the annuli between the given radii (in |.|_H): weight_j is
// the mass of annulus j, component j the conditional measure on it; empty
// annuli are dropped. Recombining with the weights reproduces mu0 atom by
// atom.
std::vector<std::pair<double, DiscreteMeasure>> annulus_decompose(
    const DiscreteMeasure& mu0, const std::vector<double>& radii, double gamma);

// Weighted union of measures (weights need not be normalized individually;
// their combination must sum to 1).
DiscreteMeasure mixture(const std::vector<std::pair<double, DiscreteMeasure>>& parts);

// Smallest radius R on the documented geometric grid (base 1e-12, ratio 1.05,
// plus 0) such that every measure puts mass >= 1-eps on {|z|_H^2 <= R}.
double tightness_radius(const std::vector<DiscreteMeasure>& measures, double eps,
                        double gamma);

// Deterministic sample measures for configs and tests.
DiscreteMeasure dirac_measure(const PhaseVector& z);
DiscreteMeasure gaussian_empirical(std::uint64_t seed, int count, double scale, int n_u,
                                   int n_t, double gamma);

}  // namespace benstat

#endif
