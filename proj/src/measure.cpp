#include "benstat/measure.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

#include "benstat/errors.hpp"
#include "benstat/rng.hpp"

namespace benstat {

double DiscreteMeasure::total_weight() const {
  double s = 0.0;
  for (const Atom& a : atoms) s += a.w;
  return s;
}

void DiscreteMeasure::validate() const {
  require(!atoms.empty(), Errc::DimensionMismatch, "measure needs at least one atom");
  for (const Atom& a : atoms) {
    require(a.w > 0.0 && std::isfinite(a.w), Errc::DimensionMismatch, "atom weight");
    require(a.z.finite(), Errc::NonFiniteState, "atom coordinates");
  }
  require(std::abs(total_weight() - 1.0) <= 1e-12, Errc::DimensionMismatch,
          "weights must sum to 1");
}

double moment(const DiscreteMeasure& m, const Functional& f) {
  double s = 0.0;
  for (const Atom& a : m.atoms) s += a.w * f(a.z);
  return s;
}

// ---------------------------------------------------------------------------
// Test-functional suite
// ---------------------------------------------------------------------------

TestFunctionalSuite TestFunctionalSuite::make(std::uint64_t seed, int n_u, int n_t,
                                              double gamma, int count) {
  require(count >= 1 && n_u + n_t >= 1, Errc::DimensionMismatch, "suite shape");
  TestFunctionalSuite s;
  s.seed_ = seed;
  s.gamma_ = gamma;
  Rng rng(seed);
  const double sg = std::sqrt(gamma);
  s.offsets_.resize(count);
  for (int j = 0; j < count; ++j) {
    Eigen::VectorXd y(n_u + n_t);
    for (int i = 0; i < y.size(); ++i) y(i) = rng.normal();
    y /= y.norm();
    // unit vector in the H embedding: <z,w>_H = a.ya + sqrt(gamma) b.yb
    PhaseVector w;
    w.a = y.head(n_u);
    w.b = y.tail(n_t) / sg;
    s.dirs_.push_back(std::move(w));
    s.offsets_(j) = 0.5 * rng.normal();
  }
  return s;
}

double TestFunctionalSuite::eval(int j, const PhaseVector& z) const {
  return std::tanh(h_inner(z, dirs_[j], gamma_) + offsets_(j));
}

double suite_distance(const TestFunctionalSuite& suite, const DiscreteMeasure& mu,
                      const DiscreteMeasure& nu) {
  double worst = 0.0;
  for (int j = 0; j < suite.size(); ++j) {
    const auto f = [&](const PhaseVector& z) { return suite.eval(j, z); };
    worst = std::max(worst, std::abs(moment(mu, f) - moment(nu, f)));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Constructive approximation
// ---------------------------------------------------------------------------

namespace {

Eigen::VectorXd h_embed(const PhaseVector& z, double sg) {
  Eigen::VectorXd y(z.a.size() + z.b.size());
  y.head(z.a.size()) = z.a;
  y.tail(z.b.size()) = sg * z.b;
  return y;
}

void canonical_sign(Eigen::VectorXd& v) {
  int imax = 0;
  for (int i = 1; i < v.size(); ++i)
    if (std::abs(v(i)) > std::abs(v(imax))) imax = i;
  if (v(imax) < 0.0) v = -v;
}

constexpr int kMaxCellDims = 6;
using CellKey = std::array<int, kMaxCellDims>;

}  // namespace

DiscreteMeasure choquet_approximate(const DiscreteMeasure& mu_ref, double K_radius,
                                    const PartitionSpec& cells, const Functional& f,
                                    double gamma) {
  mu_ref.validate();
  require(cells.depth >= 0 && cells.depth <= 20, Errc::DimensionMismatch, "partition depth");
  const int n = mu_ref.size();
  const int dim = static_cast<int>(mu_ref.atoms[0].z.a.size() + mu_ref.atoms[0].z.b.size());
  const int d = cells.d_cell > 0 ? std::min({cells.d_cell, dim, kMaxCellDims})
                                 : std::min(dim, kMaxCellDims);
  const double sg = std::sqrt(gamma);

  for (const Atom& a : mu_ref.atoms)
    require(h_norm(a.z, gamma) <= K_radius * (1.0 + 1e-12), Errc::EmptyCover,
            "support point outside the covered ball");

  std::vector<double> fv(n);
  for (int i = 0; i < n; ++i) {
    fv[i] = f(mu_ref.atoms[i].z);
    require(std::isfinite(fv[i]), Errc::UnboundedF, "f not finite on the support");
  }

  // Principal directions of the weighted support in the H embedding; the box
  // and directions depend only on mu_ref, so dyadic depths nest.
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
  for (const Atom& a : mu_ref.atoms) mean += a.w * h_embed(a.z, sg);
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(dim, dim);
  for (const Atom& a : mu_ref.atoms) {
    const Eigen::VectorXd y = h_embed(a.z, sg) - mean;
    cov.noalias() += a.w * y * y.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  require(es.info() == Eigen::Success, Errc::SolverFailure, "support covariance");
  Eigen::MatrixXd P(dim, d);  // columns: top principal directions
  for (int r = 0; r < d; ++r) {
    Eigen::VectorXd v = es.eigenvectors().col(dim - 1 - r);
    canonical_sign(v);
    P.col(r) = v;
  }

  Eigen::MatrixXd xi(n, d);
  for (int i = 0; i < n; ++i)
    xi.row(i) = (P.transpose() * (h_embed(mu_ref.atoms[i].z, sg) - mean)).transpose();
  Eigen::VectorXd lo = xi.colwise().minCoeff();
  Eigen::VectorXd hi = xi.colwise().maxCoeff();

  const int bins = 1 << cells.depth;
  std::map<CellKey, std::vector<int>> cellmap;
  for (int i = 0; i < n; ++i) {
    CellKey key{};
    for (int r = 0; r < d; ++r) {
      const double range = hi(r) - lo(r);
      int b = range > 0.0 ? static_cast<int>((xi(i, r) - lo(r)) / range * bins) : 0;
      key[r] = std::clamp(b, 0, bins - 1);
    }
    cellmap[key].push_back(i);
  }

  DiscreteMeasure out;
  for (const auto& [key, members] : cellmap) {
    double w = 0.0;
    long double fsum = 0.0L;
    for (int i : members) {
      w += mu_ref.atoms[i].w;
      fsum += static_cast<long double>(mu_ref.atoms[i].w) * fv[i];
    }
    const long double favg = fsum / static_cast<long double>(w);
    int rep = -1;
    for (int i : members)
      if (static_cast<long double>(fv[i]) <= favg) {
        rep = i;
        break;
      }
    if (rep < 0) {
      // all-equal cells can round the mean a hair below the common value
      rep = *std::min_element(members.begin(), members.end(),
                              [&](int a, int b) { return fv[a] < fv[b]; });
    }
    out.atoms.push_back({w, mu_ref.atoms[rep].z});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Annulus decomposition
// ---------------------------------------------------------------------------

std::vector<std::pair<double, DiscreteMeasure>> annulus_decompose(
    const DiscreteMeasure& mu0, const std::vector<double>& radii, double gamma) {
  mu0.validate();
  require(!radii.empty(), Errc::DimensionMismatch, "need at least one radius");
  for (std::size_t j = 1; j < radii.size(); ++j)
    require(radii[j] > radii[j - 1], Errc::DimensionMismatch, "radii must increase strictly");

  const int nr = static_cast<int>(radii.size());
  std::vector<std::vector<int>> bucket(nr);
  for (int i = 0; i < mu0.size(); ++i) {
    const double r = h_norm(mu0.atoms[i].z, gamma);
    int j = 0;
    while (j < nr && r > radii[j]) ++j;
    require(j < nr, Errc::UncoveredAtoms,
            "atom " + std::to_string(i) + " outside the final radius");
    bucket[j].push_back(i);
  }

  std::vector<std::pair<double, DiscreteMeasure>> parts;
  for (int j = 0; j < nr; ++j) {
    if (bucket[j].empty()) continue;
    double wj = 0.0;
    for (int i : bucket[j]) wj += mu0.atoms[i].w;
    DiscreteMeasure comp;
    for (int i : bucket[j]) comp.atoms.push_back({mu0.atoms[i].w / wj, mu0.atoms[i].z});
    parts.emplace_back(wj, std::move(comp));
  }
  return parts;
}

DiscreteMeasure mixture(const std::vector<std::pair<double, DiscreteMeasure>>& parts) {
  DiscreteMeasure out;
  for (const auto& [wj, comp] : parts)
    for (const Atom& a : comp.atoms) out.atoms.push_back({wj * a.w, a.z});
  return out;
}

// ---------------------------------------------------------------------------
// Tightness
// ---------------------------------------------------------------------------

double tightness_radius(const std::vector<DiscreteMeasure>& measures, double eps,
                        double gamma) {
  require(eps > 0.0 && eps < 1.0, Errc::DimensionMismatch, "eps must be in (0,1)");
  double needed = 0.0;
  for (const DiscreteMeasure& m : measures) {
    std::vector<std::pair<double, double>> rw;  // (|z|_H^2, w)
    rw.reserve(m.atoms.size());
    for (const Atom& a : m.atoms) rw.emplace_back(h_norm_sq(a.z, gamma), a.w);
    std::sort(rw.begin(), rw.end());
    double cum = 0.0;
    double r = 0.0;
    for (const auto& [r2, w] : rw) {
      cum += w;
      r = r2;
      if (cum >= 1.0 - eps) break;
    }
    needed = std::max(needed, r);
  }
  if (needed <= 0.0) return 0.0;
  // round up on the documented geometric grid
  constexpr double base = 1e-12, ratio = 1.05;
  if (needed <= base) return base;
  const double k = std::ceil(std::log(needed / base) / std::log(ratio) - 1e-12);
  return base * std::pow(ratio, k);
}

// ---------------------------------------------------------------------------
// Sample measures
// ---------------------------------------------------------------------------

DiscreteMeasure dirac_measure(const PhaseVector& z) {
  DiscreteMeasure m;
  m.atoms.push_back({1.0, z});
  return m;
}

DiscreteMeasure gaussian_empirical(std::uint64_t seed, int count, double scale, int n_u,
                                   int n_t, double gamma) {
  require(count >= 1, Errc::DimensionMismatch, "count must be >= 1");
  Rng rng(seed);
  const double sg = std::sqrt(gamma);
  DiscreteMeasure m;
  for (int i = 0; i < count; ++i) {
    PhaseVector z;
    z.a.resize(n_u);
    z.b.resize(n_t);
    // isotropic in the H embedding
    for (int j = 0; j < n_u; ++j) z.a(j) = scale * rng.normal();
    for (int j = 0; j < n_t; ++j) z.b(j) = scale * rng.normal() / sg;
    m.atoms.push_back({1.0 / count, z});
  }
  return m;
}

}  // namespace benstat
