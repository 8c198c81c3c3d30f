#include "benstat/basis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "benstat/errors.hpp"

namespace benstat {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kTwoPi = 2.0 * kPi;
}  // namespace

// ---------------------------------------------------------------------------
// HorizontalTable
// ---------------------------------------------------------------------------

HorizontalTable::HorizontalTable(const Grid& grid, int Kh) : Kh_(Kh) {
  require(Kh >= 0, Errc::QuadratureFailure, "Kh must be nonnegative");
  // Pair products have wavenumber sums up to 2Kh; the uniform horizontal
  // rule integrates them exactly only below the aliasing limit.
  require(grid.n1 >= 2 * Kh + 1 && grid.n2 >= 2 * Kh + 1, Errc::QuadratureFailure,
          "horizontal grid too coarse for Kh");

  std::vector<std::pair<int, int>> waves;
  for (int k1 = 0; k1 <= Kh; ++k1) {
    const int lo = (k1 == 0) ? 0 : -Kh;
    for (int k2 = lo; k2 <= Kh; ++k2) waves.emplace_back(k1, k2);
  }

  for (auto [k1, k2] : waves) {
    const double alpha = kTwoPi * k1 / grid.L1;
    const double beta = kTwoPi * k2 / grid.L2;
    const int base = static_cast<int>(funcs_.size());
    if (k1 == 0 && k2 == 0) {
      funcs_.push_back({k1, k2, Parity::Cos, alpha, beta, -1});
    } else {
      funcs_.push_back({k1, k2, Parity::Cos, alpha, beta, base + 1});
      funcs_.push_back({k1, k2, Parity::Sin, alpha, beta, base});
    }
  }

  values_.resize(funcs_.size());
  const long nh = static_cast<long>(grid.n1) * grid.n2;
  for (std::size_t id = 0; id < funcs_.size(); ++id) {
    const Func& f = funcs_[id];
    Eigen::VectorXd v(nh);
    for (int i1 = 0; i1 < grid.n1; ++i1)
      for (int i2 = 0; i2 < grid.n2; ++i2) {
        const double w = f.alpha * grid.x1(i1) + f.beta * grid.x2(i2);
        v(static_cast<long>(i1) * grid.n2 + i2) =
            (f.par == Parity::Cos) ? std::cos(w) : std::sin(w);
      }
    values_[id] = std::move(v);
  }
}

int HorizontalTable::find(int k1, int k2, Parity par) const {
  for (int id = 0; id < size(); ++id) {
    const Func& f = funcs_[id];
    if (f.k1 == k1 && f.k2 == k2 && f.par == par) return id;
  }
  return -1;
}

double HorizontalTable::pair_integral(int id_a, int id_b, double L1, double L2) const {
  if (id_a != id_b) return 0.0;  // distinct family members are orthogonal
  const Func& f = funcs_[id_a];
  return (f.k1 == 0 && f.k2 == 0) ? L1 * L2 : 0.5 * L1 * L2;
}

// ---------------------------------------------------------------------------
// Temperature basis
// ---------------------------------------------------------------------------

long temp_mode_count(int Kh, int Mv) {
  const long n = 2L * Kh + 1;
  return static_cast<long>(Mv) * n * n;
}

TempBasis build_temperature_basis(const ValidatedParameters& p, int Kh, int Mv) {
  require(Kh >= 0, Errc::BadModeCount, "Kh must be >= 0");
  require(Mv >= 1, Errc::BadModeCount, "Mv must be >= 1");

  TempBasis basis;
  basis.L1 = p.L1();
  basis.L2 = p.L2();
  basis.h = p.h();
  basis.Kh = Kh;
  basis.Mv = Mv;

  for (int k1 = 0; k1 <= Kh; ++k1) {
    const int lo = (k1 == 0) ? 0 : -Kh;
    for (int k2 = lo; k2 <= Kh; ++k2)
      for (int m = 1; m <= Mv; ++m) {
        const double a = kTwoPi * k1 / p.L1();
        const double b = kTwoPi * k2 / p.L2();
        const double mz = m * kPi / p.h();
        const double ev = a * a + b * b + mz * mz;
        const double hor = (k1 == 0 && k2 == 0) ? p.L1() * p.L2() : 0.5 * p.L1() * p.L2();
        const double nc = 1.0 / std::sqrt(hor * 0.5 * p.h());
        basis.modes.push_back({k1, k2, Parity::Cos, m, ev, nc});
        if (!(k1 == 0 && k2 == 0))
          basis.modes.push_back({k1, k2, Parity::Sin, m, ev, nc});
      }
  }

  std::stable_sort(basis.modes.begin(), basis.modes.end(),
                   [](const TempMode& x, const TempMode& y) {
                     return std::tuple(x.eigenvalue, x.k1, x.k2, x.m, x.par == Parity::Sin) <
                            std::tuple(y.eigenvalue, y.k1, y.k2, y.m, y.par == Parity::Sin);
                   });

  require(static_cast<long>(basis.modes.size()) == temp_mode_count(Kh, Mv),
          Errc::BadModeCount, "temperature mode enumeration defect");
  return basis;
}

Eigen::VectorXd TempBasis::eigenvalues() const {
  Eigen::VectorXd ev(size());
  for (int i = 0; i < size(); ++i) ev(i) = modes[i].eigenvalue;
  return ev;
}

Eigen::VectorXd TempBasis::profile(int i, const Eigen::VectorXd& z) const {
  const TempMode& m = modes[i];
  Eigen::VectorXd v(z.size());
  for (int j = 0; j < z.size(); ++j) v(j) = m.norm_c * std::sin(m.m * kPi * z(j) / h);
  return v;
}

Eigen::VectorXd TempBasis::dprofile(int i, const Eigen::VectorXd& z) const {
  const TempMode& m = modes[i];
  const double f = m.m * kPi / h;
  Eigen::VectorXd v(z.size());
  for (int j = 0; j < z.size(); ++j) v(j) = m.norm_c * f * std::cos(f * z(j));
  return v;
}

// ---------------------------------------------------------------------------
// Finite-difference vertical operators
// ---------------------------------------------------------------------------

Eigen::MatrixXd derivative_matrix(const Eigen::VectorXd& z) {
  const int n = static_cast<int>(z.size());
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
  auto stencil = [&](int row, int j0, int j1, int j2) {
    // First derivative at z[row] from values at three nodes; exact on
    // quadratics for arbitrary spacing.
    const double x0 = z(j0) - z(row), x1 = z(j1) - z(row), x2 = z(j2) - z(row);
    D(row, j0) = (x1 + x2) / ((x0 - x1) * (x0 - x2));
    D(row, j1) = (x0 + x2) / ((x1 - x0) * (x1 - x2));
    D(row, j2) = (x0 + x1) / ((x2 - x0) * (x2 - x1));
  };
  stencil(0, 0, 1, 2);
  for (int j = 1; j + 1 < n; ++j) stencil(j, j - 1, j, j + 1);
  stencil(n - 1, n - 3, n - 2, n - 1);
  return D;
}

Eigen::MatrixXd second_derivative_matrix(const Eigen::VectorXd& z) {
  const int n = static_cast<int>(z.size());
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
  auto stencil = [&](int row, int j0, int j1, int j2) {
    const double x0 = z(j0) - z(row), x1 = z(j1) - z(row), x2 = z(j2) - z(row);
    D(row, j0) = 2.0 / ((x0 - x1) * (x0 - x2));
    D(row, j1) = 2.0 / ((x1 - x0) * (x1 - x2));
    D(row, j2) = 2.0 / ((x2 - x0) * (x2 - x1));
  };
  stencil(0, 0, 1, 2);
  for (int j = 1; j + 1 < n; ++j) stencil(j, j - 1, j, j + 1);
  stencil(n - 1, n - 3, n - 2, n - 1);
  return D;
}

// ---------------------------------------------------------------------------
// Velocity basis
// ---------------------------------------------------------------------------

namespace {

struct Candidate {
  double rayleigh;
  int type_rank;  // 0 shear, 1 toroidal, 2 poloidal
  int k1, k2;
  int par;  // 0 cos, 1 sin
  int pol;
  int branch;
  Eigen::VectorXd profile;  // psi (shear/toroidal) or phi (poloidal), full nodes

  bool operator<(const Candidate& o) const {
    return std::tuple(rayleigh, type_rank, k1, k2, par, pol, branch) <
           std::tuple(o.rayleigh, o.type_rank, o.k1, o.k2, o.par, o.pol, o.branch);
  }
};

// Canonical eigenvector sign: the first entry of largest magnitude positive.
void canonicalize_sign(Eigen::VectorXd& v) {
  int imax = 0;
  for (int i = 1; i < v.size(); ++i)
    if (std::abs(v(i)) > std::abs(v(imax))) imax = i;
  if (v(imax) < 0.0) v = -v;
}

// Structural L2 inner product of two velocity modes: horizontal factors are
// integrated exactly, vertical profiles by the grid's quadrature weights.
double sep_l2_inner(const VelMode& x, const VelMode& y, const HorizontalTable& table,
                    const Eigen::VectorXd& wz, double L1, double L2) {
  double s = 0.0;
  for (int c = 0; c < 3; ++c) {
    if (x.comp[c].zero() || y.comp[c].zero()) continue;
    const double hor = table.pair_integral(x.comp[c].hfunc, y.comp[c].hfunc, L1, L2);
    if (hor == 0.0) continue;
    s += hor * x.comp[c].profile.dot(wz.cwiseProduct(y.comp[c].profile));
  }
  return s;
}

}  // namespace

VelBasis build_velocity_basis(const ValidatedParameters& p, const Grid& grid, int Kh,
                              int n_modes) {
  require(n_modes >= 1, Errc::BadModeCount, "n_modes must be >= 1");
  require(grid.vertical_intervals() >= 16, Errc::ResolutionTooLow, "M3 must be >= 16");
  require(grid.n1 >= 2 * Kh + 1 && grid.n2 >= 2 * Kh + 1, Errc::QuadratureFailure,
          "horizontal grid too coarse for Kh");

  const int nz = grid.nz;
  const int M = nz - 1;
  const Eigen::VectorXd& z = grid.z;
  const Eigen::VectorXd& wz = grid.wz;
  const Eigen::MatrixXd Dz = derivative_matrix(z);
  const Eigen::MatrixXd W = wz.asDiagonal();

  HorizontalTable table(grid, Kh);

  // Compact difference images for the 1D quadratic forms: cell slopes with
  // cell-length weights for |psi'|^2 (no even/odd decoupling, unlike the
  // wide central stencil) and interior second differences for |phi''|^2.
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(M, nz);
  Eigen::VectorXd Wc(M);
  for (int j = 0; j < M; ++j) {
    const double dz = z(j + 1) - z(j);
    G(j, j) = -1.0 / dz;
    G(j, j + 1) = 1.0 / dz;
    Wc(j) = dz;
  }
  const Eigen::MatrixXd D2full = second_derivative_matrix(z);
  const Eigen::MatrixXd D2i = D2full.middleRows(1, M - 1);
  const Eigen::VectorXd Wi = wz.segment(1, M - 1);

  // Dirichlet embedding: interior values -> full node vector.
  Eigen::MatrixXd Ed = Eigen::MatrixXd::Zero(nz, M - 1);
  for (int j = 1; j < M; ++j) Ed(j, j - 1) = 1.0;

  // Clamped embedding: additionally ties the first/last interior values so
  // the one-sided derivative rows of Dz vanish at both walls.
  require(M >= 6, Errc::ResolutionTooLow, "clamped eigenproblem needs M >= 6");
  Eigen::MatrixXd Ec = Eigen::MatrixXd::Zero(nz, M - 3);
  const double c_lo = -Dz(0, 2) / Dz(0, 1);
  const double c_hi = -Dz(nz - 1, nz - 3) / Dz(nz - 1, nz - 2);
  Ec(1, 0) = c_lo;
  for (int j = 2; j <= M - 2; ++j) Ec(j, j - 2) = 1.0;
  Ec(nz - 2, M - 4) = c_hi;

  auto sym = [](const Eigen::MatrixXd& A) { return 0.5 * (A + A.transpose()); };

  // Quadratic forms assembled from difference images; symmetric positive
  // (semi)definite by construction.
  auto dirichlet_eig = [&](double k2abs) {
    const Eigen::MatrixXd P0 = Ed;
    const Eigen::MatrixXd P1 = G * Ed;
    const Eigen::MatrixXd A = sym(P1.transpose() * Wc.asDiagonal() * P1 +
                                  k2abs * P0.transpose() * W * P0);
    const Eigen::MatrixXd B = sym(P0.transpose() * W * P0);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, B);
    require(es.info() == Eigen::Success, Errc::SolverFailure, "Dirichlet 1D eigenproblem");
    return es;
  };

  auto clamped_eig = [&](double k2abs) {
    const Eigen::MatrixXd P0 = Ec;
    const Eigen::MatrixXd P1 = G * Ec;
    const Eigen::MatrixXd P2 = D2i * Ec;
    const Eigen::MatrixXd A = sym(P2.transpose() * Wi.asDiagonal() * P2 / k2abs +
                                  2.0 * P1.transpose() * Wc.asDiagonal() * P1 +
                                  k2abs * P0.transpose() * W * P0);
    const Eigen::MatrixXd B =
        sym(P0.transpose() * W * P0 + P1.transpose() * Wc.asDiagonal() * P1 / k2abs);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, B);
    require(es.info() == Eigen::Success, Errc::SolverFailure, "clamped 1D eigenproblem");
    return es;
  };

  std::vector<Candidate> cands;
  auto take = [&](Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd>& es,
                  const Eigen::MatrixXd& embed, int type_rank, int k1, int k2) {
    const int nev = static_cast<int>(es.eigenvalues().size());
    const int keep = std::min(nev, n_modes);
    for (int b = 0; b < keep; ++b) {
      Eigen::VectorXd full = embed * es.eigenvectors().col(b);
      canonicalize_sign(full);
      const double ev = es.eigenvalues()(b);
      if (type_rank == 0) {
        cands.push_back({ev, 0, 0, 0, 0, 0, b, full});
        cands.push_back({ev, 0, 0, 0, 0, 1, b, full});
      } else {
        cands.push_back({ev, type_rank, k1, k2, 0, 0, b, full});
        cands.push_back({ev, type_rank, k1, k2, 1, 0, b, full});
      }
    }
  };

  {
    auto es = dirichlet_eig(0.0);
    take(es, Ed, 0, 0, 0);
  }
  for (int k1 = 0; k1 <= Kh; ++k1) {
    const int lo = (k1 == 0) ? 1 : -Kh;
    for (int k2 = lo; k2 <= Kh; ++k2) {
      const double a = kTwoPi * k1 / p.L1();
      const double b = kTwoPi * k2 / p.L2();
      const double k2abs = a * a + b * b;
      auto est = dirichlet_eig(k2abs);
      take(est, Ed, 1, k1, k2);
      auto esp = clamped_eig(k2abs);
      take(esp, Ec, 2, k1, k2);
    }
  }

  require(static_cast<int>(cands.size()) >= n_modes, Errc::BadModeCount,
          "candidate pool smaller than n_modes; increase Kh or M3");
  std::sort(cands.begin(), cands.end());
  cands.resize(n_modes);

  VelBasis basis;
  basis.Kh = Kh;
  basis.z = z;
  basis.Dz = Dz;

  for (const Candidate& c : cands) {
    VelMode m;
    m.k1 = c.k1;
    m.k2 = c.k2;
    m.par = c.par == 0 ? Parity::Cos : Parity::Sin;
    m.pol = c.pol;
    m.branch = c.branch;
    m.rayleigh = c.rayleigh;
    if (c.type_rank == 0) {
      m.type = VelModeType::Shear;
      const int id = table.find(0, 0, Parity::Cos);
      m.comp[c.pol] = {id, c.profile};
    } else if (c.type_rank == 1) {
      m.type = VelModeType::Toroidal;
      const int id = table.find(c.k1, c.k2, m.par);
      const double a = kTwoPi * c.k1 / p.L1();
      const double b = kTwoPi * c.k2 / p.L2();
      const double kn = std::sqrt(a * a + b * b);
      m.comp[0] = {id, (-b / kn) * c.profile};
      m.comp[1] = {id, (a / kn) * c.profile};
    } else {
      m.type = VelModeType::Poloidal;
      const double a = kTwoPi * c.k1 / p.L1();
      const double b = kTwoPi * c.k2 / p.L2();
      const double k2abs = a * a + b * b;
      const Eigen::VectorXd g = Dz * c.profile;
      const int id3 = table.find(c.k1, c.k2, m.par);
      const int idh = table.func(id3).partner;
      // u3 = phi cos -> u_h = -(g/|k|^2)(alpha,beta) sin, and the sign flips
      // for the sine variant.
      const double sgn = (m.par == Parity::Cos) ? -1.0 : 1.0;
      m.comp[0] = {idh, (sgn * a / k2abs) * g};
      m.comp[1] = {idh, (sgn * b / k2abs) * g};
      m.comp[2] = {id3, c.profile};
    }
    basis.modes.push_back(std::move(m));
  }

  // Normalize, then modified Gram-Schmidt in the discrete L2 inner product.
  // Cross terms vanish structurally for distinct families, so this mostly
  // rescales; it also absorbs roundoff between equal-eigenvalue branches.
  auto normalize = [&](VelMode& m) {
    const double n2 = sep_l2_inner(m, m, table, wz, p.L1(), p.L2());
    require(n2 > 0.0, Errc::SolverFailure, "degenerate velocity mode");
    const double s = 1.0 / std::sqrt(n2);
    for (auto& c : m.comp)
      if (!c.zero()) c.profile *= s;
  };
  for (int i = 0; i < basis.size(); ++i) {
    VelMode& mi = basis.modes[i];
    normalize(mi);
    for (int j = 0; j < i; ++j) {
      const VelMode& mj = basis.modes[j];
      const double proj = sep_l2_inner(mi, mj, table, wz, p.L1(), p.L2());
      if (proj == 0.0) continue;
      for (int c = 0; c < 3; ++c) {
        if (mj.comp[c].zero()) continue;
        if (mi.comp[c].zero()) {
          mi.comp[c] = {mj.comp[c].hfunc, -proj * mj.comp[c].profile};
        } else {
          require(mi.comp[c].hfunc == mj.comp[c].hfunc, Errc::SolverFailure,
                  "mixed horizontal factors in Gram-Schmidt");
          mi.comp[c].profile -= proj * mj.comp[c].profile;
        }
      }
    }
    normalize(mi);
  }

  // Residual diagnostics: fields are L2-unit, so compare against the profile
  // sup as the mode scale.
  double worst_div = 0.0, worst_bnd = 0.0;
  for (const VelMode& m : basis.modes) {
    worst_div = std::max(worst_div, divergence_residual(m, table, Dz));
    worst_bnd = std::max(worst_bnd, boundary_residual(m));
  }
  basis.div_residual = worst_div;
  basis.boundary_residual = worst_bnd;
  require(worst_div < 1e-8, Errc::ResolutionTooLow, "divergence residual above tolerance");
  require(worst_bnd < 1e-10, Errc::ResolutionTooLow, "wall residual above tolerance");

  // Stiffness and Gram by grid quadrature (separable factorization of the
  // same rule; the full-grid kernels reproduce these to roundoff).
  const int n = basis.size();
  basis.S1.resize(n, n);
  basis.gram.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      const VelMode& mi = basis.modes[i];
      const VelMode& mj = basis.modes[j];
      basis.gram(i, j) = basis.gram(j, i) = sep_l2_inner(mi, mj, table, wz, p.L1(), p.L2());
      double s = 0.0;
      for (int c = 0; c < 3; ++c) {
        if (mi.comp[c].zero() || mj.comp[c].zero()) continue;
        for (int dir = 1; dir <= 3; ++dir) {
          const SepComp di = differentiate_sep(mi.comp[c], dir, table, Dz);
          const SepComp dj = differentiate_sep(mj.comp[c], dir, table, Dz);
          if (di.zero() || dj.zero()) continue;
          const double hor = table.pair_integral(di.hfunc, dj.hfunc, p.L1(), p.L2());
          if (hor == 0.0) continue;
          s += hor * di.profile.dot(wz.cwiseProduct(dj.profile));
        }
      }
      basis.S1(i, j) = basis.S1(j, i) = s;
    }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(basis.S1);
  require(es.info() == Eigen::Success, Errc::SolverFailure, "S1 eigendecomposition");
  basis.lambda1 = es.eigenvalues()(0);
  require(basis.lambda1 > 0.0, Errc::SolverFailure, "S1 not positive definite");
  return basis;
}

// ---------------------------------------------------------------------------
// Evaluation helpers
// ---------------------------------------------------------------------------

Eigen::VectorXd evaluate_sep(const SepComp& c, const HorizontalTable& table,
                             const Grid& grid) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(grid.npoints());
  if (c.zero()) return out;
  const Eigen::VectorXd& hv = table.values(c.hfunc);
  const long nh = hv.size();
  for (long hidx = 0; hidx < nh; ++hidx)
    out.segment(hidx * grid.nz, grid.nz) = hv(hidx) * c.profile;
  return out;
}

SepComp differentiate_sep(const SepComp& c, int dir, const HorizontalTable& table,
                          const Eigen::MatrixXd& Dz) {
  if (c.zero()) return {};
  if (dir == 3) return {c.hfunc, Dz * c.profile};
  const int partner = table.func(c.hfunc).partner;
  if (partner < 0) return {};
  return {partner, table.dfactor(c.hfunc, dir) * c.profile};
}

SepComp temp_sep(const TempBasis& basis, int i, const HorizontalTable& table,
                 const Eigen::VectorXd& z) {
  const TempMode& m = basis.modes[i];
  const int id = table.find(m.k1, m.k2, m.par);
  require(id >= 0, Errc::DimensionMismatch, "temperature wavevector outside table");
  return {id, basis.profile(i, z)};
}

double divergence_residual(const VelMode& m, const HorizontalTable& table,
                           const Eigen::MatrixXd& Dz) {
  std::map<int, Eigen::VectorXd> terms;
  double scale = 0.0;
  for (int c = 0; c < 3; ++c) {
    if (m.comp[c].zero()) continue;
    scale = std::max(scale, m.comp[c].profile.cwiseAbs().maxCoeff());
    const SepComp d = differentiate_sep(m.comp[c], c + 1, table, Dz);
    if (d.zero()) continue;
    auto it = terms.find(d.hfunc);
    if (it == terms.end())
      terms.emplace(d.hfunc, d.profile);
    else
      it->second += d.profile;
  }
  double res = 0.0;
  for (const auto& [id, prof] : terms) res += prof.cwiseAbs().maxCoeff();
  return scale > 0.0 ? res / scale : res;
}

double boundary_residual(const VelMode& m) {
  double res = 0.0, scale = 0.0;
  for (const auto& c : m.comp) {
    if (c.zero()) continue;
    scale = std::max(scale, c.profile.cwiseAbs().maxCoeff());
    res = std::max(res, std::abs(c.profile(0)));
    res = std::max(res, std::abs(c.profile(c.profile.size() - 1)));
  }
  return scale > 0.0 ? res / scale : res;
}

}  // namespace benstat
