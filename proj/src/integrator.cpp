#include "benstat/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "benstat/errors.hpp"

namespace benstat {

int Trajectory::index_of(double t) const {
  const double x = (t - t0) / dt;
  const long n = std::lround(x);
  require(n >= 0 && n <= steps() && std::abs(x - n) <= 1e-9 * std::max(1.0, std::abs(x)),
          Errc::TimeOffGrid, "t=" + std::to_string(t) + " is not a grid time");
  return static_cast<int>(n);
}

namespace {

// Velocity solve for (I + c dt nu S1); temperature block is diagonal.
struct ImplicitSolve {
  Eigen::LLT<Eigen::MatrixXd> llt;
  Eigen::VectorXd tdiag_inv;

  ImplicitSolve(const OperatorSet& ops, const ValidatedParameters& p, double cdt) {
    const int nu = ops.n_u();
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(nu, nu) + cdt * p.nu() * ops.S1;
    llt.compute(A);
    require(llt.info() == Eigen::Success, Errc::SolverFailure, "implicit velocity factorization");
    tdiag_inv = (1.0 + cdt * p.kappa() * ops.S2.array()).inverse().matrix();
  }

  PhaseVector solve(const PhaseVector& r) const {
    return {llt.solve(r.a), tdiag_inv.cwiseProduct(r.b)};
  }
};

PhaseVector apply_stiff(const OperatorSet& ops, const ValidatedParameters& p,
                        const PhaseVector& z) {
  return {p.nu() * (ops.S1 * z.a), p.kappa() * ops.S2.cwiseProduct(z.b)};
}

void check_finite(const PhaseVector& z, int step) {
  require(z.finite(), Errc::NonFiniteState,
          "state blew up at step " + std::to_string(step));
}

}  // namespace

PhaseVector step_imex(const OperatorSet& ops, const ValidatedParameters& p,
                      const PhaseVector& z, double dt, StepScheme scheme, Exec exec) {
  require(dt > 0.0, Errc::DimensionMismatch, "dt must be positive");
  if (scheme == StepScheme::BackwardEuler) {
    const ImplicitSolve solve(ops, p, dt);
    PhaseVector r = z + explicit_rhs(ops, p, z, exec) * dt;
    PhaseVector out = solve.solve(r);
    check_finite(out, 0);
    return out;
  }
  // Self-starting second-order step: Crank-Nicolson on the stiffness, Heun
  // (predict with N(z), correct with the average) on the explicit part.
  const ImplicitSolve solve(ops, p, 0.5 * dt);
  const PhaseVector az = apply_stiff(ops, p, z);
  const PhaseVector n0 = explicit_rhs(ops, p, z, exec);
  const PhaseVector base = z - az * (0.5 * dt);
  const PhaseVector pred = solve.solve(base + n0 * dt);
  const PhaseVector n1 = explicit_rhs(ops, p, pred, exec);
  PhaseVector out = solve.solve(base + (n0 + n1) * (0.5 * dt));
  check_finite(out, 0);
  return out;
}

Trajectory integrate(const OperatorSet& ops, const ValidatedParameters& p,
                     const PhaseVector& z0, double t0, double t_end, double dt,
                     StepScheme scheme, Exec exec) {
  require(dt > 0.0 && t_end > t0, Errc::DimensionMismatch, "empty time interval");
  const double x = (t_end - t0) / dt;
  const long steps = std::lround(x);
  require(steps >= 1 && std::abs(x - steps) <= 1e-9 * x, Errc::TimeOffGrid,
          "(t_end - t0)/dt must be an integer");
  require(z0.a.size() == ops.n_u() && z0.b.size() == ops.n_t(), Errc::DimensionMismatch,
          "initial state size");

  Trajectory traj;
  traj.t0 = t0;
  traj.dt = dt;
  traj.samples.reserve(steps + 1);
  traj.samples.push_back(z0);
  check_finite(z0, 0);

  if (scheme == StepScheme::BackwardEuler) {
    const ImplicitSolve solve(ops, p, dt);
    for (long n = 0; n < steps; ++n) {
      const PhaseVector& z = traj.samples.back();
      PhaseVector out = solve.solve(z + explicit_rhs(ops, p, z, exec) * dt);
      check_finite(out, static_cast<int>(n + 1));
      traj.samples.push_back(std::move(out));
    }
  } else {
    const ImplicitSolve solve(ops, p, 0.5 * dt);
    PhaseVector n_prev = explicit_rhs(ops, p, z0, exec);
    {
      const PhaseVector base = z0 - apply_stiff(ops, p, z0) * (0.5 * dt);
      const PhaseVector pred = solve.solve(base + n_prev * dt);
      const PhaseVector n1 = explicit_rhs(ops, p, pred, exec);
      PhaseVector out = solve.solve(base + (n_prev + n1) * (0.5 * dt));
      check_finite(out, 1);
      traj.samples.push_back(std::move(out));
    }
    for (long n = 1; n < steps; ++n) {
      const PhaseVector& z = traj.samples.back();
      const PhaseVector n_cur = explicit_rhs(ops, p, z, exec);
      const PhaseVector base = z - apply_stiff(ops, p, z) * (0.5 * dt);
      PhaseVector out = solve.solve(base + n_cur * (1.5 * dt) - n_prev * (0.5 * dt));
      check_finite(out, static_cast<int>(n + 1));
      traj.samples.push_back(std::move(out));
      n_prev = n_cur;
    }
  }

  traj.h2.resize(steps + 1);
  traj.v2.resize(steps + 1);
  for (long n = 0; n <= steps; ++n) {
    traj.h2(n) = h_norm_sq(traj.samples[n], p.gamma());
    traj.v2(n) = v_norm_sq(traj.samples[n], ops.S1, ops.S2, p.gamma());
  }
  return traj;
}

// ---------------------------------------------------------------------------
// Inequality checks
// ---------------------------------------------------------------------------

const CheckResult* EstimateReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

std::vector<int> start_indices(int steps) {
  std::vector<int> out;
  if (steps <= 512) {
    out.resize(steps);
    for (int i = 0; i < steps; ++i) out[i] = i;
    return out;
  }
  out.push_back(0);
  for (int j = 1; j < steps; j *= 2) out.push_back(j);
  for (int i = 1; i <= 16; ++i) out.push_back(static_cast<int>(steps * (i / 17.0)));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

Eigen::VectorXd prefix_trapezoid(const Eigen::VectorXd& f, double dt) {
  Eigen::VectorXd P(f.size());
  P(0) = 0.0;
  for (long n = 1; n < f.size(); ++n) P(n) = P(n - 1) + 0.5 * dt * (f(n - 1) + f(n));
  return P;
}

// Second-difference curvature |e''| of a sampled series, used as the local
// error estimate of both the trapezoid rule and the second-order stepper:
// the Euler-Maclaurin remainder over [t',t] is (dt^2/12)(e''-type boundary
// terms) plus an accumulated O(dt^2 * span * mean curvature) drift.
struct Curvature {
  Eigen::VectorXd cu;      // per-sample curvature
  Eigen::VectorXd prefix;  // prefix sums of cu for window means

  explicit Curvature(const Eigen::VectorXd& e, double dt) {
    const long n = e.size();
    cu.resize(n);
    for (long j = 1; j + 1 < n; ++j)
      cu(j) = std::abs(e(j + 1) - 2.0 * e(j) + e(j - 1)) / (dt * dt);
    cu(0) = n > 2 ? cu(1) : 0.0;
    cu(n - 1) = n > 2 ? cu(n - 2) : 0.0;
    prefix.resize(n + 1);
    prefix(0) = 0.0;
    for (long j = 0; j < n; ++j) prefix(j + 1) = prefix(j) + cu(j);
  }

  // local error estimate for a pair window, in energy units
  double local_error(int tp, int t, double dt) const {
    const double mean = (prefix(t + 1) - prefix(tp)) / (t - tp + 1);
    const double span = (t - tp) * dt;
    return dt * dt / 12.0 * (cu(tp) + cu(t) + mean * (1.0 + span));
  }
};

// Tracks the worst margin over visited pairs; tolerances vary per pair, so
// the reported slack/tolerance belong to the worst-margin pair.
struct PairScan {
  CheckResult result;
  double worst_margin = std::numeric_limits<double>::infinity();

  explicit PairScan(std::string name) { result.name = std::move(name); }

  void visit(int tp, int t, double slack, double tol, double scale) {
    const double s = std::max(scale, 1e-30);
    const double margin = (slack + tol) / s;
    if (margin < worst_margin) {
      worst_margin = margin;
      result.worst_slack = slack / s;
      result.tolerance = tol / s;
      result.at_from = tp;
      result.at_to = t;
    }
    result.worst_abs = std::max(result.worst_abs, std::abs(slack) / s);
  }

  CheckResult done() {
    result.pass = !std::isfinite(worst_margin) || worst_margin >= 0.0;
    return result;
  }
};

}  // namespace

EstimateReport check_energy_inequalities(const Trajectory& traj, const OperatorSet& ops,
                                         const ValidatedParameters& p, double tol_coef) {
  const int S = traj.steps();
  const double dt = traj.dt;
  Eigen::VectorXd eu(S + 1), et(S + 1), du(S + 1), dth(S + 1), wu(S + 1), wt(S + 1);
  for (int n = 0; n <= S; ++n) {
    const PhaseVector& z = traj.samples[n];
    eu(n) = 0.5 * z.a.squaredNorm();
    et(n) = 0.5 * z.b.squaredNorm();
    du(n) = p.nu() * z.a.dot(ops.S1 * z.a);
    dth(n) = p.kappa() * z.b.dot(ops.S2.cwiseProduct(z.b));
    // work terms of the evolution equation, per component (no gamma weight)
    wu(n) = p.g() * p.alpha() * z.a.dot(ops.C * z.b) + z.a.dot(ops.f_const);
    wt(n) = z.b.dot(ops.D.transpose() * z.a) + z.b.dot(ops.g_bg);
  }
  const Eigen::VectorXd Du = prefix_trapezoid(du, dt);
  const Eigen::VectorXd Dt = prefix_trapezoid(dth, dt);
  const Eigen::VectorXd Wu = prefix_trapezoid(wu, dt);
  const Eigen::VectorXd Wt = prefix_trapezoid(wt, dt);
  const Curvature cu(eu, dt), ct(et, dt);

  PairScan scan_u("energy-velocity");
  PairScan scan_t("energy-temperature");
  for (int tp : start_indices(S))
    for (int t = tp + 1; t <= S; ++t) {
      {
        const double lhs = eu(t) + (Du(t) - Du(tp));
        const double rhs_v = eu(tp) + (Wu(t) - Wu(tp));
        const double scale = std::max({eu(tp), eu(t), std::abs(Du(t) - Du(tp)),
                                       std::abs(Wu(t) - Wu(tp))});
        const double tol = tol_coef * cu.local_error(tp, t, dt) + 1e-13 * scale;
        scan_u.visit(tp, t, rhs_v - lhs, tol, scale);
      }
      {
        const double lhs = et(t) + (Dt(t) - Dt(tp));
        const double rhs_t = et(tp) + (Wt(t) - Wt(tp));
        const double scale = std::max({et(tp), et(t), std::abs(Dt(t) - Dt(tp)),
                                       std::abs(Wt(t) - Wt(tp))});
        const double tol = tol_coef * ct.local_error(tp, t, dt) + 1e-13 * scale;
        scan_t.visit(tp, t, rhs_t - lhs, tol, scale);
      }
    }

  EstimateReport rep;
  rep.checks.push_back(scan_u.done());
  rep.checks.push_back(scan_t.done());
  return rep;
}

DualNorm::DualNorm(const OperatorSet& ops, double gamma) : gamma_(gamma) {
  s1_.compute(ops.S1);
  require(s1_.info() == Eigen::Success, Errc::SolverFailure, "S1 factorization for dual norm");
  s2_ = ops.S2;
}

double DualNorm::norm_sq(const PhaseVector& h) const {
  const double fu = h.a.dot(s1_.solve(h.a));
  const double ft = h.b.dot(h.b.cwiseQuotient(s2_));
  return fu + gamma_ * ft;
}

EstimateReport check_apriori_bounds(const Trajectory& traj, const DerivedConstants& consts,
                                    const OperatorSet& ops, const ValidatedParameters& p,
                                    double tol_coef) {
  const int S = traj.steps();
  const double dt = traj.dt;
  const double rate = consts.eta * consts.lambda0;
  const double R0 = consts.R0;

  const Eigen::VectorXd Pv = prefix_trapezoid(traj.v2, dt);

  // ||dz/dt||_{V'}^{4/3} along the trajectory, via the evolution equation.
  const DualNorm dual(ops, p.gamma());
  Eigen::VectorXd d43(S + 1);
  for (int n = 0; n <= S; ++n) {
    const double nrm2 = dual.norm_sq(rhs(ops, p, traj.samples[n], Exec::Serial));
    d43(n) = std::pow(nrm2, 2.0 / 3.0);
  }
  const Eigen::VectorXd Pd = prefix_trapezoid(d43, dt);
  const Curvature ch(traj.h2, dt);

  PairScan scan39("apriori-exponential");
  PairScan scan40("apriori-vnorm-integral");
  const double nk = p.nu() * p.kappa();
  const double c1 = std::pow(nk, -0.375);
  const double c2 = std::pow(nk, 0.125) / std::pow(consts.lambda0, 1.5);
  const double c3 = std::pow(nk, 0.625) / std::sqrt(consts.lambda0);
  double c_fit = 0.0;

  for (int tp : start_indices(S))
    for (int t = tp + 1; t <= S; ++t) {
      const double span = (t - tp) * dt;
      const double lerr = tol_coef * ch.local_error(tp, t, dt);
      {
        const double decay = std::exp(-rate * span);
        const double rhs39 = traj.h2(tp) * decay + R0 * (1.0 - decay);
        const double scale = std::max({traj.h2(tp), traj.h2(t), R0});
        scan39.visit(tp, t, rhs39 - traj.h2(t), 1e-6 * scale + lerr, scale);
      }
      {
        const double lhs = Pv(t) - Pv(tp);
        const double rhs40 = traj.h2(tp) / consts.eta + 2.0 * consts.Kb / consts.eta * span;
        const double scale = std::max({lhs, rhs40});
        scan40.visit(tp, t, rhs40 - lhs, 1e-6 * scale + lerr, scale);
      }
      {
        const double lhs = std::pow(Pd(t) - Pd(tp), 0.75);
        const double den = c1 * traj.h2(tp) + c2 * span + c3;
        c_fit = std::max(c_fit, lhs / den);
      }
    }

  EstimateReport rep;
  rep.checks.push_back(scan39.done());
  rep.checks.push_back(scan40.done());

  // Absorbing-ball corollary: data starting at or inside the absorbing level
  // must stay inside it, up to the integrator's local error.
  if (traj.h2(0) <= R0 * (1.0 + 1e-12)) {
    PairScan scan_abs("absorbing-ball");
    for (int n = 1; n <= S; ++n)
      scan_abs.visit(0, n, R0 - traj.h2(n), tol_coef * ch.local_error(0, n, dt), R0);
    rep.checks.push_back(scan_abs.done());
  }

  rep.c_fit = c_fit;
  return rep;
}

}  // namespace benstat
