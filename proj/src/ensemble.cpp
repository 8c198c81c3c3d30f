#include "benstat/ensemble.hpp"

#include <algorithm>
#include <cmath>

#include "benstat/errors.hpp"

namespace benstat {

TrajectoryEnsemble lift_measure(const DiscreteMeasure& mu0, const OperatorSet& ops,
                                const ValidatedParameters& p, double horizon, double dt,
                                StepScheme scheme, Exec exec) {
  mu0.validate();
  const int n = mu0.size();
  TrajectoryEnsemble ens;
  ens.weights.resize(n);
  ens.trajs.resize(n);
  std::vector<std::string> errors(n);
  parallel_for(n, exec, [&](long i) {
    ens.weights(i) = mu0.atoms[i].w;
    try {
      ens.trajs[i] = integrate(ops, p, mu0.atoms[i].z, 0.0, horizon, dt, scheme,
                               Exec::Serial);
    } catch (const Error& e) {
      errors[i] = e.what();
    }
  });
  for (int i = 0; i < n; ++i)
    require(errors[i].empty(), Errc::NonFiniteState,
            "atom " + std::to_string(i) + ": " + errors[i]);
  return ens;
}

DiscreteMeasure pushforward_at(const TrajectoryEnsemble& ens, double t) {
  DiscreteMeasure m;
  const int idx = ens.trajs.front().index_of(t);
  for (int i = 0; i < ens.size(); ++i)
    m.atoms.push_back({ens.weights(i), ens.trajs[i].samples[idx]});
  return m;
}

double v_functional(const Trajectory& traj, double t) {
  const int n = traj.index_of(t);
  require(n >= 0, Errc::TimeOffGrid, "t before t0");
  if (n == 0) return traj.h2(0);
  double acc = 0.0;
  for (int j = 0; j < n; ++j) acc += 0.5 * traj.dt * (traj.h2(j) + traj.h2(j + 1));
  return acc / (n * traj.dt);
}

double galerkin_v(const Trajectory& traj, double t, int k, double gamma) {
  const int nu = static_cast<int>(traj.samples.front().a.size());
  const int nt = static_cast<int>(traj.samples.front().b.size());
  require(k >= 1 && k <= std::max(nu, nt), Errc::BadModeCount, "mode count k");
  const int ku = std::min(k, nu), kt = std::min(k, nt);
  auto trunc_h2 = [&](const PhaseVector& z) {
    return z.a.head(ku).squaredNorm() + gamma * z.b.head(kt).squaredNorm();
  };
  const int n = traj.index_of(t);
  if (n == 0) return trunc_h2(traj.samples[0]);
  double acc = 0.0;
  for (int j = 0; j < n; ++j)
    acc += 0.5 * traj.dt * (trunc_h2(traj.samples[j]) + trunc_h2(traj.samples[j + 1]));
  return acc / (n * traj.dt);
}

// ---------------------------------------------------------------------------
// Tolerance calibration on the linear configuration
// ---------------------------------------------------------------------------

Calibration calibrate_tolerances(const OperatorSet& ops, const ValidatedParameters& p,
                                 const DerivedConstants& consts, double dt) {
  OperatorSet lin = ops;
  std::fill(lin.Tuu.raw().begin(), lin.Tuu.raw().end(), 0.0);
  std::fill(lin.Tut.raw().begin(), lin.Tut.raw().end(), 0.0);
  lin.C.setZero();
  lin.D.setZero();
  lin.f_const.setZero();
  lin.g_bg.setZero();

  // Deterministic initial state at the absorbing scale, spread over modes.
  PhaseVector z0 = PhaseVector::zero(ops.n_u(), ops.n_t());
  for (int i = 0; i < ops.n_u(); ++i) z0.a(i) = 1.0 / (1.0 + i);
  for (int i = 0; i < ops.n_t(); ++i) z0.b(i) = 1.0 / (2.0 + i);
  const double s = std::sqrt(consts.R0 / h_norm_sq(z0, p.gamma()));
  z0.a *= s;
  z0.b *= s;

  const int steps = 128;
  Trajectory traj = integrate(lin, p, z0, 0.0, steps * dt, dt, StepScheme::Cnab2);

  // Closed form of the decoupled system in the S1 eigenbasis.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ops.S1);
  require(es.info() == Eigen::Success, Errc::SolverFailure, "S1 eigendecomposition");
  const Eigen::VectorXd lam = es.eigenvalues();
  const Eigen::VectorXd a0 = es.eigenvectors().transpose() * z0.a;
  double worst_energy = 0.0;
  for (int n = 0; n <= steps; ++n) {
    const double t = n * dt;
    double exact = 0.0;
    for (int i = 0; i < lam.size(); ++i)
      exact += std::exp(-2.0 * p.nu() * lam(i) * t) * a0(i) * a0(i);
    for (int i = 0; i < ops.n_t(); ++i)
      exact += p.gamma() * std::exp(-2.0 * p.kappa() * ops.S2(i) * t) * z0.b(i) * z0.b(i);
    worst_energy = std::max(worst_energy, std::abs(traj.h2(n) - exact));
  }

  const EstimateReport en = check_energy_inequalities(traj, lin, p, 1.0);
  double worst_slack = 0.0;
  for (const auto& c : en.checks) worst_slack = std::max(worst_slack, c.worst_abs);

  const WeakResidual wr = weak_residual(traj, lin, p);
  double fmax = 0.0;
  for (const auto& zs : traj.samples)
    fmax = std::max(fmax, h_norm(rhs(lin, p, zs, Exec::Serial), p.gamma()));

  Calibration cal;
  cal.dt = dt;
  cal.c_energy = std::max({1.0, worst_energy / (dt * dt * consts.R0), worst_slack / (dt * dt)});
  cal.c_resid = std::max(1.0, wr.max / (dt * dt * std::max(fmax, 1e-30)));
  return cal;
}

// ---------------------------------------------------------------------------
// Hypothesis checks
// ---------------------------------------------------------------------------

HConditionsReport check_h_conditions(const TrajectoryEnsemble& ens,
                                     const DerivedConstants& consts,
                                     const ValidatedParameters& p, const OperatorSet& ops,
                                     const Calibration& cal) {
  HConditionsReport rep;
  const int S = ens.steps();
  const double dt = ens.dt();
  double h2max = consts.R0;
  for (const Trajectory& tr : ens.trajs) h2max = std::max(h2max, tr.h2.maxCoeff());
  rep.tol_dt = 10.0 * cal.c_energy * dt * dt * h2max;

  // (a) right continuity at t0, on dyadic windows W, W/2, W/4, ... >= 2 steps:
  // |z(t)-z(t0)|_H^2 <= (max |dz/dt|_H * (t-t0))^2 with the rate measured on
  // the window itself.
  rep.worst_rc_ratio = 0.0;
  for (const Trajectory& tr : ens.trajs) {
    int w = std::min(S, std::max(2, S / 2));
    while (w >= 2) {
      double rate = 0.0;
      for (int n2 = 0; n2 <= w; ++n2)
        rate = std::max(rate, h_norm(rhs(ops, p, tr.samples[n2], Exec::Serial), p.gamma()));
      for (int n2 = 1; n2 <= w; ++n2) {
        const double drift = h_norm_sq(tr.samples[n2] - tr.samples[0], p.gamma());
        const double bound = 1.1 * rate * rate * (n2 * dt) * (n2 * dt) + rep.tol_dt;
        rep.worst_rc_ratio = std::max(rep.worst_rc_ratio, drift / bound);
      }
      w /= 2;
    }
  }
  rep.rc_pass = rep.worst_rc_ratio <= 1.0;

  // (b) uniform V-drift line with the derived constant Kb.
  rep.kb_slack = std::numeric_limits<double>::infinity();
  for (int n = 1; n <= S; ++n) {
    const double t = ens.t0() + n * dt;
    double sup_drift = -std::numeric_limits<double>::infinity();
    for (const Trajectory& tr : ens.trajs)
      sup_drift = std::max(sup_drift, v_functional(tr, t) - tr.h2(0));
    const double line = consts.Kb * (n * dt) + rep.tol_dt;
    const double scale = std::max({h2max, consts.Kb * (n * dt), 1e-30});
    rep.kb_slack = std::min(rep.kb_slack, (line - sup_drift) / scale);
  }
  if (!std::isfinite(rep.kb_slack)) rep.kb_slack = 0.0;
  rep.kb_pass = rep.kb_slack >= 0.0;

  // (c) bounded-ensemble envelope: trajectories from B_H(R) stay inside the
  // exponential bound's level max(R, R0).
  double r_init = 0.0;
  for (const Trajectory& tr : ens.trajs) r_init = std::max(r_init, tr.h2(0));
  const double level = std::max(r_init, consts.R0);
  double excess = 0.0;
  for (const Trajectory& tr : ens.trajs)
    excess = std::max(excess, (tr.h2.maxCoeff() - level) / level);
  rep.envelope_excess = excess;
  rep.envelope_pass = excess <= 10.0 * cal.c_energy * dt * dt;
  return rep;
}

StatSolutionReport verify_statistical_solution(const TrajectoryEnsemble& ens,
                                               const DiscreteMeasure& mu0,
                                               const DerivedConstants& consts,
                                               const ValidatedParameters& p,
                                               const OperatorSet& ops,
                                               const TestFunctionalSuite& suite) {
  require(ens.size() == mu0.size(), Errc::DimensionMismatch,
          "ensemble was not lifted from this measure");
  StatSolutionReport rep;
  rep.suite_seed = suite.seed();
  rep.cal = calibrate_tolerances(ops, p, consts, ens.dt());
  const double dt = ens.dt();

  // Initial condition: atom-by-atom and through the functional metric.
  const DiscreteMeasure push0 = pushforward_at(ens, ens.t0());
  for (int i = 0; i < ens.size(); ++i) {
    const double werr = std::abs(push0.atoms[i].w - mu0.atoms[i].w);
    const double zerr = h_norm(push0.atoms[i].z - mu0.atoms[i].z, p.gamma());
    rep.init_atom_error = std::max({rep.init_atom_error, werr, zerr});
  }
  rep.init_suite_error = suite_distance(suite, push0, mu0);

  // Carrier: every trajectory is a solution in the checkable sense.
  rep.carrier_all_pass = true;
  for (int i = 0; i < ens.size(); ++i) {
    const Trajectory& tr = ens.trajs[i];
    CarrierCheck cc;
    cc.atom = i;
    const WeakResidual wr = weak_residual(tr, ops, p);
    double fmax = 0.0;
    for (const auto& zs : tr.samples)
      fmax = std::max(fmax, h_norm(rhs(ops, p, zs, Exec::Serial), p.gamma()));
    cc.weak_resid = wr.max;
    cc.resid_tol = 10.0 * rep.cal.c_resid * dt * dt * std::max(fmax, 1e-30);
    const EstimateReport en =
        check_energy_inequalities(tr, ops, p, 10.0 * rep.cal.c_energy);
    cc.energy_pass = en.all_pass();
    cc.pass = cc.energy_pass && cc.weak_resid <= cc.resid_tol;
    rep.carrier_all_pass = rep.carrier_all_pass && cc.pass;
    rep.carrier.push_back(cc);
  }

  // Mean energy against the averaged exponential envelope.
  const double rate = consts.eta * consts.lambda0;
  rep.mean_energy_slack = std::numeric_limits<double>::infinity();
  double scale0 = consts.R0;
  for (int i = 0; i < ens.size(); ++i) scale0 = std::max(scale0, ens.trajs[i].h2(0));
  for (int n = 0; n <= ens.steps(); ++n) {
    const double decay = std::exp(-rate * n * dt);
    double mean = 0.0, envelope = 0.0;
    for (int i = 0; i < ens.size(); ++i) {
      mean += ens.weights(i) * ens.trajs[i].h2(n);
      envelope += ens.weights(i) *
                  (ens.trajs[i].h2(0) * decay + consts.R0 * (1.0 - decay));
    }
    const double slack =
        (envelope + 10.0 * rep.cal.c_energy * dt * dt * scale0 - mean) / scale0;
    rep.mean_energy_slack = std::min(rep.mean_energy_slack, slack);
  }
  rep.mean_energy_pass = rep.mean_energy_slack >= 0.0;

  // Tightness envelope across all pushforward times.
  std::vector<DiscreteMeasure> pushes;
  const int stride = std::max(1, ens.steps() / 64);
  for (int n = 0; n <= ens.steps(); n += stride)
    pushes.push_back(pushforward_at(ens, ens.t0() + n * dt));
  rep.tightness_radius_all = tightness_radius(pushes, 1e-3, p.gamma());
  rep.tightness_bound = std::max(scale0, consts.R0) *
                        (1.0 + 10.0 * rep.cal.c_energy * dt * dt) * 1.05;
  rep.tightness_pass = rep.tightness_radius_all <= rep.tightness_bound;

  rep.h = check_h_conditions(ens, consts, p, ops, rep.cal);
  return rep;
}

}  // namespace benstat
