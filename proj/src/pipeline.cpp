#include "benstat/pipeline.hpp"

#include <cmath>
#include <filesystem>

#include "benstat/cache_io.hpp"
#include "benstat/csv_io.hpp"
#include "benstat/errors.hpp"
#include "benstat/rng.hpp"

namespace benstat {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;
}

System build_system(const RunConfig& cfg, Exec exec) {
  System sys;
  sys.cfg = cfg;
  sys.hash = cfg.hash();

  // Bootstrap validation with the analytic temperature eigenvalue.
  const double lambda2_analytic = kPi * kPi / (cfg.phys.h * cfg.phys.h);
  Parameters boot = cfg.phys;
  if (cfg.auto_norms) {
    const NormProposal prop = propose_gamma_epsilon(boot, lambda2_analytic);
    boot.gamma = prop.gamma;
    boot.epsilon = prop.epsilon;
  }
  const ValidatedParameters vp_boot = validate_parameters(boot, lambda2_analytic);

  sys.grid = quadrature_grid(vp_boot, cfg.N1, cfg.N2, cfg.N3, cfg.layout);
  sys.vel = build_velocity_basis(vp_boot, sys.grid, cfg.Kh, cfg.n_modes);
  sys.temp = build_temperature_basis(vp_boot, cfg.Kh, cfg.Mv);

  // Final validation against the discrete smallest eigenvalue.
  const double lambda0 = std::min(sys.vel.lambda1, sys.temp.lambda2());
  Parameters fin = cfg.phys;
  if (cfg.auto_norms) {
    const NormProposal prop = propose_gamma_epsilon(fin, lambda0);
    fin.gamma = prop.gamma;
    fin.epsilon = prop.epsilon;
    if (cfg.layout == VerticalLayout::StripRefined &&
        fin.epsilon != vp_boot.epsilon()) {
      // the strip-refined grid depends on epsilon; rebuild on the final value
      sys.vp = validate_parameters(fin, lambda0);
      sys.grid = quadrature_grid(*sys.vp, cfg.N1, cfg.N2, cfg.N3, cfg.layout);
      sys.vel = build_velocity_basis(*sys.vp, sys.grid, cfg.Kh, cfg.n_modes);
    }
  }
  if (!sys.vp) sys.vp = validate_parameters(fin, lambda0);

  require(sys.grid.nodes_in_strip(sys.vp->epsilon()) >= 8, Errc::StripUnderresolved,
          "final epsilon leaves fewer than 8 vertical nodes in the strip");

  sys.ops = assemble_operators(sys.vel, sys.temp, sys.grid, *sys.vp, exec);
  sys.consts = derived_constants(*sys.vp, sys.vel.lambda1, sys.temp.lambda2());
  return sys;
}

System build_system_cached(const RunConfig& cfg, const std::string& dir, Exec exec) {
  namespace fs = std::filesystem;
  const std::string bpath = (fs::path(dir) / "cache_bases.bsc").string();
  const std::string opath = (fs::path(dir) / "cache_operators.bsc").string();
  const std::uint64_t want = cfg.hash();

  if (fs::exists(bpath) && fs::exists(opath)) {
    try {
      System sys;
      sys.cfg = cfg;
      sys.hash = want;
      auto [vel, temp] = load_bases(bpath, want);
      sys.vel = std::move(vel);
      sys.temp = std::move(temp);
      sys.ops = load_operators(opath, want);

      const double lambda2_analytic = kPi * kPi / (cfg.phys.h * cfg.phys.h);
      Parameters fin = cfg.phys;
      const double lambda0 = std::min(sys.vel.lambda1, sys.temp.lambda2());
      if (cfg.auto_norms) {
        const NormProposal prop = propose_gamma_epsilon(fin, lambda0);
        fin.gamma = prop.gamma;
        fin.epsilon = prop.epsilon;
      }
      sys.vp = validate_parameters(fin, lambda0);
      sys.grid = quadrature_grid(*sys.vp, cfg.N1, cfg.N2, cfg.N3, cfg.layout);
      (void)lambda2_analytic;
      require(sys.vel.z.size() == sys.grid.z.size() && sys.vel.z == sys.grid.z,
              Errc::IoError, "cached basis grid mismatch");
      sys.consts = derived_constants(*sys.vp, sys.vel.lambda1, sys.temp.lambda2());
      return sys;
    } catch (const Error&) {
      // stale or mismatched cache: fall through to a rebuild
    }
  }

  System sys = build_system(cfg, exec);
  fs::create_directories(dir);
  save_bases(bpath, sys.vel, sys.temp, want);
  save_operators(opath, sys.ops, want);
  return sys;
}

DiscreteMeasure initial_measure(const RunConfig& cfg, const System& sys) {
  const int nu = sys.vel.size();
  const int nt = sys.temp.size();
  if (cfg.init_type == "dirac") {
    PhaseVector z = PhaseVector::zero(nu, nt);
    if (cfg.dirac_h2 > 0.0) {
      Rng rng(cfg.seed);
      for (int i = 0; i < nu; ++i) z.a(i) = rng.normal();
      for (int i = 0; i < nt; ++i) z.b(i) = rng.normal();
      const double s = std::sqrt(cfg.dirac_h2 / h_norm_sq(z, sys.params().gamma()));
      z.a *= s;
      z.b *= s;
    }
    return dirac_measure(z);
  }
  if (cfg.init_type == "gaussian-empirical")
    return gaussian_empirical(cfg.seed, cfg.count, cfg.scale, nu, nt, sys.params().gamma());
  require(!cfg.init_file.empty(), Errc::ConfigError, "ensemble.file required for init=file");
  DiscreteMeasure m = read_measure_csv(cfg.init_file);
  for (const Atom& a : m.atoms)
    require(a.z.a.size() == nu && a.z.b.size() == nt, Errc::DimensionMismatch,
            "measure file has wrong coefficient counts");
  return m;
}

DiscreteMeasure prepared_measure(const RunConfig& cfg, const System& sys,
                                 const DiscreteMeasure& mu_ref) {
  if (cfg.choquet_depth <= 0) return mu_ref;
  const double gamma = sys.params().gamma();
  double radius = 0.0;
  for (const Atom& a : mu_ref.atoms) radius = std::max(radius, h_norm(a.z, gamma));
  PartitionSpec spec;
  spec.depth = cfg.choquet_depth;
  const Functional v0 = [gamma](const PhaseVector& z) { return h_norm_sq(z, gamma); };
  return choquet_approximate(mu_ref, radius * (1.0 + 1e-9) + 1e-30, spec, v0, gamma);
}

}  // namespace benstat
