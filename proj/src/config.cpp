#include "benstat/config.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "benstat/errors.hpp"

namespace benstat {

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct KvStore {
  std::map<std::string, std::string> kv;  // "section.key" -> value
  std::set<std::string> consumed;

  bool has(const std::string& k) const { return kv.count(k) > 0; }

  std::string take(const std::string& k, const std::string& fallback) {
    consumed.insert(k);
    auto it = kv.find(k);
    return it == kv.end() ? fallback : it->second;
  }
  double take_d(const std::string& k, double fallback) {
    const std::string v = take(k, g17(fallback));
    try {
      return std::stod(v);
    } catch (...) {
      fail(Errc::ConfigError, k + ": bad number '" + v + "'");
    }
  }
  long take_l(const std::string& k, long fallback) {
    const std::string v = take(k, std::to_string(fallback));
    try {
      return std::stol(v);
    } catch (...) {
      fail(Errc::ConfigError, k + ": bad integer '" + v + "'");
    }
  }
  void finish() const {
    for (const auto& [k, v] : kv)
      require(consumed.count(k) > 0, Errc::ConfigError, "unknown config key: " + k);
  }
};

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  KvStore store;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      require(line.back() == ']', Errc::ConfigError,
              "line " + std::to_string(lineno) + ": bad section header");
      section = line.substr(1, line.size() - 2);
      continue;
    }
    const auto eq = line.find('=');
    require(eq != std::string::npos, Errc::ConfigError,
            "line " + std::to_string(lineno) + ": expected key = value");
    require(!section.empty(), Errc::ConfigError,
            "line " + std::to_string(lineno) + ": key outside any section");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    const std::string full = section + "." + key;
    require(store.kv.count(full) == 0, Errc::ConfigError, "duplicate key " + full);
    store.kv[full] = val;
  }

  RunConfig c;
  c.phys.nu = store.take_d("physics.nu", c.phys.nu);
  c.phys.kappa = store.take_d("physics.kappa", c.phys.kappa);
  c.phys.g = store.take_d("physics.g", c.phys.g);
  c.phys.alpha = store.take_d("physics.alpha", c.phys.alpha);
  c.phys.T0 = store.take_d("physics.T0", c.phys.T0);
  c.phys.T1 = store.take_d("physics.T1", c.phys.T1);
  c.phys.h = store.take_d("physics.h", c.phys.h);
  c.phys.L1 = store.take_d("physics.L1", c.phys.L1);
  c.phys.L2 = store.take_d("physics.L2", c.phys.L2);

  const std::string gam = store.take("norms.gamma", "auto");
  const std::string eps = store.take("norms.epsilon", "auto");
  if (gam == "auto" || eps == "auto") {
    require(gam == "auto" && eps == "auto", Errc::ConfigError,
            "norms.gamma and norms.epsilon must both be auto or both explicit");
    c.auto_norms = true;
  } else {
    c.auto_norms = false;
    c.phys.gamma = std::stod(gam);
    c.phys.epsilon = std::stod(eps);
  }

  c.Kh = static_cast<int>(store.take_l("discretization.Kh", c.Kh));
  c.Mv = static_cast<int>(store.take_l("discretization.Mv", c.Mv));
  c.n_modes = static_cast<int>(store.take_l("discretization.n_modes", c.n_modes));
  c.N1 = static_cast<int>(store.take_l("discretization.N1", c.N1));
  c.N2 = static_cast<int>(store.take_l("discretization.N2", c.N2));
  c.N3 = static_cast<int>(store.take_l("discretization.N3", c.N3));
  const std::string lay = store.take("discretization.vertical", "uniform");
  if (lay == "uniform")
    c.layout = VerticalLayout::Uniform;
  else if (lay == "strip-refined")
    c.layout = VerticalLayout::StripRefined;
  else
    fail(Errc::ConfigError, "discretization.vertical: unknown layout " + lay);

  c.t0 = store.take_d("time.t0", c.t0);
  c.horizon = store.take_d("time.horizon", c.horizon);
  c.dt = store.take_d("time.dt", c.dt);
  const std::string sch = store.take("time.scheme", "cnab2");
  if (sch == "cnab2")
    c.scheme = StepScheme::Cnab2;
  else if (sch == "backward-euler")
    c.scheme = StepScheme::BackwardEuler;
  else
    fail(Errc::ConfigError, "time.scheme: unknown scheme " + sch);

  c.init_type = store.take("ensemble.init", c.init_type);
  require(c.init_type == "dirac" || c.init_type == "gaussian-empirical" ||
              c.init_type == "file",
          Errc::ConfigError, "ensemble.init: unknown initial measure " + c.init_type);
  c.seed = static_cast<std::uint64_t>(store.take_l("ensemble.seed", static_cast<long>(c.seed)));
  c.count = static_cast<int>(store.take_l("ensemble.count", c.count));
  c.scale = store.take_d("ensemble.scale", c.scale);
  c.dirac_h2 = store.take_d("ensemble.dirac_h2", c.dirac_h2);
  c.init_file = store.take("ensemble.file", "");
  c.choquet_depth = static_cast<int>(store.take_l("ensemble.choquet_depth", c.choquet_depth));
  const std::string radii = store.take("ensemble.annulus_radii", "");
  if (!radii.empty()) {
    std::istringstream rs(radii);
    std::string cell;
    while (std::getline(rs, cell, ',')) c.annulus_radii.push_back(std::stod(trim(cell)));
  }

  c.out_dir = store.take("output.dir", c.out_dir);
  c.stride = static_cast<int>(store.take_l("output.stride", c.stride));
  c.write_coeffs = store.take_l("output.write_coeffs", 1) != 0;

  store.finish();
  return c;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), Errc::ConfigError, "cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string RunConfig::canonical() const {
  std::ostringstream o;
  o << "[physics]\n";
  o << "nu = " << g17(phys.nu) << "\nkappa = " << g17(phys.kappa) << "\ng = " << g17(phys.g)
    << "\nalpha = " << g17(phys.alpha) << "\nT0 = " << g17(phys.T0) << "\nT1 = " << g17(phys.T1)
    << "\nh = " << g17(phys.h) << "\nL1 = " << g17(phys.L1) << "\nL2 = " << g17(phys.L2) << "\n";
  o << "[norms]\n";
  if (auto_norms)
    o << "gamma = auto\nepsilon = auto\n";
  else
    o << "gamma = " << g17(phys.gamma) << "\nepsilon = " << g17(phys.epsilon) << "\n";
  o << "[discretization]\n";
  o << "Kh = " << Kh << "\nMv = " << Mv << "\nn_modes = " << n_modes << "\nN1 = " << N1
    << "\nN2 = " << N2 << "\nN3 = " << N3 << "\nvertical = "
    << (layout == VerticalLayout::Uniform ? "uniform" : "strip-refined") << "\n";
  o << "[time]\n";
  o << "t0 = " << g17(t0) << "\nhorizon = " << g17(horizon) << "\ndt = " << g17(dt)
    << "\nscheme = " << (scheme == StepScheme::Cnab2 ? "cnab2" : "backward-euler") << "\n";
  o << "[ensemble]\n";
  o << "init = " << init_type << "\nseed = " << seed << "\ncount = " << count
    << "\nscale = " << g17(scale) << "\ndirac_h2 = " << g17(dirac_h2) << "\nfile = " << init_file
    << "\nchoquet_depth = " << choquet_depth << "\nannulus_radii =";
  for (std::size_t i = 0; i < annulus_radii.size(); ++i)
    o << (i ? "," : " ") << g17(annulus_radii[i]);
  o << "\n[output]\n";
  o << "stride = " << stride << "\nwrite_coeffs = " << (write_coeffs ? 1 : 0) << "\n";
  return o.str();
}

std::uint64_t RunConfig::hash() const { return fnv1a64(canonical()); }

}  // namespace benstat
