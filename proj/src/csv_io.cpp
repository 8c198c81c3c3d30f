#include "benstat/csv_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "benstat/errors.hpp"

namespace benstat {

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> split_doubles(const std::string& line) {
  std::vector<double> out;
  std::istringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(std::stod(cell));
  return out;
}

}  // namespace

void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          bool with_coeffs, int stride) {
  require(stride >= 1, Errc::IoError, "stride must be >= 1");
  std::ofstream out(path);
  require(out.good(), Errc::IoError, "cannot open " + path);
  const int nu = static_cast<int>(traj.samples.front().a.size());
  const int nt = static_cast<int>(traj.samples.front().b.size());
  out << "# benstat-trajectory t0=" << g17(traj.t0) << " dt=" << g17(traj.dt)
      << " steps=" << traj.steps() << " stride=" << stride << " nu=" << nu << " nt=" << nt
      << " coeffs=" << (with_coeffs ? 1 : 0) << "\n";
  out << "t,h2,v2";
  if (with_coeffs) {
    for (int i = 0; i < nu; ++i) out << ",a" << i;
    for (int i = 0; i < nt; ++i) out << ",b" << i;
  }
  out << "\n";
  for (int n = 0; n <= traj.steps(); n += stride) {
    out << g17(traj.time(n)) << "," << g17(traj.h2(n)) << "," << g17(traj.v2(n));
    if (with_coeffs) {
      for (int i = 0; i < nu; ++i) out << "," << g17(traj.samples[n].a(i));
      for (int i = 0; i < nt; ++i) out << "," << g17(traj.samples[n].b(i));
    }
    out << "\n";
  }
  require(out.good(), Errc::IoError, "write failed for " + path);
}

Trajectory read_trajectory_csv(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), Errc::IoError, "cannot open " + path);
  std::string line;
  require(std::getline(in, line) && line.rfind("# benstat-trajectory", 0) == 0, Errc::IoError,
          path + ": not a trajectory CSV");
  int nu = -1, nt = -1, coeffs = 0, stride = 1;
  double t0 = 0.0, dt = 0.0;
  {
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) continue;
      const std::string k = tok.substr(0, eq), v = tok.substr(eq + 1);
      if (k == "t0") t0 = std::stod(v);
      if (k == "dt") dt = std::stod(v);
      if (k == "stride") stride = std::stoi(v);
      if (k == "nu") nu = std::stoi(v);
      if (k == "nt") nt = std::stoi(v);
      if (k == "coeffs") coeffs = std::stoi(v);
    }
  }
  require(nu >= 0 && nt >= 0 && dt > 0.0, Errc::IoError, path + ": bad trajectory header");
  require(coeffs == 1, Errc::IoError, path + ": coefficients required to rebuild a trajectory");
  require(static_cast<bool>(std::getline(in, line)), Errc::IoError,
          path + ": missing column header");

  Trajectory traj;
  traj.t0 = t0;
  traj.dt = dt * stride;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<double> row = split_doubles(line);
    require(static_cast<int>(row.size()) == 3 + nu + nt, Errc::IoError,
            path + ": bad row width");
    PhaseVector z;
    z.a = Eigen::Map<const Eigen::VectorXd>(row.data() + 3, nu);
    z.b = Eigen::Map<const Eigen::VectorXd>(row.data() + 3 + nu, nt);
    traj.samples.push_back(std::move(z));
  }
  require(traj.samples.size() >= 2, Errc::IoError, path + ": too few samples");
  return traj;
}

void rebuild_norm_caches(Trajectory& traj, const OperatorSet& ops, double gamma) {
  const int n = static_cast<int>(traj.samples.size());
  traj.h2.resize(n);
  traj.v2.resize(n);
  for (int i = 0; i < n; ++i) {
    traj.h2(i) = h_norm_sq(traj.samples[i], gamma);
    traj.v2(i) = v_norm_sq(traj.samples[i], ops.S1, ops.S2, gamma);
  }
}

void write_measure_csv(const std::string& path, const DiscreteMeasure& m) {
  std::ofstream out(path);
  require(out.good(), Errc::IoError, "cannot open " + path);
  const int nu = static_cast<int>(m.atoms.front().z.a.size());
  const int nt = static_cast<int>(m.atoms.front().z.b.size());
  out << "# benstat-measure atoms=" << m.size() << " nu=" << nu << " nt=" << nt << "\n";
  for (const Atom& a : m.atoms) {
    out << g17(a.w);
    for (int i = 0; i < nu; ++i) out << "," << g17(a.z.a(i));
    for (int i = 0; i < nt; ++i) out << "," << g17(a.z.b(i));
    out << "\n";
  }
  require(out.good(), Errc::IoError, "write failed for " + path);
}

DiscreteMeasure read_measure_csv(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), Errc::IoError, "cannot open " + path);
  std::string line;
  require(std::getline(in, line) && line.rfind("# benstat-measure", 0) == 0, Errc::IoError,
          path + ": not a measure CSV");
  int nu = -1, nt = -1;
  {
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) continue;
      if (tok.substr(0, eq) == "nu") nu = std::stoi(tok.substr(eq + 1));
      if (tok.substr(0, eq) == "nt") nt = std::stoi(tok.substr(eq + 1));
    }
  }
  require(nu >= 0 && nt >= 0, Errc::IoError, path + ": bad measure header");
  DiscreteMeasure m;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<double> row = split_doubles(line);
    require(static_cast<int>(row.size()) == 1 + nu + nt, Errc::IoError, path + ": bad row");
    Atom a;
    a.w = row[0];
    a.z.a = Eigen::Map<const Eigen::VectorXd>(row.data() + 1, nu);
    a.z.b = Eigen::Map<const Eigen::VectorXd>(row.data() + 1 + nu, nt);
    m.atoms.push_back(std::move(a));
  }
  m.validate();
  return m;
}

}  // namespace benstat
