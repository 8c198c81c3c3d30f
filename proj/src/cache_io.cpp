#include "benstat/cache_io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "benstat/errors.hpp"

namespace benstat {

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

CacheWriter::CacheWriter(std::string kind) : kind_(std::move(kind)) {}

void CacheWriter::meta(const std::string& key, const std::string& value) {
  meta_.emplace_back(key, value);
}
void CacheWriter::meta(const std::string& key, double v) { meta_.emplace_back(key, fmt_double(v)); }
void CacheWriter::meta(const std::string& key, long v) { meta_.emplace_back(key, std::to_string(v)); }
void CacheWriter::meta_hash(std::uint64_t h) { meta_.emplace_back("config_hash", std::to_string(h)); }

void CacheWriter::add(const std::string& name, const Eigen::VectorXd& v) {
  Entry e;
  e.decl = "array " + name + " vec " + std::to_string(v.size());
  e.data.assign(v.data(), v.data() + v.size());
  arrays_.push_back(std::move(e));
}

void CacheWriter::add(const std::string& name, const Eigen::MatrixXd& m) {
  Entry e;
  e.decl = "array " + name + " mat " + std::to_string(m.rows()) + " " + std::to_string(m.cols());
  e.data.assign(m.data(), m.data() + m.size());  // column-major
  arrays_.push_back(std::move(e));
}

void CacheWriter::add(const std::string& name, const Tensor3& t) {
  Entry e;
  e.decl = "array " + name + " ten3 " + std::to_string(t.ni()) + " " + std::to_string(t.nj()) +
           " " + std::to_string(t.nk());
  e.data = t.raw();
  arrays_.push_back(std::move(e));
}

void CacheWriter::write(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), Errc::IoError, "cannot open " + path + " for writing");
  out << "benstat-cache 1\n";
  out << "kind = " << kind_ << "\n";
  out << "endian = little\n";
  for (const auto& [k, v] : meta_) out << k << " = " << v << "\n";
  for (const auto& e : arrays_) out << e.decl << "\n";
  out << "end-header\n";
  for (const auto& e : arrays_)
    out.write(reinterpret_cast<const char*>(e.data.data()),
              static_cast<std::streamsize>(e.data.size() * sizeof(double)));
  require(out.good(), Errc::IoError, "write failed for " + path);
}

CacheFile CacheFile::read(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), Errc::IoError, "cannot open " + path);
  std::string line;
  require(std::getline(in, line) && line == "benstat-cache 1", Errc::IoError,
          path + ": not a benstat cache");

  CacheFile f;
  std::vector<std::pair<std::string, Entry*>> order;
  std::vector<std::string> names;
  while (std::getline(in, line)) {
    if (line == "end-header") break;
    if (line.rfind("array ", 0) == 0) {
      std::istringstream ss(line);
      std::string tag, name, type;
      ss >> tag >> name >> type;
      Entry e;
      e.type = type;
      if (type == "vec") {
        ss >> e.d0;
      } else if (type == "mat") {
        ss >> e.d0 >> e.d1;
      } else if (type == "ten3") {
        ss >> e.d0 >> e.d1 >> e.d2;
      } else {
        fail(Errc::IoError, path + ": unknown array type " + type);
      }
      require(!ss.fail(), Errc::IoError, path + ": bad array declaration");
      f.arrays_[name] = std::move(e);
      names.push_back(name);
    } else {
      const auto eq = line.find(" = ");
      require(eq != std::string::npos, Errc::IoError, path + ": bad header line: " + line);
      f.meta_[line.substr(0, eq)] = line.substr(eq + 3);
    }
  }
  require(line == "end-header", Errc::IoError, path + ": truncated header");
  require(f.meta_.count("kind") > 0, Errc::IoError, path + ": missing kind");
  require(f.meta_["endian"] == "little", Errc::IoError, path + ": wrong endianness");
  f.kind_ = f.meta_["kind"];

  for (const std::string& name : names) {
    Entry& e = f.arrays_[name];
    long n = e.d0;
    if (e.type == "mat") n = e.d0 * e.d1;
    if (e.type == "ten3") n = e.d0 * e.d1 * e.d2;
    e.data.resize(n);
    in.read(reinterpret_cast<char*>(e.data.data()),
            static_cast<std::streamsize>(n * sizeof(double)));
    require(in.gcount() == static_cast<std::streamsize>(n * sizeof(double)), Errc::IoError,
            path + ": truncated array " + name);
  }
  return f;
}

const std::string& CacheFile::meta(const std::string& key) const {
  auto it = meta_.find(key);
  require(it != meta_.end(), Errc::IoError, "missing cache meta " + key);
  return it->second;
}
double CacheFile::meta_double(const std::string& key) const { return std::stod(meta(key)); }
long CacheFile::meta_long(const std::string& key) const { return std::stol(meta(key)); }
std::uint64_t CacheFile::hash() const { return std::stoull(meta("config_hash")); }

const CacheFile::Entry& CacheFile::entry(const std::string& name,
                                         const std::string& type) const {
  auto it = arrays_.find(name);
  require(it != arrays_.end(), Errc::IoError, "missing cache array " + name);
  require(it->second.type == type, Errc::IoError, "cache array " + name + " has wrong type");
  return it->second;
}

Eigen::VectorXd CacheFile::vec(const std::string& name) const {
  const Entry& e = entry(name, "vec");
  return Eigen::Map<const Eigen::VectorXd>(e.data.data(), e.d0);
}

Eigen::MatrixXd CacheFile::mat(const std::string& name) const {
  const Entry& e = entry(name, "mat");
  return Eigen::Map<const Eigen::MatrixXd>(e.data.data(), e.d0, e.d1);
}

Tensor3 CacheFile::tensor3(const std::string& name) const {
  const Entry& e = entry(name, "ten3");
  Tensor3 t(static_cast<int>(e.d0), static_cast<int>(e.d1), static_cast<int>(e.d2));
  t.raw() = e.data;
  return t;
}

// ---------------------------------------------------------------------------
// Basis and operator caches
// ---------------------------------------------------------------------------

void save_bases(const std::string& path, const VelBasis& vel, const TempBasis& temp,
                std::uint64_t config_hash) {
  CacheWriter w("bases");
  w.meta_hash(config_hash);
  w.meta("vel_Kh", static_cast<long>(vel.Kh));
  w.meta("vel_lambda1", vel.lambda1);
  w.meta("vel_div_residual", vel.div_residual);
  w.meta("vel_boundary_residual", vel.boundary_residual);
  w.meta("temp_Kh", static_cast<long>(temp.Kh));
  w.meta("temp_Mv", static_cast<long>(temp.Mv));
  w.meta("L1", temp.L1);
  w.meta("L2", temp.L2);
  w.meta("h", temp.h);

  const int nu = vel.size();
  const int nz = static_cast<int>(vel.z.size());
  Eigen::MatrixXd vmeta(nu, 7);
  Eigen::MatrixXd hfuncs(nu, 3);
  Eigen::MatrixXd profiles(nz, 3 * nu);
  profiles.setZero();
  for (int i = 0; i < nu; ++i) {
    const VelMode& m = vel.modes[i];
    vmeta.row(i) << static_cast<double>(m.type), m.k1, m.k2,
        (m.par == Parity::Sin ? 1.0 : 0.0), m.pol, m.branch, m.rayleigh;
    for (int c = 0; c < 3; ++c) {
      hfuncs(i, c) = m.comp[c].zero() ? -1.0 : m.comp[c].hfunc;
      if (!m.comp[c].zero()) profiles.col(3 * i + c) = m.comp[c].profile;
    }
  }
  w.add("vel_meta", vmeta);
  w.add("vel_hfuncs", hfuncs);
  w.add("vel_profiles", profiles);
  w.add("vel_S1", vel.S1);
  w.add("vel_gram", vel.gram);
  w.add("vel_z", vel.z);
  w.add("vel_Dz", vel.Dz);

  Eigen::MatrixXd tmeta(temp.size(), 6);
  for (int i = 0; i < temp.size(); ++i) {
    const TempMode& m = temp.modes[i];
    tmeta.row(i) << m.k1, m.k2, (m.par == Parity::Sin ? 1.0 : 0.0), m.m, m.eigenvalue,
        m.norm_c;
  }
  w.add("temp_meta", tmeta);
  w.write(path);
}

std::pair<VelBasis, TempBasis> load_bases(const std::string& path,
                                          std::uint64_t expect_hash) {
  const CacheFile f = CacheFile::read(path);
  require(f.kind() == "bases", Errc::IoError, path + ": not a bases cache");
  require(f.hash() == expect_hash, Errc::IoError,
          path + ": config hash mismatch; rebuild required");

  VelBasis vel;
  vel.Kh = static_cast<int>(f.meta_long("vel_Kh"));
  vel.lambda1 = f.meta_double("vel_lambda1");
  vel.div_residual = f.meta_double("vel_div_residual");
  vel.boundary_residual = f.meta_double("vel_boundary_residual");
  vel.S1 = f.mat("vel_S1");
  vel.gram = f.mat("vel_gram");
  vel.z = f.vec("vel_z");
  vel.Dz = f.mat("vel_Dz");
  const Eigen::MatrixXd vmeta = f.mat("vel_meta");
  const Eigen::MatrixXd hfuncs = f.mat("vel_hfuncs");
  const Eigen::MatrixXd profiles = f.mat("vel_profiles");
  for (int i = 0; i < vmeta.rows(); ++i) {
    VelMode m;
    m.type = static_cast<VelModeType>(static_cast<int>(vmeta(i, 0)));
    m.k1 = static_cast<int>(vmeta(i, 1));
    m.k2 = static_cast<int>(vmeta(i, 2));
    m.par = vmeta(i, 3) > 0.5 ? Parity::Sin : Parity::Cos;
    m.pol = static_cast<int>(vmeta(i, 4));
    m.branch = static_cast<int>(vmeta(i, 5));
    m.rayleigh = vmeta(i, 6);
    for (int c = 0; c < 3; ++c)
      if (hfuncs(i, c) >= 0.0)
        m.comp[c] = {static_cast<int>(hfuncs(i, c)), profiles.col(3 * i + c)};
    vel.modes.push_back(std::move(m));
  }

  TempBasis temp;
  temp.Kh = static_cast<int>(f.meta_long("temp_Kh"));
  temp.Mv = static_cast<int>(f.meta_long("temp_Mv"));
  temp.L1 = f.meta_double("L1");
  temp.L2 = f.meta_double("L2");
  temp.h = f.meta_double("h");
  const Eigen::MatrixXd tmeta = f.mat("temp_meta");
  for (int i = 0; i < tmeta.rows(); ++i) {
    TempMode m;
    m.k1 = static_cast<int>(tmeta(i, 0));
    m.k2 = static_cast<int>(tmeta(i, 1));
    m.par = tmeta(i, 2) > 0.5 ? Parity::Sin : Parity::Cos;
    m.m = static_cast<int>(tmeta(i, 3));
    m.eigenvalue = tmeta(i, 4);
    m.norm_c = tmeta(i, 5);
    temp.modes.push_back(m);
  }
  return {std::move(vel), std::move(temp)};
}

void save_operators(const std::string& path, const OperatorSet& ops,
                    std::uint64_t config_hash) {
  CacheWriter w("operators");
  w.meta_hash(config_hash);
  w.meta("gamma", ops.gamma);
  w.meta("raw_skew_uu", ops.raw_skew_uu);
  w.meta("raw_skew_ut", ops.raw_skew_ut);
  w.add("S1", ops.S1);
  w.add("S2", ops.S2);
  w.add("Tuu", ops.Tuu);
  w.add("Tut", ops.Tut);
  w.add("C", ops.C);
  w.add("D", ops.D);
  w.add("f_const", ops.f_const);
  w.add("g_bg", ops.g_bg);
  w.write(path);
}

OperatorSet load_operators(const std::string& path, std::uint64_t expect_hash) {
  const CacheFile f = CacheFile::read(path);
  require(f.kind() == "operators", Errc::IoError, path + ": not an operators cache");
  require(f.hash() == expect_hash, Errc::IoError,
          path + ": config hash mismatch; rebuild required");
  OperatorSet ops;
  ops.gamma = f.meta_double("gamma");
  ops.raw_skew_uu = f.meta_double("raw_skew_uu");
  ops.raw_skew_ut = f.meta_double("raw_skew_ut");
  ops.S1 = f.mat("S1");
  ops.S2 = f.vec("S2");
  ops.Tuu = f.tensor3("Tuu");
  ops.Tut = f.tensor3("Tut");
  ops.C = f.mat("C");
  ops.D = f.mat("D");
  ops.f_const = f.vec("f_const");
  ops.g_bg = f.vec("g_bg");
  return ops;
}

}  // namespace benstat
