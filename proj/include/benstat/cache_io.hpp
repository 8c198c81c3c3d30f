#ifndef BENSTAT_CACHE_IO_HPP
#define BENSTAT_CACHE_IO_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "benstat/basis.hpp"
#include "benstat/kernels.hpp"
#include "benstat/operators.hpp"

namespace benstat {

// Self-describing cache container: a text header (schema version, kind,
// metadata, array directory) terminated by "end-header\n", followed by the
// raw little-endian 64-bit floats of each array in directory order.
// Round-trips are bit-exact.
class CacheWriter {
 public:
  explicit CacheWriter(std::string kind);
  void meta(const std::string& key, const std::string& value);
  void meta(const std::string& key, double v);
  void meta(const std::string& key, long v);
  void meta_hash(std::uint64_t h);
  void add(const std::string& name, const Eigen::VectorXd& v);
  void add(const std::string& name, const Eigen::MatrixXd& m);
  void add(const std::string& name, const Tensor3& t);
  void write(const std::string& path) const;

 private:
  std::string kind_;
  std::vector<std::pair<std::string, std::string>> meta_;
  struct Entry {
    std::string decl;
    std::vector<double> data;
  };
  std::vector<Entry> arrays_;
};

class CacheFile {
 public:
  static CacheFile read(const std::string& path);

  const std::string& kind() const { return kind_; }
  bool has_meta(const std::string& key) const { return meta_.count(key) > 0; }
  const std::string& meta(const std::string& key) const;
  double meta_double(const std::string& key) const;
  long meta_long(const std::string& key) const;
  std::uint64_t hash() const;

  Eigen::VectorXd vec(const std::string& name) const;
  Eigen::MatrixXd mat(const std::string& name) const;
  Tensor3 tensor3(const std::string& name) const;

 private:
  std::string kind_;
  std::map<std::string, std::string> meta_;
  struct Entry {
    std::string type;
    long d0 = 0, d1 = 0, d2 = 0;
    std::vector<double> data;
  };
  std::map<std::string, Entry> arrays_;
  const Entry& entry(const std::string& name, const std::string& type) const;
};

// Basis/operator cache files. The velocity cache stores the mode table,
// profiles, vertical operators and matrices; loading reproduces every array
// bit-exactly. config_hash guards against silent reuse across configs.
void save_bases(const std::string& path, const VelBasis& vel, const TempBasis& temp,
                std::uint64_t config_hash);
std::pair<VelBasis, TempBasis> load_bases(const std::string& path,
                                          std::uint64_t expect_hash);

void save_operators(const std::string& path, const OperatorSet& ops,
                    std::uint64_t config_hash);
OperatorSet load_operators(const std::string& path, std::uint64_t expect_hash);

}  // namespace benstat

#endif
