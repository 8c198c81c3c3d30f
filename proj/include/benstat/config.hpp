#ifndef BENSTAT_CONFIG_HPP
#define BENSTAT_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "benstat/grid.hpp"
#include "benstat/integrator.hpp"
#include "benstat/params.hpp"

namespace benstat {

// Run configuration, parsed from an INI-style file with sections [physics],
// [norms], [discretization], [time], [ensemble], [output]. Unknown keys are
// rejected. The canonical serialization (fixed key order, %.17g floats)
// defines the config hash used to guard cache reuse.
struct RunConfig {
  // [physics]
  Parameters phys;

  // [norms] gamma/epsilon, or auto_norms to take the proposal helper
  bool auto_norms = true;

  // [discretization]
  int Kh = 1;
  int Mv = 2;
  int n_modes = 12;
  int N1 = 8, N2 = 8, N3 = 48;
  VerticalLayout layout = VerticalLayout::Uniform;

  // [time]
  double t0 = 0.0;
  double horizon = 1.0;
  double dt = 1e-3;
  StepScheme scheme = StepScheme::Cnab2;

  // [ensemble]
  std::string init_type = "gaussian-empirical";  // dirac | gaussian-empirical | file
  std::uint64_t seed = 1;
  int count = 32;
  double scale = 0.05;
  double dirac_h2 = 0.0;  // |z0|_H^2 of the dirac point (0 = rest state)
  std::string init_file;
  int choquet_depth = 0;                // 0 = lift the raw measure
  std::vector<double> annulus_radii;    // empty = direct lift

  // [output]
  std::string out_dir = "out";
  int stride = 1;
  bool write_coeffs = true;

  std::string canonical() const;
  std::uint64_t hash() const;
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

std::uint64_t fnv1a64(const std::string& s);

}  // namespace benstat

#endif
