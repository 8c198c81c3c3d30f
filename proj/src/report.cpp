#include "benstat/report.hpp"

#include <ctime>
#include <fstream>
#include <sstream>

#include "benstat/errors.hpp"

namespace benstat {

Json json_of(const CheckResult& c) {
  Json j;
  j["name"] = c.name;
  j["slack"] = c.worst_slack;
  j["abs_residual"] = c.worst_abs;
  j["tolerance"] = c.tolerance;
  j["pass"] = c.pass;
  j["at_from"] = c.at_from;
  j["at_to"] = c.at_to;
  return j;
}

Json json_of(const EstimateReport& r) {
  Json j;
  j["checks"] = Json::array();
  for (const auto& c : r.checks) j["checks"].push_back(json_of(c));
  j["c_fit"] = r.c_fit;
  j["pass"] = r.all_pass();
  return j;
}

Json json_of(const HConditionsReport& h) {
  Json j;
  j["right_continuity"] = {{"name", "h-right-continuity"},
                           {"worst_ratio", h.worst_rc_ratio},
                           {"tolerance", 1.0},
                           {"pass", h.rc_pass}};
  j["kb_line"] = {{"name", "h-v-drift-line"},
                  {"slack", h.kb_slack},
                  {"tolerance", 0.0},
                  {"pass", h.kb_pass}};
  j["envelope"] = {{"name", "h-bounded-envelope"},
                   {"excess", h.envelope_excess},
                   {"pass", h.envelope_pass}};
  j["tol_dt"] = h.tol_dt;
  j["pass"] = h.rc_pass && h.kb_pass && h.envelope_pass;
  return j;
}

Json json_of(const StatSolutionReport& r) {
  Json j;
  j["initial_condition"] = {{"atom_error", r.init_atom_error},
                            {"suite_error", r.init_suite_error},
                            {"suite_seed", r.suite_seed},
                            {"pass", r.init_atom_error == 0.0}};
  Json carrier = Json::array();
  int fails = 0;
  for (const auto& c : r.carrier) {
    if (!c.pass) ++fails;
    carrier.push_back({{"atom", c.atom},
                       {"weak_residual", c.weak_resid},
                       {"tolerance", c.resid_tol},
                       {"energy_pass", c.energy_pass},
                       {"pass", c.pass}});
  }
  j["carrier"] = {{"per_atom", carrier},
                  {"failures", fails},
                  {"pass", r.carrier_all_pass}};
  j["mean_energy"] = {{"slack", r.mean_energy_slack}, {"pass", r.mean_energy_pass}};
  j["tightness"] = {{"radius", r.tightness_radius_all},
                    {"bound", r.tightness_bound},
                    {"pass", r.tightness_pass}};
  j["h_conditions"] = json_of(r.h);
  j["calibration"] = {{"c_energy", r.cal.c_energy}, {"c_resid", r.cal.c_resid}, {"dt", r.cal.dt}};
  j["pass"] = r.all_pass();
  return j;
}

Json json_of(const DerivedConstants& c) {
  Json j;
  j["eta"] = c.eta;
  j["lambda1"] = c.lambda1;
  j["lambda2"] = c.lambda2;
  j["lambda0"] = c.lambda0;
  j["R0"] = c.R0;
  j["Kb"] = c.Kb;
  return j;
}

void write_report(const std::string& path, const Json& body) {
  std::ofstream out(path);
  require(out.good(), Errc::IoError, "cannot open " + path);
  const std::time_t now = std::time(nullptr);
  char stamp[64];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  out << "# generated " << stamp << "\n";
  out << body.dump(2) << "\n";
  require(out.good(), Errc::IoError, "write failed for " + path);
}

std::string read_report_body(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), Errc::IoError, "cannot open " + path);
  std::string first;
  std::getline(in, first);
  require(first.rfind("# generated", 0) == 0, Errc::IoError, path + ": missing header line");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json load_report(const std::string& path) { return Json::parse(read_report_body(path)); }

}  // namespace benstat
