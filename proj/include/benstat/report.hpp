#ifndef BENSTAT_REPORT_HPP
#define BENSTAT_REPORT_HPP

#include <json.hpp>
#include <string>

#include "benstat/ensemble.hpp"
#include "benstat/integrator.hpp"
#include "benstat/params.hpp"

namespace benstat {

using Json = nlohmann::ordered_json;

// Report schema: every check appears as {name, slack, tolerance, pass} plus
// check-specific detail. Reports are written with a single timestamp header
// line followed by the canonical JSON body, so re-runs are byte-identical
// except for that line.
Json json_of(const CheckResult& c);
Json json_of(const EstimateReport& r);
Json json_of(const HConditionsReport& h);
Json json_of(const StatSolutionReport& r);
Json json_of(const DerivedConstants& c);

void write_report(const std::string& path, const Json& body);

// Body only (everything after the timestamp line).
std::string read_report_body(const std::string& path);
Json load_report(const std::string& path);

}  // namespace benstat

#endif
