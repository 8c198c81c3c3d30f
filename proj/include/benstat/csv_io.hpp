#ifndef BENSTAT_CSV_IO_HPP
#define BENSTAT_CSV_IO_HPP

#include <string>

#include "benstat/integrator.hpp"
#include "benstat/measure.hpp"

namespace benstat {

// Trajectory CSV: one comment line with the time grid, then a header row and
// per-sample rows t,h2,v2[,a...,b...]. Doubles are written with %.17g so a
// read-back reproduces the samples bit-exactly. stride > 1 thins the rows;
// the reader then sees dt_eff = stride*dt.
void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          bool with_coeffs = true, int stride = 1);

// Reads samples; norm caches are rebuilt by the caller against its operator
// set (coefficients must be present).
Trajectory read_trajectory_csv(const std::string& path);

void rebuild_norm_caches(Trajectory& traj, const OperatorSet& ops, double gamma);

// Measure CSV: comment line with sizes, then rows weight,a...,b... .
void write_measure_csv(const std::string& path, const DiscreteMeasure& m);
DiscreteMeasure read_measure_csv(const std::string& path);

}  // namespace benstat

#endif
