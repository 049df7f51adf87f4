#pragma once

#include <string>
#include <vector>

namespace aep::harness {

// Reads log.csv from every run directory, groups the runs by method, and for
// each logged metric writes
//   <out_dir>/<metric>.svg  - per-method mean curve with a +/- sample-std band
//   <out_dir>/<metric>.csv  - the numbers behind the plot
//                             (steps, then <method>_mean, <method>_std each)
// Runs must share the logging schedule; rows beyond the shortest run are
// dropped so every curve is defined at every x.
void emit_plots(const std::vector<std::string>& run_dirs, const std::string& out_dir);

}  // namespace aep::harness
