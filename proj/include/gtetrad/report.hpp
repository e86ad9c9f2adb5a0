#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "gtetrad/classical.hpp"
#include "gtetrad/gt_test.hpp"
#include "gtetrad/simlab.hpp"

namespace gtetrad {

// Insertion-ordered JSON keeps report layouts byte-stable.
using Json = nlohmann::ordered_json;

// Shortest round-trip decimal representation of a double.
std::string format_number(double value);

Json ct_report_json(const CtReport& report);
Json gt_report_json(const GtReport& report);
Json sweep_json(const std::string& method,
                const std::vector<SweepEntry>& entries);

// One CSV line per estimate with the fixed column set
// setting,method,n,reps,seed,rejection_rate,mc_se.
std::string study_csv(const std::vector<PowerEstimate>& estimates);

// Flat entry list plus a power-table view grouped as
// setting -> method -> sample size -> rate.
Json study_json(const std::vector<PowerEstimate>& estimates, double alpha);

}  // namespace gtetrad
