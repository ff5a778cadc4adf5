#pragma once

#include <string>

#include "pnsat/distsim.hpp"
#include "pnsat/symbolic.hpp"

namespace pnsat {

/// Metrics as pretty-printed JSON with a fixed key order.
std::string to_json(const RunMetrics& m);
std::string to_json(const SimMetrics& m);

/// Per-workstation metrics as an aligned text table with a totals row.
std::string to_table(const SimMetrics& m);

}  // namespace pnsat
