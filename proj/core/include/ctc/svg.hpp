#pragma once

#include <string>
#include <vector>

#include "ctc/simulator.hpp"

namespace ctc {

/// Static SVG plots of a run: deviation traces, the XY and XZ path
/// projections with the reference curve overlaid, and the control traces.
/// Returns the written file paths. Throws IoError on unwritable paths.
std::vector<std::string> write_plots(const SimLog& log, const Curve& curve,
                                     const std::string& dir);

}  // namespace ctc
