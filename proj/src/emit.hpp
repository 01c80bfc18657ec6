#pragma once

#include <functional>
#include <iosfwd>
#include <string>

#include "loop_sim.hpp"
#include "resolution.hpp"
#include "run_config.hpp"
#include "staircase.hpp"
#include "validation.hpp"

namespace relaylock {

// Writers for every dataset the CLI produces. Numbers carry 17 significant
// digits; CSV headers are fixed.
void write_trace(std::ostream& os, const SimTrace& trace, OutputFormat format);
void write_staircase(std::ostream& os, const StaircaseDataset& ds, OutputFormat format);
void write_resolution(std::ostream& os, const ResolutionTable& table, OutputFormat format);
void write_comparison(std::ostream& os, const ComparisonReport& report, OutputFormat format);
void write_validation(std::ostream& os, const ValidationReport& report, OutputFormat format);

/// Runs `write` against `path`, or stdout for "-".
void write_to_path(const std::string& path, const std::function<void(std::ostream&)>& write);

std::string format_number(double x);

}  // namespace relaylock
