#pragma once

// SVG rendering of a ReportTable: one panel per metric, x = unit count,
// one series per SNR, error bars = standard deviation.

#include <string>

#include "muvsim/evaluation.hpp"

namespace muvsim {

/// Byte-stable for a given table. Missing cells are skipped, not drawn at zero.
std::string render_report_svg(const ReportTable& table);

}  // namespace muvsim
