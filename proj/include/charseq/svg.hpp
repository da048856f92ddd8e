#pragma once

#include <string>

#include "charseq/oracle.hpp"

namespace charseq::io {

// Deterministic line chart of a decay table: the gap column on a linear left
// axis, the chord upper bound on a logarithmic right axis, k along the bottom.
std::string decay_chart_svg(const oracle::DecayTable& table);

// Renders the chart to a file; filesystem failures surface as exceptions.
void emit_chart(const oracle::DecayTable& table, const std::string& path);

}  // namespace charseq::io
