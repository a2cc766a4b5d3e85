#pragma once

#include <iosfwd>
#include <string>

#include "microdl/experiment.hpp"

namespace microdl {

enum class PlotKind {
  kGroupedBars,  // one panel per metric, one bar group per dataset, one bar per method
  kAlphaCurve,   // metric against alpha from the sweep rows, one polyline per metric
};

PlotKind plot_kind_from_string(const std::string& s);  // "grouped-bars" | "alpha-curve"

// Standalone SVG; identical tables give identical bytes. Throws DataError if
// the table holds nothing to draw for the requested kind.
void render_svg(std::ostream& out, const ResultsTable& table, PlotKind kind);
void render_plots(const ResultsTable& table, PlotKind kind, const std::string& path);

}  // namespace microdl
