#pragma once

// Deterministic SVG line plots and the CSV tables behind them.

#include <ostream>
#include <string>
#include <vector>

#include "mgl/homotopy.hpp"
#include "mgl/variation.hpp"

namespace mgl {

struct Series {
  std::string label;
  std::vector<double> x, y;
  std::string color = "#1f77b4";
  bool dashed = false;
};

/// Self-contained SVG document; identical input gives identical bytes.
std::string svg_line_plot(const std::string& title, const std::string& xlabel,
                          const std::string& ylabel, const std::vector<Series>& series);

/// One report row per t-sample.
struct VariationTable {
  AreaProfile profile;
  std::vector<VariationReport> reports;
};

VariationTable variation_table(const HomotopyTrace& trace);

/// Columns t,A,dA,d2A_analytic,d2A_fd,term_i..term_v.
void write_variation_csv(const VariationTable& table, std::ostream& out);

/// Writes <prefix>_trace.csv and <prefix>_node_<i>_<j>.svg per requested
/// node (lambda^2 against the mu envelope).  All content is generated before
/// any file is written; on error nothing is left behind.
std::vector<std::string> emit_homotopy_plots(const HomotopyTrace& trace,
                                             const std::vector<std::size_t>& nodes,
                                             const std::string& prefix);

/// Writes <prefix>_variation.csv, <prefix>_terms.svg (stacked terms with the
/// finite-difference overlay) and <prefix>_area.svg.
std::vector<std::string> emit_variation_plots(const VariationTable& table,
                                              const std::string& prefix);

}  // namespace mgl
