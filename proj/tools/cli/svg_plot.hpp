#pragma once

#include <string>
#include <vector>

#include "csv_table.hpp"

namespace mata::cli {

struct PlotSpec {
  std::string x_column;
  std::vector<std::string> y_columns;
  std::string title;
};

/// Static single-panel line chart of some columns of a CSV table.
std::string render_svg(const CsvTable& table, const PlotSpec& spec);

/// Default columns: curves files plot coverage and sel against gamma, sweep
/// files the three loss/gain columns against d.
PlotSpec default_plot_spec(const CsvTable& table);

/// Reads the CSV from disk and writes the SVG.
void plot_file(const std::string& csv_path, const std::string& svg_path, const PlotSpec* spec = nullptr);

}  // namespace mata::cli
