#pragma once

#include <string>
#include <vector>

namespace momw1 {

// A labeled polyline with an optional quantile band.
struct PlotSeries {
  std::string label;
  std::vector<double> x, y;
  std::vector<double> band_lo, band_hi;  // empty = no band
};

// Static SVG line plot (axes, ticks, legend, optional shaded bands).
void write_svg_plot(const std::string& path, const std::string& title,
                    const std::string& x_label, const std::string& y_label,
                    const std::vector<PlotSeries>& series);

// CSV-driven entry points used by the `plot` subcommand; all throw
// std::invalid_argument on malformed or empty input without writing files.
// Returns the paths written.
std::vector<std::string> plot_sweep_summary(const std::string& summary_csv_path,
                                            const std::string& out_dir);
std::vector<std::string> plot_convergence(const std::string& csv_path, const std::string& out_dir);
std::vector<std::string> plot_rate(const std::string& summary_csv_path,
                                   const std::string& out_dir);

}  // namespace momw1
