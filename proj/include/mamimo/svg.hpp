#pragma once

#include <string>
#include <vector>

namespace mamimo {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Standalone SVG line chart; y range [0,1] unless data exceeds it.
std::string svg_line_chart(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<Series>& series);

/// Bar chart of counts over bin edges with a marked vertical threshold.
std::string svg_histogram(const std::string& title, const std::vector<double>& edges,
                          const std::vector<long>& counts, double threshold);

}  // namespace mamimo
