#pragma once

#include <string>
#include <vector>

/// CSV and plot-file helpers shared by the experiment runners.
namespace lrdecon::csv {

/// 17 significant digits; "nan" and "inf" for non-finite values.
std::string number(double v);

/// Quotes a field when it contains a comma, quote or newline.
std::string field(const std::string& s);

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool markers = false;  ///< points instead of a polyline
};

/// Log-log line plot as a standalone SVG document. Nonpositive or non-finite
/// points are skipped.
void write_loglog_svg(const std::string& path, const std::string& title, const std::string& x_label,
                      const std::string& y_label, const std::vector<Series>& series);

}  // namespace lrdecon::csv
